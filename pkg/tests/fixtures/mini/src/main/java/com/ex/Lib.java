package com.ex;

/**
 * Small arithmetic helpers used as an end-to-end fixture.
 */
public class Lib {

    // assert disabled > 0; a commented-out assertion must not count
    /* assert alsoDisabled > 0; */

    public int m0(int x) {
        assert x > 0;
        int y = x + 0;
        return y;
    }

    public int m1(int x) {
        assert x > 1;
        int y = x + 1;
        return y;
    }

    public int m2(int x) {
        assert x > 2;
        int y = x + 2;
        return y;
    }

    public int m3(int x) {
        assert x > 3;
        int y = x + 3;
        return y;
    }

    public int m4(int x) {
        assert x > 4;
        int y = x + 4;
        return y;
    }

    public int m5(int x) {
        assert x > 5;
        int y = x + 5;
        return y;
    }

    public int m6(int x) {
        assert x > 6;
        int y = x + 6;
        return y;
    }

    public int m7(int x) {
        assert x > 7;
        int y = x + 7;
        return y;
    }

    public int m8(int x) {
        assert x > 8;
        int y = x + 8;
        return y;
    }

    public int m9(int x) {
        assert x > 9;
        int y = x + 9;
        return y;
    }

    public int m10(int x) {
        assert x > 10;
        int y = x + 10;
        return y;
    }

    public int m11(int x) {
        assert x > 11;
        int y = x + 11;
        return y;
    }

    public int plain(int x) {
        return x * 2;
    }
}
