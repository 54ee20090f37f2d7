import shutil
from pathlib import Path

import pytest

from assertify.corpus import EVAL, FSL, build_corpus

FIXTURES = Path(__file__).parent / "fixtures"
MINI_REPO = FIXTURES / "mini"
TAXONOMY = FIXTURES / "taxonomy"

SAMPLE_CLASS = """\
package com.ex;

import java.util.List;

public class Sample {

    private final List<String> names;
    private int total;

    public Sample(List<String> names) {
        this.names = names;
    }

    /** Adds a strictly positive value. */
    public int add(int value) {
        assert value > 0 : "value must be positive";
        total += value;
        return total; // running total
    }

    public static <T extends Comparable<T>> T max(T a, T b) throws IllegalStateException {
        assert a != null;
        assert b != null;
        return a.compareTo(b) >= 0 ? a : b;
    }

    public String describe() {
        String text = "total=" + total + "; // not a comment";
        return text;
    }

    public abstract static class Inner {
        public abstract void run();
    }
}
"""


@pytest.fixture(scope="session")
def mini_corpus():
    return build_corpus([MINI_REPO])


@pytest.fixture()
def mini_snapshot(tmp_path):
    dest = tmp_path / "mini"
    shutil.copytree(MINI_REPO, dest)
    return dest


def label_split(corpus, n_eval):
    """Deterministically mark the first n_eval assertion-bearing records EVAL."""
    candidates = sorted(
        r.record_id for r in corpus.methods if r.assertions
    )
    for i, rid in enumerate(candidates):
        corpus.split[rid] = EVAL if i < n_eval else FSL
