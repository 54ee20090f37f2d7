import pytest

from assertify.javasrc.syntax import validate_method_text

VALID = [
    "void f() { }",
    "public int add(int a, int b) {\n    return a + b;\n}",
    "public void g() {\n    assert x != null;\n    run();\n}",
    'void h(int n) {\n    assert n > 0 : "n=" + n;\n}',
    "static <T> T id(T t) throws Exception {\n    return t;\n}",
    "void tern() {\n    assert a ? b : c;\n}",
    "void cast(Object o) {\n    assert ((String) o).length() > 0;\n}",
    "public Sample(int n) {\n    this.n = n;\n}",
    "void loop() {\n    for (int i = 0; i < 3; i++) {\n        sum += i;\n    }\n}",
    "void arr() {\n    int[] a = new int[] {1, 2};\n    assert a[0] < a[1];\n}",
]

INVALID = [
    # assertion placed above the signature
    "assert dest != null;\npublic void write(int dest) {\n    sink = dest;\n}",
    # missing semicolon at end of block
    "void f() {\n    int x = 1\n}",
    # missing semicolon inside an assert condition
    "void f() {\n    assert x > 0\n    run();\n}",
    # unbalanced parenthesis in the condition
    "void f() {\n    assert (x > 0;\n}",
    # assert with no condition
    "void f() {\n    assert;\n}",
    # body never closed
    "void f() {\n    run();",
    # two operands with no operator
    "void f() {\n    assert x y;\n}",
]


@pytest.mark.parametrize("text", VALID)
def test_valid_methods_pass(text):
    assert validate_method_text(text) is None


@pytest.mark.parametrize("text", INVALID)
def test_invalid_methods_fail(text):
    assert validate_method_text(text) is not None


def test_diagnostic_mentions_problem():
    err = validate_method_text("void f() {\n    int x = 1\n}")
    assert "';'" in err or "semicolon" in err or "terminated" in err
