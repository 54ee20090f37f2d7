import pytest

from assertify.javasrc.methods import JavaParseError, extract_methods
from conftest import SAMPLE_CLASS


@pytest.fixture(scope="module")
def methods():
    return {m.method_name: m for m in extract_methods(SAMPLE_CLASS, "Sample.java")}


def test_all_members_found(methods):
    assert set(methods) == {"Sample", "add", "max", "describe", "run"}


def test_signature_includes_modifiers(methods):
    assert methods["add"].signature == "public int add(int value)"
    assert methods["max"].signature.startswith("public static <T extends")


def test_parameters_and_return_type(methods):
    assert methods["add"].parameters == [("value", "int")]
    assert methods["add"].return_type == "int"
    assert methods["max"].return_type == "T"
    assert methods["Sample"].return_type is None


def test_class_fqn_tracks_nesting(methods):
    assert methods["add"].class_fqn == "com.ex.Sample"
    assert methods["run"].class_fqn == "com.ex.Sample.Inner"


def test_assertion_detection(methods):
    add = methods["add"]
    assert len(add.assertions) == 1
    a = add.assertions[0]
    assert a.condition == "value > 0"
    assert a.message == '"value must be positive"'
    assert len(methods["max"].assertions) == 2
    assert methods["max"].assertions[0].message is None


def test_assert_inside_string_not_counted(methods):
    # "describe" contains no assert; string content must not trip detection
    assert methods["describe"].assertions == []


def test_method_text_is_exact_slice(methods):
    m = methods["add"]
    assert SAMPLE_CLASS[m.span[0]:m.span[1]] == m.text
    assert m.text.endswith("}")


def test_line_numbers(methods):
    m = methods["add"]
    lines = SAMPLE_CLASS.splitlines()
    assert "public int add" in lines[m.start_line - 1]
    assert lines[m.end_line - 1].strip() == "}"


def test_bodyless_method(methods):
    assert methods["run"].has_body is False


def test_doc_comment(methods):
    assert "strictly positive" in methods["add"].doc_comment


def test_enum_constants_skipped():
    text = "enum Color { RED, GREEN;\n  public Color next() { return RED; }\n}"
    names = [m.method_name for m in extract_methods(text, "Color.java")]
    assert names == ["next"]


def test_annotations_and_generics():
    text = (
        "class A {\n"
        "  @Override\n"
        "  public java.util.Map<String, java.util.List<Integer>> get(int n) {\n"
        "    return null;\n"
        "  }\n"
        "}\n"
    )
    (m,) = extract_methods(text, "A.java")
    assert m.method_name == "get"
    assert m.parameters == [("n", "int")]


def test_unbalanced_braces_raise():
    with pytest.raises(JavaParseError):
        extract_methods("class A { void f() {", "A.java")


def test_lambda_and_anonymous_class_bodies():
    text = (
        "class A {\n"
        "  void f() {\n"
        "    Runnable r = new Runnable() { public void run() { } };\n"
        "    Runnable s = () -> { int x = 1; };\n"
        "  }\n"
        "}\n"
    )
    ms = extract_methods(text, "A.java")
    f = next(m for m in ms if m.method_name == "f")
    assert f.anonymous_bodies >= 1
