"""Metrics: comment-aware LOC, class counting, GUI counts, history tables."""

import random
from datetime import date

import pytest

from apprepo.errors import IoFailure, MalformedClassFile, UnsortedInput
from apprepo.metrics import (
    VersionMetrics,
    count_classes,
    count_loc,
    count_loc_text,
    gui_counts,
    parse_version_csv,
    version_csv,
    version_table,
)

from classasm import ACC_PUBLIC, AsmClass, AsmMethod, assemble_class


# Each entry: (file name, content, hand-counted LOC).
# Counting rule: a line counts iff it has any code outside comments;
# blank and comment-only lines do not count; comment markers inside
# string/char literals do not open comments.
LOC_CORPUS = [
    ("Basics.java",
     "int a = 1;\n"
     "\n"
     "int b = 2;\n"
     "// comment only\n"
     "\n"
     "int c = 3;\n",
     3),
    ("BlockMidLine.java",
     "int x = 1; /* opens here\n"
     "   inside only\n"
     " ends */ int y = 2;\n",
     2),
    ("StringMarkers.java",
     'String s = "/* not a comment */";\n'
     'String t = "// also not";\n',
     2),
    ("CharLiterals.java",
     "char q = '\"';\n"
     'String u = "he said \\"hi\\" // still string";\n'
     "char slash = '/';\n",
     3),
    ("TrailingComment.java",
     "// header comment\n"
     "/* block\n"
     "   over lines\n"
     "*/\n"
     "int v = 5; // trailing\n",
     1),
    ("Empty.java", "", 0),
    ("Whitespace.java",
     "   \n"
     "\t\n"
     "int w = 1;\n",
     1),
    ("TwoBlocks.java",
     "/* a */ /* b */\n"
     "/* a */ int z = 1; /* b */\n"
     "int /* inline */ k = 2;\n",
     2),
    ("EscapedBackslash.java",
     'String p = "ends with backslash \\\\";\n'
     "// done\n"
     'String q2 = "x";\n',
     2),
    ("Javadoc.java",
     "/** javadoc style\n"
     " * with stars\n"
     " */\n"
     "public int m() { return 1; }\n",
     1),
    ("CloseAndReopen.java",
     "int a2 = 1; /* c1 */ int b2 = 2; /* c2\n"
     "  continues */ int c2 = 3;\n",
     2),
    ("MarkersInComments.java",
     "// /* this never opens\n"
     "int real = 42;\n"
     "/* // line marker inside block\n"
     " still inside */\n",
     1),
]


@pytest.fixture()
def loc_dir(tmp_path):
    for name, content, _ in LOC_CORPUS:
        (tmp_path / name).write_text(content, encoding="utf-8")
    return tmp_path


def test_corpus_is_twelve_files():
    assert len(LOC_CORPUS) == 12


@pytest.mark.parametrize("name,content,expected",
                         LOC_CORPUS, ids=[c[0] for c in LOC_CORPUS])
def test_loc_per_file_hand_counts(name, content, expected):
    assert count_loc_text(content) == expected


def test_loc_directory_additivity(loc_dir):
    assert count_loc(loc_dir) == sum(c[2] for c in LOC_CORPUS)


def test_loc_ignores_other_extensions(loc_dir):
    (loc_dir / "notes.txt").write_text("not counted\n")
    assert count_loc(loc_dir) == sum(c[2] for c in LOC_CORPUS)
    assert count_loc(loc_dir, extensions=(".java", ".txt")) == \
        sum(c[2] for c in LOC_CORPUS) + 1


def test_loc_empty_directory(tmp_path):
    assert count_loc(tmp_path) == 0


def test_loc_missing_directory(tmp_path):
    with pytest.raises(IoFailure):
        count_loc(tmp_path / "nope")


def test_loc_bounds_random_text():
    alphabet = 'ab /*"\'\\\n'
    for seed in range(40):
        rng = random.Random(seed)
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 300)))
        counted = count_loc_text(text)
        assert 0 <= counted <= len(text.splitlines())


# --- class counting -----------------------------------------------------------

def _write_class(path, name):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(assemble_class(AsmClass(name, methods=[
        AsmMethod("m", "()V", ACC_PUBLIC, [("return",)])])))


def test_count_two_classes(tmp_path):
    _write_class(tmp_path / "A.class", "A")
    _write_class(tmp_path / "B.class", "B")
    assert count_classes(tmp_path) == 2


def test_count_nested_packages_and_inner_classes(tmp_path):
    _write_class(tmp_path / "p" / "A.class", "p/A")
    _write_class(tmp_path / "p" / "A$Inner.class", "p/A$Inner")
    _write_class(tmp_path / "p" / "q" / "B.class", "p/q/B")
    _write_class(tmp_path / "p" / "q" / "B$1.class", "p/q/B$1")
    _write_class(tmp_path / "C.class", "C")
    assert count_classes(tmp_path) == 5


def test_count_empty_dir(tmp_path):
    assert count_classes(tmp_path) == 0


def test_count_collects_malformed(tmp_path):
    _write_class(tmp_path / "A.class", "A")
    (tmp_path / "Bad.class").write_bytes(b"\xca\xfe\xba\xbe garbage")
    with pytest.raises(MalformedClassFile, match="Bad.class"):
        count_classes(tmp_path)


def test_count_classes_on_corpus(corpus):
    # 14 application classes assembled into the application container
    assert count_classes(corpus.paths["application"]) == 14


# --- gui counts -----------------------------------------------------------------

def test_gui_counts_examples():
    from test_guimodel import model, widget, window
    assert gui_counts(model()) == (0, 0)
    hidden = model(window("w", widget("a"), widget("b", visible=False), widget("c")))
    assert gui_counts(hidden) == (3, 1)
    two = model(window("w1", widget("x")), window("w2"))
    assert gui_counts(two) == (1, 2)


def test_gui_counts_consistency():
    from generators import random_gui_model
    for seed in range(20):
        m = random_gui_model(random.Random(seed))
        widgets, windows = gui_counts(m)
        total = sum(1 for _ in m.walk())
        assert widgets + windows == total


# --- tables -----------------------------------------------------------------------

FREEMIND_ROW = VersionMetrics("0.1.0", date(2000, 11, 1), 77, 3597, 101, 1)
JEDIT_ROW = VersionMetrics("2.3pre2", date(2000, 1, 29), 332, 23709, 482, 12)


def test_freemind_first_row_renders_as_paper_table():
    expected = (
        "Version | CVS Timestamp | Classes | LOC  | Widgets | Windows\n"
        "--------+---------------+---------+------+---------+--------\n"
        "0.1.0   | 01.11.2000    |      77 | 3597 |     101 |       1\n"
    )
    assert version_table([FREEMIND_ROW]) == expected


def test_jedit_first_row_renders_as_paper_table():
    expected = (
        "Version | CVS Timestamp | Classes | LOC   | Widgets | Windows\n"
        "--------+---------------+---------+-------+---------+--------\n"
        "2.3pre2 | 29.01.2000    |     332 | 23709 |     482 |      12\n"
    )
    assert version_table([JEDIT_ROW]) == expected


def test_table_deterministic():
    rows = [JEDIT_ROW, FREEMIND_ROW]
    assert version_table(rows) == version_table(rows)
    assert version_table(rows).encode() == version_table(rows).encode()


def test_empty_table_header_only():
    out = version_table([])
    lines = out.splitlines()
    assert lines[0].split(" | ") == ["Version", "CVS Timestamp", "Classes",
                                     "LOC", "Widgets", "Windows"]
    assert len(lines) == 2  # header + separator


def test_unsorted_rows_rejected():
    with pytest.raises(UnsortedInput):
        version_table([FREEMIND_ROW, JEDIT_ROW])  # jEdit row is older
    with pytest.raises(UnsortedInput):
        version_csv([FREEMIND_ROW, JEDIT_ROW])


def test_csv_output_and_round_trip():
    rows = [JEDIT_ROW, FREEMIND_ROW]
    text = version_csv(rows)
    lines = text.split("\r\n")
    assert lines[0] == "version,timestamp,classes,loc,widgets,windows"
    assert lines[1] == "2.3pre2,2000-01-29,332,23709,482,12"
    assert parse_version_csv(text) == rows


def test_csv_quotes_commas():
    row = VersionMetrics("1,0", date(2001, 1, 1), 1, 2, 3, 4)
    text = version_csv([row])
    assert '"1,0"' in text
    assert parse_version_csv(text) == [row]


def test_negative_counts_rejected():
    with pytest.raises(ValueError):
        VersionMetrics("v", date(2000, 1, 1), -1, 0, 0, 0)
