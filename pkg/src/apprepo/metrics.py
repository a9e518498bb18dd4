"""Per-version source metrics: classes, LOC, widgets, windows.

LOC counts every line that is neither blank nor comment-only; a line
carrying both code and a comment counts as code. The comment syntax is
``//`` line comments and ``/* */`` block comments, with comment markers
inside string or character literals left alone.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from .classfile import parse_class
from .containers import iter_class_entries
from .errors import IoFailure, MalformedClassFile, UnsortedInput
from .guimodel import GuiModel

DEFAULT_SOURCE_EXTENSIONS = (".java",)

CSV_HEADER = ["version", "timestamp", "classes", "loc", "widgets", "windows"]
TABLE_COLUMNS = ["Version", "CVS Timestamp", "Classes", "LOC", "Widgets", "Windows"]


@dataclass(frozen=True)
class VersionMetrics:
    """The four per-version counts plus identifying label and date."""

    version_label: str
    timestamp: date
    classes: int
    loc: int
    widgets: int
    windows: int

    def __post_init__(self):
        for name in ("classes", "loc", "widgets", "windows"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def count_loc_text(text: str) -> int:
    """Count the non-blank, non-comment-only lines of one source text."""
    count = 0
    in_block = False
    for line in text.splitlines():
        has_code = False
        in_string = False
        in_char = False
        escaped = False
        i = 0
        while i < len(line):
            ch = line[i]
            if in_block:
                if ch == "*" and line.startswith("*/", i):
                    in_block = False
                    i += 2
                    continue
                i += 1
                continue
            if in_string or in_char:
                has_code = True
                if escaped:
                    escaped = False
                elif ch == "\\":
                    escaped = True
                elif in_string and ch == '"':
                    in_string = False
                elif in_char and ch == "'":
                    in_char = False
                i += 1
                continue
            if ch == "/" and line.startswith("//", i):
                break
            if ch == "/" and line.startswith("/*", i):
                in_block = True
                i += 2
                continue
            if ch == '"':
                in_string = True
                has_code = True
                i += 1
                continue
            if ch == "'":
                in_char = True
                has_code = True
                i += 1
                continue
            if not ch.isspace():
                has_code = True
            i += 1
        # strings do not span lines; an unterminated literal ends with its line
        if has_code:
            count += 1
    return count


def count_loc(sources_dir: Path | str,
              extensions: tuple[str, ...] = DEFAULT_SOURCE_EXTENSIONS) -> int:
    """Sum of per-file LOC over all recognized sources under a directory."""
    root = Path(sources_dir)
    if not root.is_dir():
        raise IoFailure(f"not a readable directory: {root}")
    total = 0
    for path in sorted(root.rglob("*")):
        if path.is_file() and path.suffix in extensions:
            try:
                text = path.read_text(encoding="utf-8", errors="replace")
            except OSError as exc:
                raise IoFailure(f"cannot read {path}: {exc}") from exc
            total += count_loc_text(text)
    return total


def count_classes(binaries_dir: Path | str) -> int:
    """Number of parseable class files under the application binaries.

    Libraries never enter the count: the operation only sees the binaries
    directory. Any malformed class file fails the count; all failures are
    collected into the raised error.
    """
    root = Path(binaries_dir)
    if not root.is_dir():
        raise IoFailure(f"not a readable directory: {root}")
    count = 0
    failures = []
    for entry, data in iter_class_entries(root):
        try:
            parse_class(data, source=entry)
            count += 1
        except MalformedClassFile as exc:
            failures.append(str(exc))
    if failures:
        raise MalformedClassFile(
            f"{len(failures)} unparseable class file(s): " + "; ".join(failures))
    return count


def gui_counts(m: GuiModel) -> tuple[int, int]:
    """(widgets, windows) of a model; hidden and zero-size elements count."""
    return m.counts()


def _check_sorted(rows: list[VersionMetrics]) -> None:
    for earlier, later in zip(rows, rows[1:]):
        if later.timestamp < earlier.timestamp:
            raise UnsortedInput(
                f"rows not sorted by timestamp: {later.version_label}"
                f" ({later.timestamp}) after {earlier.version_label}"
                f" ({earlier.timestamp})")


def _table_timestamp(ts: date) -> str:
    return f"{ts.day:02d}.{ts.month:02d}.{ts.year:04d}"


def version_table(rows: list[VersionMetrics]) -> str:
    """Aligned text table of the version history, one row per version.

    Rows must already be sorted by timestamp. Output is byte-deterministic
    for a fixed input.
    """
    _check_sorted(rows)
    cells = [TABLE_COLUMNS]
    for row in rows:
        cells.append([
            row.version_label,
            _table_timestamp(row.timestamp),
            str(row.classes),
            str(row.loc),
            str(row.widgets),
            str(row.windows),
        ])
    widths = [max(len(line[i]) for line in cells) for i in range(len(TABLE_COLUMNS))]
    lines = []
    for index, line in enumerate(cells):
        # text columns left-aligned, counts right-aligned
        rendered = [
            line[0].ljust(widths[0]),
            line[1].ljust(widths[1]),
        ] + [
            line[i].rjust(widths[i]) if index > 0 else line[i].ljust(widths[i])
            for i in range(2, len(TABLE_COLUMNS))
        ]
        lines.append(" | ".join(rendered).rstrip())
        if index == 0:
            lines.append("-+-".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def version_csv(rows: list[VersionMetrics]) -> str:
    """RFC-4180 CSV variant of the version table."""
    _check_sorted(rows)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([
            row.version_label,
            row.timestamp.isoformat(),
            row.classes,
            row.loc,
            row.widgets,
            row.windows,
        ])
    return out.getvalue()


def parse_version_csv(text: str) -> list[VersionMetrics]:
    """Read back rows written by version_csv."""
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or rows[0] != CSV_HEADER:
        raise IoFailure(f"unexpected metrics CSV header: {rows[:1]!r}")
    out = []
    for row in rows[1:]:
        if len(row) != len(CSV_HEADER):
            raise IoFailure(f"malformed metrics CSV row: {row!r}")
        out.append(VersionMetrics(
            row[0], date.fromisoformat(row[1]),
            int(row[2]), int(row[3]), int(row[4]), int(row[5])))
    return out
