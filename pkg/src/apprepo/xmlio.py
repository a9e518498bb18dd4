"""Byte-deterministic XML writing.

The standard library writer reorders nothing, but spelling out our own
emitter keeps attribute order, indentation, escaping and the declaration
line under this package's control, which the persistence round-trip
guarantees depend on.
"""

from __future__ import annotations

XML_DECLARATION = '<?xml version="1.0" encoding="UTF-8"?>\n'


def escape_attr(value: str) -> str:
    """Escape an attribute value, preserving tabs/newlines as char refs."""
    out = []
    for ch in value:
        if ch == "&":
            out.append("&amp;")
        elif ch == "<":
            out.append("&lt;")
        elif ch == ">":
            out.append("&gt;")
        elif ch == '"':
            out.append("&quot;")
        elif ch in ("\n", "\r", "\t"):
            out.append(f"&#{ord(ch)};")
        else:
            out.append(ch)
    return "".join(out)


class XmlWriter:
    """Accumulates an indented XML document and renders it as UTF-8 bytes."""

    def __init__(self):
        self._lines = [XML_DECLARATION.rstrip("\n")]
        self._stack: list[str] = []

    def _fmt(self, tag: str, attrs: list[tuple[str, str]] | None) -> str:
        parts = [tag]
        for name, value in attrs or []:
            parts.append(f'{name}="{escape_attr(value)}"')
        return " ".join(parts)

    def open(self, tag: str, attrs: list[tuple[str, str]] | None = None) -> None:
        indent = "  " * len(self._stack)
        self._lines.append(f"{indent}<{self._fmt(tag, attrs)}>")
        self._stack.append(tag)

    def close(self) -> None:
        tag = self._stack.pop()
        indent = "  " * len(self._stack)
        self._lines.append(f"{indent}</{tag}>")

    def leaf(self, tag: str, attrs: list[tuple[str, str]] | None = None) -> None:
        indent = "  " * len(self._stack)
        self._lines.append(f"{indent}<{self._fmt(tag, attrs)}/>")

    def element(self, tag: str, attrs: list[tuple[str, str]] | None,
                has_children: bool) -> None:
        if has_children:
            self.open(tag, attrs)
        else:
            self.leaf(tag, attrs)

    def tobytes(self) -> bytes:
        assert not self._stack, "unclosed elements"
        return ("\n".join(self._lines) + "\n").encode("utf-8")
