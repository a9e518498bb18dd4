"""Constant pool decoding and symbolic rendering of pool entries."""

from __future__ import annotations

import struct
from dataclasses import dataclass

from ..errors import MalformedClassFile

CONST_UTF8 = 1
CONST_INTEGER = 3
CONST_FLOAT = 4
CONST_LONG = 5
CONST_DOUBLE = 6
CONST_CLASS = 7
CONST_STRING = 8
CONST_FIELDREF = 9
CONST_METHODREF = 10
CONST_INTERFACE_METHODREF = 11
CONST_NAME_AND_TYPE = 12
CONST_METHOD_HANDLE = 15
CONST_METHOD_TYPE = 16
CONST_INVOKE_DYNAMIC = 18

TAG_NAMES = {
    CONST_UTF8: "Utf8",
    CONST_INTEGER: "Integer",
    CONST_FLOAT: "Float",
    CONST_LONG: "Long",
    CONST_DOUBLE: "Double",
    CONST_CLASS: "Class",
    CONST_STRING: "String",
    CONST_FIELDREF: "Fieldref",
    CONST_METHODREF: "Methodref",
    CONST_INTERFACE_METHODREF: "InterfaceMethodref",
    CONST_NAME_AND_TYPE: "NameAndType",
    CONST_METHOD_HANDLE: "MethodHandle",
    CONST_METHOD_TYPE: "MethodType",
    CONST_INVOKE_DYNAMIC: "InvokeDynamic",
}


@dataclass(frozen=True)
class ConstantEntry:
    """One constant pool slot: a tag plus its decoded payload.

    Payloads are kept raw (indices unresolved); ``ConstantPool`` methods
    resolve and validate them on demand.
    """

    tag: int
    value: object


class ByteReader:
    """Big-endian cursor over class file bytes."""

    def __init__(self, data: bytes, source: str | None = None):
        self.data = data
        self.pos = 0
        self.source = source

    def fail(self, message: str, offset: int | None = None) -> MalformedClassFile:
        return MalformedClassFile(message, self.pos if offset is None else offset, self.source)

    def _take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise self.fail("truncated class file")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u1(self) -> int:
        return self._take(1)[0]

    def u2(self) -> int:
        return struct.unpack(">H", self._take(2))[0]

    def u4(self) -> int:
        return struct.unpack(">I", self._take(4))[0]

    def s1(self) -> int:
        return struct.unpack(">b", self._take(1))[0]

    def s2(self) -> int:
        return struct.unpack(">h", self._take(2))[0]

    def s4(self) -> int:
        return struct.unpack(">i", self._take(4))[0]

    def f4(self) -> float:
        return struct.unpack(">f", self._take(4))[0]

    def f8(self) -> float:
        return struct.unpack(">d", self._take(8))[0]

    def s8(self) -> int:
        return struct.unpack(">q", self._take(8))[0]

    def raw(self, n: int) -> bytes:
        return self._take(n)


class ConstantPool:
    """The indexed constant pool of one class file.

    Slot 0 and the shadow slots after Long/Double entries hold ``None``.
    All lookups validate the index and the expected entry kind; a bad
    reference raises :class:`MalformedClassFile`.
    """

    def __init__(self, entries: list[ConstantEntry | None], source: str | None = None):
        self.entries = entries
        self.source = source

    def __len__(self) -> int:
        return len(self.entries)

    def entry(self, index: int, tag: int | None = None) -> ConstantEntry:
        if index <= 0 or index >= len(self.entries) or self.entries[index] is None:
            raise MalformedClassFile(f"invalid constant pool index {index}", 0, self.source)
        got = self.entries[index]
        if tag is not None and got.tag != tag:
            raise MalformedClassFile(
                f"constant pool index {index} holds {TAG_NAMES.get(got.tag, got.tag)},"
                f" expected {TAG_NAMES[tag]}", 0, self.source)
        return got

    def utf8(self, index: int) -> str:
        return self.entry(index, CONST_UTF8).value

    def class_name(self, index: int) -> str:
        return self.utf8(self.entry(index, CONST_CLASS).value)

    def name_and_type(self, index: int) -> tuple[str, str]:
        name_idx, desc_idx = self.entry(index, CONST_NAME_AND_TYPE).value
        return self.utf8(name_idx), self.utf8(desc_idx)

    def member_ref(self, index: int) -> tuple[str, str, str]:
        """Resolve a Fieldref/Methodref/InterfaceMethodref to (class, name, descriptor)."""
        got = self.entry(index)
        if got.tag not in (CONST_FIELDREF, CONST_METHODREF, CONST_INTERFACE_METHODREF):
            raise MalformedClassFile(
                f"constant pool index {index} holds {TAG_NAMES.get(got.tag, got.tag)},"
                " expected a member reference", 0, self.source)
        class_idx, nat_idx = got.value
        name, desc = self.name_and_type(nat_idx)
        return self.class_name(class_idx), name, desc

    def invoke_dynamic(self, index: int) -> tuple[int, str, str]:
        """Resolve an InvokeDynamic entry to (bootstrap index, name, descriptor)."""
        bsm_idx, nat_idx = self.entry(index, CONST_INVOKE_DYNAMIC).value
        name, desc = self.name_and_type(nat_idx)
        return bsm_idx, name, desc

    def render(self, index: int) -> str:
        """Human-readable text for a loadable or referenced pool entry."""
        got = self.entry(index)
        tag = got.tag
        if tag == CONST_UTF8:
            return got.value
        if tag == CONST_INTEGER:
            return str(got.value)
        if tag == CONST_LONG:
            return f"{got.value}L"
        if tag == CONST_FLOAT:
            return f"{got.value!r}f"
        if tag == CONST_DOUBLE:
            return f"{got.value!r}d"
        if tag == CONST_CLASS:
            return self.class_name(index)
        if tag == CONST_STRING:
            return quote_string(self.utf8(got.value))
        if tag == CONST_FIELDREF:
            cls, name, desc = self.member_ref(index)
            return f"{cls}.{name}:{desc}"
        if tag in (CONST_METHODREF, CONST_INTERFACE_METHODREF):
            cls, name, desc = self.member_ref(index)
            return f"{cls}.{name}{desc}"
        if tag == CONST_NAME_AND_TYPE:
            name, desc = self.name_and_type(index)
            return f"{name}:{desc}"
        if tag == CONST_METHOD_TYPE:
            return self.utf8(got.value)
        if tag == CONST_METHOD_HANDLE:
            kind, ref_idx = got.value
            return f"handle[{kind}] {self.render(ref_idx)}"
        if tag == CONST_INVOKE_DYNAMIC:
            bsm_idx, name, desc = self.invoke_dynamic(index)
            return f"indy[{bsm_idx}] {name}{desc}"
        raise MalformedClassFile(f"unrenderable constant tag {tag}", 0, self.source)

    def validate(self) -> None:
        """Eagerly resolve every cross-reference in the pool."""
        for index, got in enumerate(self.entries):
            if got is None:
                continue
            if got.tag in (CONST_CLASS, CONST_STRING, CONST_METHOD_TYPE):
                self.utf8(got.value)
            elif got.tag in (CONST_FIELDREF, CONST_METHODREF, CONST_INTERFACE_METHODREF):
                self.member_ref(index)
            elif got.tag == CONST_NAME_AND_TYPE:
                self.name_and_type(index)
            elif got.tag == CONST_METHOD_HANDLE:
                _, ref_idx = got.value
                self.entry(ref_idx)
            elif got.tag == CONST_INVOKE_DYNAMIC:
                _, nat_idx = got.value
                self.name_and_type(nat_idx)


def quote_string(text: str) -> str:
    """Quote a string constant for listings, escaping the usual suspects."""
    escaped = (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )
    return f'"{escaped}"'


def parse_constant_pool(reader: ByteReader) -> ConstantPool:
    """Decode the constant pool table at the reader's position."""
    count = reader.u2()
    entries: list[ConstantEntry | None] = [None]
    index = 1
    while index < count:
        start = reader.pos
        tag = reader.u1()
        if tag == CONST_UTF8:
            length = reader.u2()
            raw = reader.raw(length)
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError:
                # Modified UTF-8 encodes NUL and supplementary chars
                # differently; surrogatepass covers the fixtures we accept.
                text = raw.decode("utf-8", errors="surrogatepass")
            entries.append(ConstantEntry(tag, text))
        elif tag == CONST_INTEGER:
            entries.append(ConstantEntry(tag, reader.s4()))
        elif tag == CONST_FLOAT:
            entries.append(ConstantEntry(tag, reader.f4()))
        elif tag == CONST_LONG:
            entries.append(ConstantEntry(tag, reader.s8()))
            entries.append(None)
            index += 1
        elif tag == CONST_DOUBLE:
            entries.append(ConstantEntry(tag, reader.f8()))
            entries.append(None)
            index += 1
        elif tag in (CONST_CLASS, CONST_STRING, CONST_METHOD_TYPE):
            entries.append(ConstantEntry(tag, reader.u2()))
        elif tag in (CONST_FIELDREF, CONST_METHODREF, CONST_INTERFACE_METHODREF,
                     CONST_NAME_AND_TYPE, CONST_INVOKE_DYNAMIC):
            entries.append(ConstantEntry(tag, (reader.u2(), reader.u2())))
        elif tag == CONST_METHOD_HANDLE:
            entries.append(ConstantEntry(tag, (reader.u1(), reader.u2())))
        else:
            raise reader.fail(f"unknown constant pool tag {tag}", start)
        index += 1
    pool = ConstantPool(entries, reader.source)
    try:
        pool.validate()
    except MalformedClassFile as exc:
        raise reader.fail(str(exc).split(" at offset")[0]) from exc
    return pool
