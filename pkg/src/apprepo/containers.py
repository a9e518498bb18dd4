"""Class container discovery: directories and zip-format archives.

A "container" is anywhere class files live: a directory tree holding
``.class`` files (possibly with nested jars) or a jar/zip archive with
``.class`` entries.
"""

from __future__ import annotations

import zipfile
from pathlib import Path
from typing import Iterator

from .errors import ContainerUnreadable

ARCHIVE_SUFFIXES = (".jar", ".zip")


def is_archive(path: Path) -> bool:
    return path.suffix.lower() in ARCHIVE_SUFFIXES


def iter_class_entries(container: Path) -> Iterator[tuple[str, bytes]]:
    """Yield (entry name, class file bytes) for every class in a container.

    Directory containers are walked recursively in sorted order; jars found
    inside a directory are descended into. Archive entries come back in
    the archive's stored order.
    """
    if not container.exists():
        raise ContainerUnreadable(f"container does not exist: {container}")
    if container.is_dir():
        for path in sorted(container.rglob("*")):
            if not path.is_file():
                continue
            rel = path.relative_to(container).as_posix()
            if path.suffix == ".class":
                try:
                    yield rel, path.read_bytes()
                except OSError as exc:
                    raise ContainerUnreadable(f"cannot read {path}: {exc}") from exc
            elif is_archive(path):
                yield from _iter_archive(path, prefix=rel + "!")
    elif is_archive(container):
        yield from _iter_archive(container)
    else:
        raise ContainerUnreadable(
            f"not a class container (directory or jar): {container}")


def _iter_archive(path: Path, prefix: str = "") -> Iterator[tuple[str, bytes]]:
    try:
        with zipfile.ZipFile(path) as zf:
            for name in zf.namelist():
                if name.endswith(".class"):
                    yield prefix + name, zf.read(name)
    except (zipfile.BadZipFile, OSError) as exc:
        raise ContainerUnreadable(f"cannot read archive {path}: {exc}") from exc


def container_class_names(container: Path) -> set[str]:
    """Internal names of all classes a container provides."""
    names = set()
    for entry, _ in iter_class_entries(container):
        inner = entry.split("!", 1)[-1]
        names.add(inner[:-len(".class")])
    return names
