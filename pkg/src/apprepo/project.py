"""Project bundles: one target application at one moment in time.

A project is a directory subtree plus a ``project.xml`` file naming the
application and locating its artifacts (binaries, libraries, sources,
GUI model, call graph, screenshots, startup script). Loading a project
runs the safeguard checks: declared artifacts must exist, the GUI model
must validate (unique ids above all) and the call graph must parse.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .callgraph import CallGraph, ClassHierarchy, hierarchy_from_classes, parse_callgraph
from .classfile import ClassFile, parse_class
from .containers import iter_class_entries
from .errors import (
    AlreadyExists,
    IoFailure,
    MalformedClassFile,
    MissingArtifact,
    SchemaViolation,
)
from .guimodel import GuiModel, link_event_handlers, load_gui
from .metrics import DEFAULT_SOURCE_EXTENSIONS
from .xmlio import XmlWriter

log = logging.getLogger(__name__)

PROJECT_FILE_NAME = "project.xml"

# conventional layout under a project root
LAYOUT = {
    "binaries": "bin",
    "libraries": "lib",
    "sources": "src",
    "gui": "gui/model.xml",
    "external_gui": "gui/ripper.xml",
    "callgraph": "callgraph/callgraph.xml",
    "screenshots": "screenshots",
    "startup": "scripts/start.sh",
}


@dataclass(frozen=True)
class Project:
    """A loaded project file: name, version stamp and resolved artifact paths.

    All paths are resolved against the directory holding the project file;
    artifacts the file does not declare are None.
    """

    name: str
    version_label: str
    timestamp: date
    project_dir: Path
    binaries_dir: Path
    libraries_dir: Path | None = None
    sources_dir: Path | None = None
    gui_model_path: Path | None = None
    external_gui_path: Path | None = None
    callgraph_path: Path | None = None
    screenshots_dir: Path | None = None
    startup_script_path: Path | None = None


@dataclass(frozen=True)
class ClassRepository:
    """The linked code model of one project: classes, sources, call graph."""

    classes: dict[str, ClassFile]
    sources: dict[str, Path]
    callgraph: CallGraph

    def hierarchy(self) -> ClassHierarchy:
        return hierarchy_from_classes(list(self.classes.values()))


@dataclass
class ReportItem:
    level: str  # violation | warning
    code: str
    detail: str


@dataclass
class ProjectReport:
    """Aggregated validation result of one project."""

    items: list[ReportItem] = field(default_factory=list)
    handlers_resolved: int = 0
    handlers_unresolved: int = 0

    @property
    def violations(self) -> list[ReportItem]:
        return [i for i in self.items if i.level == "violation"]

    @property
    def warnings(self) -> list[ReportItem]:
        return [i for i in self.items if i.level == "warning"]

    @property
    def ok(self) -> bool:
        return not self.violations

    def handler_summary(self) -> str:
        return f"{self.handlers_resolved} resolved / {self.handlers_unresolved} unresolved"


def _relative_to_project(root: Path, raw: str) -> Path:
    return (root / raw).resolve() if not Path(raw).is_absolute() else Path(raw)


def init_project(root: Path | str, name: str, version_label: str, timestamp: date,
                 binaries: str = LAYOUT["binaries"],
                 libraries: str | None = None,
                 sources: str | None = None,
                 gui: str | None = None,
                 external_gui: str | None = None,
                 callgraph: str | None = None,
                 screenshots: str | None = None,
                 startup: str | None = None) -> Path:
    """Write a project file and create the declared directory layout.

    Re-initializing with identical arguments is a no-op; a project file
    with different content already in place raises AlreadyExists.
    """
    if not name:
        raise ValueError("project name must be non-empty")
    root = Path(root)
    if libraries is not None and Path(binaries) == Path(libraries):
        raise ValueError("binaries and libraries directories must be disjoint")
    content = _render_project_file(name, version_label, timestamp, binaries, libraries,
                                   sources, gui, external_gui, callgraph,
                                   screenshots, startup)
    target = root / PROJECT_FILE_NAME
    try:
        if target.exists():
            if target.read_bytes() == content:
                return target
            raise AlreadyExists(f"{target} exists with different content")
        root.mkdir(parents=True, exist_ok=True)
        for rel in (binaries, libraries, sources, screenshots):
            if rel is not None:
                (root / rel).mkdir(parents=True, exist_ok=True)
        for rel in (gui, external_gui, callgraph, startup):
            if rel is not None:
                (root / rel).parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(content)
    except OSError as exc:
        raise IoFailure(f"cannot initialize project at {root}: {exc}") from exc
    return target


def _render_project_file(name, version_label, timestamp, binaries, libraries, sources,
                         gui, external_gui, callgraph, screenshots, startup) -> bytes:
    writer = XmlWriter()
    writer.open("project", [("name", name), ("version", version_label),
                            ("timestamp", timestamp.isoformat())])
    writer.leaf("binaries", [("path", binaries)])
    if libraries is not None:
        writer.leaf("libraries", [("path", libraries)])
    if sources is not None:
        writer.leaf("sources", [("path", sources)])
    if gui is not None:
        attrs = [("path", gui)]
        if external_gui is not None:
            attrs.append(("external", external_gui))
        writer.leaf("gui", attrs)
    if callgraph is not None:
        writer.leaf("callgraph", [("path", callgraph)])
    if screenshots is not None:
        writer.leaf("screenshots", [("path", screenshots)])
    if startup is not None:
        writer.leaf("startup", [("path", startup)])
    writer.close()
    return writer.tobytes()


def read_project_file(path: Path | str) -> Project:
    """Decode a project file without checking that artifacts exist."""
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read project file {path}: {exc}") from exc
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise SchemaViolation(f"project file is not well-formed XML: {exc}") from exc
    if root.tag != "project":
        raise SchemaViolation(f"root element must be <project>, got <{root.tag}>")
    for required in ("name", "version", "timestamp"):
        if required not in root.attrib:
            raise SchemaViolation(f"<project> missing required attribute {required!r}")
    if not root.attrib["name"]:
        raise SchemaViolation("project name must be non-empty")
    try:
        timestamp = date.fromisoformat(root.attrib["timestamp"])
    except ValueError as exc:
        raise SchemaViolation(f"invalid project timestamp: {exc}") from exc

    paths: dict[str, str] = {}
    gui_external: str | None = None
    for elem in root:
        if elem.tag not in ("binaries", "libraries", "sources", "gui", "callgraph",
                            "screenshots", "startup"):
            # unknown elements from other producers are ignored on load
            continue
        if "path" not in elem.attrib:
            raise SchemaViolation(f"<{elem.tag}> missing required attribute 'path'")
        paths[elem.tag] = elem.attrib["path"]
        if elem.tag == "gui":
            gui_external = elem.attrib.get("external")
    if "binaries" not in paths:
        raise SchemaViolation("project declares no binaries directory")
    if "libraries" in paths and Path(paths["libraries"]) == Path(paths["binaries"]):
        raise SchemaViolation("binaries and libraries directories must be disjoint")

    project_dir = path.parent.resolve()

    def resolve(tag: str) -> Path | None:
        raw = paths.get(tag)
        return _relative_to_project(project_dir, raw) if raw is not None else None

    return Project(
        name=root.attrib["name"],
        version_label=root.attrib["version"],
        timestamp=timestamp,
        project_dir=project_dir,
        binaries_dir=resolve("binaries"),
        libraries_dir=resolve("libraries"),
        sources_dir=resolve("sources"),
        gui_model_path=resolve("gui"),
        external_gui_path=(_relative_to_project(project_dir, gui_external)
                           if gui_external is not None else None),
        callgraph_path=resolve("callgraph"),
        screenshots_dir=resolve("screenshots"),
        startup_script_path=resolve("startup"),
    )


def validate_project(p: Project) -> ProjectReport:
    """Run every safeguard check, collecting violations and warnings.

    Covers artifact presence, GUI model validation, call graph schema
    validation and the handler-to-code cross check.
    """
    report = ProjectReport()

    def violation(code: str, detail: str) -> None:
        report.items.append(ReportItem("violation", code, detail))

    def warning(code: str, detail: str) -> None:
        report.items.append(ReportItem("warning", code, detail))

    for artifact, path, kind in (
        ("binaries", p.binaries_dir, "dir"),
        ("libraries", p.libraries_dir, "dir"),
        ("sources", p.sources_dir, "dir"),
        ("gui", p.gui_model_path, "file"),
        ("external_gui", p.external_gui_path, "file"),
        ("callgraph", p.callgraph_path, "file"),
    ):
        if path is None:
            continue
        ok = path.is_dir() if kind == "dir" else path.is_file()
        if not ok:
            violation("MissingArtifact", f"{artifact}: {path}")
    for artifact, path in (("screenshots", p.screenshots_dir),
                           ("startup", p.startup_script_path)):
        if path is not None and not path.exists():
            warning("MissingOptionalArtifact", f"{artifact}: {path}")

    gui_model: GuiModel | None = None
    if p.gui_model_path is not None and p.gui_model_path.is_file():
        try:
            gui_model = load_gui(p.gui_model_path.read_bytes())
        except SchemaViolation as exc:
            if exc.violations:
                for v in exc.violations:
                    violation(v.code, v.message)
            else:
                violation("GuiSchema", str(exc))

    if gui_model is not None:
        # screenshots live outside version control; absent files warn only
        base = p.screenshots_dir if p.screenshots_dir is not None else p.project_dir
        for element, _, _ in gui_model.walk():
            if element.screenshot is not None and not (base / element.screenshot).is_file():
                warning("MissingScreenshot",
                        f"element {element.id!r}: {element.screenshot}")

    if p.callgraph_path is not None and p.callgraph_path.is_file():
        try:
            parse_callgraph(p.callgraph_path.read_bytes())
        except SchemaViolation as exc:
            violation("CallgraphSchema", str(exc))

    if gui_model is not None and p.binaries_dir is not None and p.binaries_dir.is_dir():
        try:
            repo = build_code_model(p)
        except (MalformedClassFile, SchemaViolation) as exc:
            violation("CodeModel", str(exc))
        else:
            bindings = link_event_handlers(gui_model, repo.hierarchy())
            report.handlers_resolved = sum(1 for b in bindings if b.status == "resolved")
            report.handlers_unresolved = sum(1 for b in bindings if b.status == "unresolved")
    return report


def load_project(path: Path | str) -> Project:
    """Load a project with all safeguard checks; raises on any violation."""
    project = read_project_file(path)
    report = validate_project(project)
    for item in report.warnings:
        log.warning("%s: %s", item.code, item.detail)
    if not report.ok:
        missing = [i for i in report.violations if i.code == "MissingArtifact"]
        if missing:
            artifact = missing[0].detail.split(":", 1)[0]
            raise MissingArtifact(artifact, missing[0].detail.split(": ", 1)[1])
        gui_items = [i for i in report.violations
                     if i.code not in ("CallgraphSchema", "CodeModel")]
        summary = "; ".join(i.detail for i in report.violations)
        raise SchemaViolation(f"project failed validation: {summary}",
                              gui_items or None)
    return project


def build_code_model(p: Project,
                     source_extensions: tuple[str, ...] = DEFAULT_SOURCE_EXTENSIONS,
                     ) -> ClassRepository:
    """Parse the project's classes and link them with sources and call graph.

    Source pairing matches the class file's recorded source file name (or
    the top-level class name plus a recognized extension) under the package
    path in the sources directory.
    """
    classes: dict[str, ClassFile] = {}
    containers = [p.binaries_dir] + ([p.libraries_dir] if p.libraries_dir else [])
    for container in containers:
        if container is None or not container.exists():
            continue
        for entry, data in iter_class_entries(container):
            cf = parse_class(data, source=f"{container}!{entry}")
            classes.setdefault(cf.class_name, cf)

    sources: dict[str, Path] = {}
    if p.sources_dir is not None and p.sources_dir.is_dir():
        for name, cf in classes.items():
            found = _find_source(p.sources_dir, name, cf.source_file, source_extensions)
            if found is not None:
                sources[name] = found

    graph = CallGraph.of(set())
    if p.callgraph_path is not None and p.callgraph_path.is_file():
        graph = parse_callgraph(p.callgraph_path.read_bytes())
    return ClassRepository(classes, sources, graph)


def _find_source(sources_dir: Path, class_name: str, source_file: str | None,
                 extensions: tuple[str, ...] = DEFAULT_SOURCE_EXTENSIONS) -> Path | None:
    package, _, simple = class_name.rpartition("/")
    package_dir = sources_dir / package if package else sources_dir
    if source_file is not None:
        candidate = package_dir / source_file
        if candidate.is_file():
            return candidate
    top_level = simple.split("$", 1)[0]
    for ext in extensions:
        candidate = package_dir / f"{top_level}{ext}"
        if candidate.is_file():
            return candidate
    return None
