"""Command line pipeline: build project bundles, validate them, report.

  apprepo build --config cfg.json [--entry <methodref>]... --out <dir>
  apprepo validate <project-file>
  apprepo report <repo-root> [--csv]

Exit codes: 0 success, 1 validation or pipeline failure, 2 usage or I/O
error. Diagnostics go to stderr; data goes to stdout.
"""

from __future__ import annotations

import argparse
import json
import logging
import shutil
import sys
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from . import callgraph as cg
from .classfile import MethodRef
from .errors import ApprepoError, IoFailure, SchemaViolation
from .guimodel import RIPPER_FORMAT, persist_gui, transform_external
from .metrics import (
    DEFAULT_SOURCE_EXTENSIONS,
    VersionMetrics,
    count_classes,
    count_loc,
    parse_version_csv,
    version_csv,
    version_table,
)
from .project import (
    LAYOUT,
    PROJECT_FILE_NAME,
    Project,
    init_project,
    read_project_file,
    validate_project,
)

log = logging.getLogger(__name__)

METRICS_FILE_NAME = "metrics.csv"


@dataclass
class PipelineConfig:
    """One declarative build-pipeline run."""

    name: str
    version_label: str
    timestamp: date
    partition: cg.ClasspathPartition
    output_project_dir: Path
    sources_dir: Path | None = None
    external_gui_path: Path | None = None
    gui_format: str = RIPPER_FORMAT
    entry_points: list[str] | str = "auto"
    source_extensions: tuple[str, ...] = DEFAULT_SOURCE_EXTENSIONS

    def input_dirs(self) -> list[Path]:
        dirs = list(self.partition.framework + self.partition.library
                    + self.partition.application)
        if self.sources_dir is not None:
            dirs.append(self.sources_dir)
        return dirs


def load_config(path: Path, out_override: Path | None,
                entry_overrides: list[str]) -> PipelineConfig:
    """Read a pipeline config document; command line flags win."""
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    try:
        name = raw["name"]
        version_label = raw.get("version", "unversioned")
        timestamp = date.fromisoformat(raw["timestamp"])
    except KeyError as exc:
        raise IoFailure(f"config {path} missing required key {exc.args[0]!r}") from None
    except ValueError as exc:
        raise IoFailure(f"config {path} has invalid timestamp: {exc}") from None
    base = path.parent

    def rel(raw_path: str) -> Path:
        p = Path(raw_path)
        return p if p.is_absolute() else base / p

    partition = cg.ClasspathPartition.of(
        framework=[rel(p) for p in raw.get("framework", [])],
        library=[rel(p) for p in raw.get("library", [])],
        application=[rel(p) for p in raw.get("application", [])],
    )
    out = out_override if out_override is not None else raw.get("output")
    if out is None:
        raise IoFailure("no output directory: pass --out or set 'output' in the config")
    entries = raw.get("entry_points", "auto")
    if entry_overrides:
        entries = list(entry_overrides)
    return PipelineConfig(
        name=name,
        version_label=version_label,
        timestamp=timestamp,
        partition=partition,
        output_project_dir=Path(out),
        sources_dir=rel(raw["sources"]) if "sources" in raw else None,
        external_gui_path=rel(raw["external_gui"]) if "external_gui" in raw else None,
        gui_format=raw.get("gui_format", RIPPER_FORMAT),
        entry_points=entries,
        source_extensions=tuple(raw.get("source_extensions", DEFAULT_SOURCE_EXTENSIONS)),
    )


class StageFailure(Exception):
    def __init__(self, stage: str, cause: Exception | str):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")


def _check_config(config: PipelineConfig) -> None:
    out = config.output_project_dir.resolve()
    for input_dir in config.input_dirs():
        resolved = input_dir.resolve()
        if out == resolved or out.is_relative_to(resolved) or resolved.is_relative_to(out):
            raise StageFailure("config", f"output dir {out} overlaps input {input_dir}")
        if not input_dir.exists():
            raise StageFailure("inputs", f"input does not exist: {input_dir}")
    if config.external_gui_path is not None and not config.external_gui_path.is_file():
        raise StageFailure("inputs", f"external GUI model not found: {config.external_gui_path}")


def _copy_containers(containers: tuple[Path, ...], dest: Path) -> None:
    dest.mkdir(parents=True, exist_ok=True)
    for container in containers:
        if container.is_dir():
            shutil.copytree(container, dest, dirs_exist_ok=True)
        else:
            shutil.copy2(container, dest / container.name)


def cmd_build(config: PipelineConfig) -> int:
    """Run the full pipeline into a fresh project directory.

    All artifacts are produced in a temporary directory that is renamed
    into place only after the finished project passes validation, so a
    failed build leaves nothing behind.
    """
    _check_config(config)
    out = config.output_project_dir
    tmp = out.parent / (out.name + ".building")
    if tmp.exists():
        shutil.rmtree(tmp)
    try:
        _build_into(config, tmp)
        report = validate_project(read_project_file(tmp / PROJECT_FILE_NAME))
        if not report.ok:
            details = "; ".join(i.detail for i in report.violations)
            raise StageFailure("verify", f"built project fails validation: {details}")
        if out.exists():
            shutil.rmtree(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        tmp.rename(out)
    except BaseException:
        if tmp.exists():
            shutil.rmtree(tmp, ignore_errors=True)
        raise
    log.info("project written to %s", out)
    return 0


def _build_into(config: PipelineConfig, root: Path) -> None:
    try:
        root.mkdir(parents=True)
        _copy_containers(config.partition.application, root / LAYOUT["binaries"])
        has_libraries = bool(config.partition.library)
        if has_libraries:
            _copy_containers(config.partition.library, root / LAYOUT["libraries"])
        if config.sources_dir is not None:
            shutil.copytree(config.sources_dir, root / LAYOUT["sources"])
    except OSError as exc:
        raise StageFailure("copy", exc) from exc

    try:
        hierarchy = cg.build_hierarchy(config.partition)
    except ApprepoError as exc:
        raise StageFailure("hierarchy", exc) from exc
    try:
        if config.entry_points == "auto":
            entries = cg.find_main_entries(hierarchy)
        else:
            entries = {MethodRef.from_text(t) for t in config.entry_points}
        graph = cg.build_callgraph(hierarchy, entries)
    except (ApprepoError, ValueError) as exc:
        raise StageFailure("callgraph", exc) from exc
    callgraph_path = root / LAYOUT["callgraph"]
    callgraph_path.parent.mkdir(parents=True, exist_ok=True)
    callgraph_path.write_bytes(cg.serialize_callgraph(graph))

    model = None
    if config.external_gui_path is not None:
        try:
            external_bytes = config.external_gui_path.read_bytes()
            model = transform_external(external_bytes, config.gui_format)
        except ApprepoError as exc:
            raise StageFailure("gui", exc) from exc
        gui_path = root / LAYOUT["gui"]
        gui_path.parent.mkdir(parents=True, exist_ok=True)
        gui_path.write_bytes(persist_gui(model))
        (root / LAYOUT["external_gui"]).write_bytes(external_bytes)
    else:
        log.warning("no external GUI model provided; project has no GUI artifacts")

    try:
        widgets, windows = model.counts() if model is not None else (0, 0)
        loc = (count_loc(root / LAYOUT["sources"], config.source_extensions)
               if config.sources_dir is not None else 0)
        row = VersionMetrics(
            version_label=config.version_label,
            timestamp=config.timestamp,
            classes=count_classes(root / LAYOUT["binaries"]),
            loc=loc,
            widgets=widgets,
            windows=windows,
        )
    except ApprepoError as exc:
        raise StageFailure("metrics", exc) from exc
    (root / METRICS_FILE_NAME).write_text(version_csv([row]), encoding="utf-8")

    init_project(
        root, config.name, config.version_label, config.timestamp,
        binaries=LAYOUT["binaries"],
        libraries=LAYOUT["libraries"] if has_libraries else None,
        sources=LAYOUT["sources"] if config.sources_dir is not None else None,
        gui=LAYOUT["gui"] if model is not None else None,
        external_gui=LAYOUT["external_gui"] if model is not None else None,
        callgraph=LAYOUT["callgraph"],
    )


def project_metrics(p: Project, extensions=DEFAULT_SOURCE_EXTENSIONS) -> VersionMetrics:
    """The stored per-version metrics of a project, recomputed if absent."""
    stored = p.project_dir / METRICS_FILE_NAME
    if stored.is_file():
        rows = parse_version_csv(stored.read_text(encoding="utf-8"))
        if rows:
            return rows[0]
    from .guimodel import load_gui

    widgets, windows = 0, 0
    if p.gui_model_path is not None and p.gui_model_path.is_file():
        widgets, windows = load_gui(p.gui_model_path.read_bytes()).counts()
    loc = count_loc(p.sources_dir, extensions) if p.sources_dir else 0
    return VersionMetrics(p.version_label, p.timestamp,
                          count_classes(p.binaries_dir), loc, widgets, windows)


def cmd_validate(project_path: Path) -> int:
    """Validate one project; JSON-lines report on stdout, text on stderr."""
    try:
        project = read_project_file(project_path)
    except (IoFailure, SchemaViolation) as exc:
        log.error("unreadable project file: %s", exc)
        return 2
    report = validate_project(project)
    for item in report.items:
        print(json.dumps({"level": item.level, "code": item.code,
                          "detail": item.detail}, sort_keys=True))
        log.log(logging.ERROR if item.level == "violation" else logging.WARNING,
                "%s: %s", item.code, item.detail)
    print(json.dumps({
        "level": "summary",
        "project": project.name,
        "violations": len(report.violations),
        "warnings": len(report.warnings),
        "handlers": report.handler_summary(),
    }, sort_keys=True))
    log.info("%s: %d violation(s), %d warning(s), handlers %s",
             project.name, len(report.violations), len(report.warnings),
             report.handler_summary())
    return 0 if report.ok else 1


def cmd_report(repo_root: Path, as_csv: bool = False) -> int:
    """Version history table over every project directly under a root."""
    if not repo_root.is_dir():
        log.error("not a directory: %s", repo_root)
        return 2
    rows = []
    for child in sorted(repo_root.iterdir()):
        project_file = child / PROJECT_FILE_NAME
        if not child.is_dir() or not project_file.is_file():
            continue
        try:
            project = read_project_file(project_file)
            report = validate_project(project)
            if not report.ok:
                raise SchemaViolation("; ".join(i.detail for i in report.violations))
            rows.append(project_metrics(project))
        except ApprepoError as exc:
            log.warning("skipping %s: %s", child.name, exc)
    rows.sort(key=lambda r: (r.timestamp, r.version_label))
    sys.stdout.write(version_csv(rows) if as_csv else version_table(rows))
    return 0 if rows else 1


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apprepo",
        description="Build, validate and report on application snapshot projects.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="run the artifact pipeline into a project dir")
    p_build.add_argument("--config", required=True, type=Path,
                         help="pipeline configuration file (JSON)")
    p_build.add_argument("--entry", action="append", default=[],
                         metavar="METHODREF",
                         help="entry point override, e.g. 'pkg/Main.main([Ljava/lang/String;)V'")
    p_build.add_argument("--out", type=Path, default=None,
                         help="output project directory (overrides config)")

    p_validate = sub.add_parser("validate", help="validate one project bundle")
    p_validate.add_argument("project_file", type=Path)

    p_report = sub.add_parser("report", help="version history over a repository root")
    p_report.add_argument("repo_root", type=Path)
    p_report.add_argument("--csv", action="store_true", help="emit CSV instead of a table")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(message)s")
    args = build_arg_parser().parse_args(argv)
    try:
        if args.command == "build":
            config = load_config(args.config, args.out, args.entry)
            return cmd_build(config)
        if args.command == "validate":
            return cmd_validate(args.project_file)
        if args.command == "report":
            return cmd_report(args.repo_root, args.csv)
    except StageFailure as exc:
        log.error("build failed at stage '%s': %s", exc.stage, exc.cause)
        print(json.dumps({"stage": exc.stage, "error": type(exc.cause).__name__,
                          "detail": str(exc.cause)}, sort_keys=True), file=sys.stderr)
        return 1
    except IoFailure as exc:
        log.error("%s", exc)
        return 2
    except ApprepoError as exc:
        log.error("%s", exc)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
