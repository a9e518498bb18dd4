"""Static call graphs over a partitioned class path.

Call targets are resolved with Class Hierarchy Analysis: a virtual or
interface call may dispatch to the resolved declaration or to any
override in a transitive subtype of the declared class. The resulting
edge set over-approximates every dynamic call graph of the program
(invokedynamic sites excepted, which contribute no edges).
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from .classfile import (
    ClassFile,
    MethodRef,
    CallSite,
    extract_call_sites,
    parse_class,
)
from .classfile.constant_pool import CONST_CLASS
from .containers import container_class_names, iter_class_entries
from .errors import EntryPointMissing, SchemaViolation, TargetClassMissing
from .xmlio import XmlWriter

ALGORITHM = "CHA"
CLINIT_NAME = "<clinit>"
CLINIT_DESCRIPTOR = "()V"


@dataclass(frozen=True)
class ClasspathPartition:
    """The framework / library / application split of the class path.

    The three container lists must be disjoint as paths; the classes they
    provide may still overlap by name.
    """

    framework: tuple[Path, ...] = ()
    library: tuple[Path, ...] = ()
    application: tuple[Path, ...] = ()

    def __post_init__(self):
        seen: dict = {}
        for component, containers in (("framework", self.framework),
                                       ("library", self.library),
                                       ("application", self.application)):
            for path in containers:
                if path in seen and seen[path] != component:
                    raise ValueError(
                        f"container {path} listed in both {seen[path]} and {component}")
                seen[path] = component

    @staticmethod
    def of(framework=(), library=(), application=()) -> "ClasspathPartition":
        return ClasspathPartition(
            tuple(Path(p) for p in framework),
            tuple(Path(p) for p in library),
            tuple(Path(p) for p in application),
        )


def classify_origin(class_name: str, partition: ClasspathPartition) -> tuple[bool, bool, bool]:
    """Which partition components provide a class of this name.

    The three flags are not mutually exclusive; all-false means the name
    is external to the partition.
    """
    def provided(containers: tuple[Path, ...]) -> bool:
        return any(class_name in container_class_names(c) for c in containers)

    return (provided(partition.framework),
            provided(partition.library),
            provided(partition.application))


@dataclass
class ClassHierarchy:
    """All parsed classes plus the inverted subtype relation.

    ``externals`` holds every class name referenced by parsed classes
    (supertypes, interfaces or constant pool class entries) that no
    container provided; call resolution treats those as known-but-opaque.
    """

    classes: dict[str, ClassFile]
    subtypes: dict[str, set[str]]
    duplicates: dict[str, list[str]]
    externals: set[str]
    origins: dict[str, tuple[bool, bool, bool]] = field(default_factory=dict)

    def transitive_subtypes(self, class_name: str) -> set[str]:
        seen: set[str] = set()
        work = list(self.subtypes.get(class_name, ()))
        while work:
            name = work.pop()
            if name in seen:
                continue
            seen.add(name)
            work.extend(self.subtypes.get(name, ()))
        return seen

    def lookup(self, class_name: str, name: str, descriptor: str) -> MethodRef | None:
        """Nearest declaration of (name, descriptor) at or above a class.

        Walks the superclass chain first, then the transitive super-interface
        set. Returns None when no parsed class declares the method.
        """
        current = class_name
        interfaces: list[str] = []
        while current is not None and current in self.classes:
            cf = self.classes[current]
            if cf.find_method(name, descriptor) is not None:
                return MethodRef(current, name, descriptor)
            interfaces.extend(cf.interfaces)
            current = cf.super_name
        seen: set[str] = set()
        while interfaces:
            iface = interfaces.pop(0)
            if iface in seen or iface not in self.classes:
                continue
            seen.add(iface)
            cf = self.classes[iface]
            if cf.find_method(name, descriptor) is not None:
                return MethodRef(iface, name, descriptor)
            interfaces.extend(cf.interfaces)
        return None

    def knows(self, class_name: str) -> bool:
        return class_name in self.classes or class_name in self.externals


def _referenced_class_names(cf: ClassFile) -> set[str]:
    names = set()
    if cf.super_name:
        names.add(cf.super_name)
    names.update(cf.interfaces)
    for entry in cf.constant_pool.entries:
        if entry is not None and entry.tag == CONST_CLASS:
            names.add(cf.constant_pool.utf8(entry.value))
    return names


def hierarchy_from_classes(classes: list[ClassFile],
                           origins: dict[str, tuple[bool, bool, bool]] | None = None,
                           ) -> ClassHierarchy:
    """Assemble a hierarchy from already parsed classes (first name wins)."""
    by_name: dict[str, ClassFile] = {}
    for cf in classes:
        by_name.setdefault(cf.class_name, cf)
    subtypes: dict[str, set[str]] = {}
    referenced: set[str] = set()
    for cf in by_name.values():
        referenced.update(_referenced_class_names(cf))
        for parent in ([cf.super_name] if cf.super_name else []) + list(cf.interfaces):
            subtypes.setdefault(parent, set()).add(cf.class_name)
    externals = referenced - set(by_name)
    if origins is None:
        origins = {name: (False, False, True) for name in by_name}
    return ClassHierarchy(by_name, subtypes, {}, externals, origins)


def build_hierarchy(partition: ClasspathPartition) -> ClassHierarchy:
    """Parse every container of the partition into a class hierarchy.

    Application containers shadow library containers, which shadow
    framework containers: the first occurrence of a class name wins for
    parsing, while ``duplicates`` records every provider of a name seen
    more than once.
    """
    ordered = ([(p, "application") for p in partition.application]
               + [(p, "library") for p in partition.library]
               + [(p, "framework") for p in partition.framework])
    by_name: dict[str, ClassFile] = {}
    providers: dict[str, list[str]] = {}
    for container, _ in ordered:
        for entry, data in iter_class_entries(container):
            cf = parse_class(data, source=f"{container}!{entry}")
            provider_list = providers.setdefault(cf.class_name, [])
            if str(container) not in provider_list:
                provider_list.append(str(container))
            by_name.setdefault(cf.class_name, cf)

    hierarchy = hierarchy_from_classes(list(by_name.values()))
    hierarchy.duplicates = {n: ps for n, ps in providers.items() if len(ps) > 1}

    name_sets = {
        "framework": set().union(*[container_class_names(c) for c in partition.framework], set()),
        "library": set().union(*[container_class_names(c) for c in partition.library], set()),
        "application": set().union(*[container_class_names(c) for c in partition.application], set()),
    }
    hierarchy.origins = {
        name: (name in name_sets["framework"],
               name in name_sets["library"],
               name in name_sets["application"])
        for name in by_name
    }
    return hierarchy


def resolve_targets(site: CallSite, h: ClassHierarchy) -> set[MethodRef]:
    """Possible callees of one call site under Class Hierarchy Analysis.

    static/special sites resolve to the single declared-or-inherited
    implementation; virtual/interface sites additionally fan out to every
    override in transitive subtypes of the declared class; dynamic sites
    resolve to nothing.
    """
    if site.kind == "dynamic":
        return set()
    declared = site.declared_target
    if not h.knows(declared.in_class):
        raise TargetClassMissing(
            f"class {declared.in_class} of call target {declared.text} is not on"
            " the partition and is not a known external")
    base = h.lookup(declared.in_class, declared.name, declared.descriptor)
    targets = {base if base is not None else declared}
    if site.kind in ("virtual", "interface"):
        for sub in h.transitive_subtypes(declared.in_class):
            if sub not in h.classes:
                continue
            found = h.lookup(sub, declared.name, declared.descriptor)
            if found is not None:
                targets.add(found)
    return targets


@dataclass(frozen=True)
class MethodNode:
    """A call graph vertex: a method plus its class path origin flags."""

    ref: MethodRef
    in_framework: bool = False
    in_library: bool = False
    in_application: bool = False
    reachable: bool = True

    @property
    def unresolved(self) -> bool:
        """True for externals: no partition component provides the class."""
        return not (self.in_framework or self.in_library or self.in_application)


@dataclass(frozen=True)
class CallGraph:
    """Immutable call graph: method nodes, caller->callee edges, entries."""

    nodes: frozenset[MethodNode]
    edges: frozenset[tuple[MethodRef, MethodRef]]
    entry_points: frozenset[MethodRef]

    def __post_init__(self):
        refs = {n.ref for n in self.nodes}
        for caller, callee in self.edges:
            if caller not in refs or callee not in refs:
                raise ValueError(f"edge endpoint not among nodes: {caller.text} -> {callee.text}")
        for entry in self.entry_points:
            if entry not in refs:
                raise ValueError(f"entry point not among nodes: {entry.text}")

    @staticmethod
    def of(nodes, edges=(), entry_points=()) -> "CallGraph":
        return CallGraph(frozenset(nodes), frozenset(edges), frozenset(entry_points))

    def node_for(self, ref: MethodRef) -> MethodNode | None:
        for node in self.nodes:
            if node.ref == ref:
                return node
        return None


def _resolve_entry(entry: MethodRef, h: ClassHierarchy) -> MethodRef:
    if entry.in_class not in h.classes:
        raise EntryPointMissing(f"entry point class not on partition: {entry.text}")
    resolved = h.lookup(entry.in_class, entry.name, entry.descriptor)
    if resolved is None:
        raise EntryPointMissing(f"entry point method not found: {entry.text}")
    return resolved


def _method_body(ref: MethodRef, h: ClassHierarchy):
    cf = h.classes.get(ref.in_class)
    if cf is None:
        return None
    method = cf.find_method(ref.name, ref.descriptor)
    if method is None or not method.has_body:
        return None
    return method


def build_callgraph(h: ClassHierarchy, entries: set[MethodRef]) -> CallGraph:
    """Reachability closure from the entry points under CHA resolution.

    Class initializers of every class touched by the closure (instantiated,
    statically accessed or owning a reachable method) become additional
    entry points, superclass initializers included.
    """
    entry_refs = {_resolve_entry(e, h) for e in entries}
    visited: set[MethodRef] = set()
    nodes: set[MethodRef] = set()
    edges: set[tuple[MethodRef, MethodRef]] = set()
    initialized: set[str] = set()
    work: list[MethodRef] = sorted(entry_refs, key=lambda r: r.text)
    nodes.update(entry_refs)

    def visit(ref: MethodRef) -> None:
        if ref in visited:
            return
        visited.add(ref)
        nodes.add(ref)
        method = _method_body(ref, h)
        if method is None:
            return
        initialized.add(ref.in_class)
        for ins in method.instructions:
            if ins.mnemonic == "new" and ins.type_name:
                initialized.add(ins.type_name)
            elif ins.mnemonic in ("getstatic", "putstatic") and ins.member:
                initialized.add(ins.member[0])
        for site in extract_call_sites(h.classes[ref.in_class]):
            if site.caller != ref:
                continue
            if site.kind == "static":
                initialized.add(site.declared_target.in_class)
            for target in resolve_targets(site, h):
                edges.add((ref, target))
                nodes.add(target)
                if target not in visited:
                    work.append(target)

    while work or _pending_clinits(initialized, h, visited, entry_refs):
        while work:
            visit(work.pop(0))
        for clinit in _pending_clinits(initialized, h, visited, entry_refs):
            entry_refs.add(clinit)
            nodes.add(clinit)
            work.append(clinit)

    node_set = {
        MethodNode(ref, *h.origins.get(ref.in_class, (False, False, False)), reachable=True)
        for ref in nodes
    }
    return CallGraph(frozenset(node_set), frozenset(edges), frozenset(entry_refs))


def _pending_clinits(initialized: set[str], h: ClassHierarchy,
                     visited: set[MethodRef], entries: set[MethodRef]) -> list[MethodRef]:
    """Initializers triggered by the closure but not yet explored.

    Initializing a class initializes its parsed superclass chain too.
    """
    triggered: set[str] = set()
    for name in initialized:
        current = name
        while current is not None and current in h.classes:
            if current in triggered:
                break
            triggered.add(current)
            current = h.classes[current].super_name
    pending = []
    for name in sorted(triggered):
        cf = h.classes.get(name)
        if cf is None or cf.find_method(CLINIT_NAME, CLINIT_DESCRIPTOR) is None:
            continue
        ref = MethodRef(name, CLINIT_NAME, CLINIT_DESCRIPTOR)
        if ref not in visited and ref not in entries:
            pending.append(ref)
    return pending


def _bool_text(value: bool) -> str:
    return "true" if value else "false"


def serialize_callgraph(g: CallGraph) -> bytes:
    """Render a call graph as deterministic UTF-8 XML bytes.

    Methods are sorted by id, ``calls`` children by target; flags use the
    fixed attribute names inClass / inFramework / inLibrary / inApplication.
    """
    by_caller: dict[str, list[str]] = {}
    for caller, callee in g.edges:
        by_caller.setdefault(caller.text, []).append(callee.text)
    writer = XmlWriter()
    nodes = sorted(g.nodes, key=lambda n: n.ref.text)
    entry_texts = {e.text for e in g.entry_points}
    writer.element("callgraph", [("algorithm", ALGORITHM)], has_children=bool(nodes))
    for node in nodes:
        attrs = [
            ("id", node.ref.text),
            ("inClass", node.ref.in_class),
            ("inFramework", _bool_text(node.in_framework)),
            ("inLibrary", _bool_text(node.in_library)),
            ("inApplication", _bool_text(node.in_application)),
            ("reachable", _bool_text(node.reachable)),
        ]
        if node.ref.text in entry_texts:
            attrs.append(("entry", "true"))
        calls = sorted(by_caller.get(node.ref.text, []))
        writer.element("method", attrs, has_children=bool(calls))
        for target in calls:
            writer.leaf("calls", [("target", target)])
        if calls:
            writer.close()
    if nodes:
        writer.close()
    return writer.tobytes()


def _parse_bool(value: str, what: str) -> bool:
    if value == "true":
        return True
    if value == "false":
        return False
    raise SchemaViolation(f"{what} must be 'true' or 'false', got {value!r}")


def parse_callgraph(doc: bytes | str) -> CallGraph:
    """Parse and validate a persisted call graph document."""
    try:
        root = ET.fromstring(doc)
    except ET.ParseError as exc:
        raise SchemaViolation(f"not well-formed XML: {exc}") from exc
    if root.tag != "callgraph":
        raise SchemaViolation(f"root element must be <callgraph>, got <{root.tag}>")
    nodes: list[MethodNode] = []
    entry_points: set[MethodRef] = set()
    edges: set[tuple[MethodRef, MethodRef]] = set()
    pending_calls: list[tuple[MethodRef, str]] = []
    seen_ids: set[str] = set()
    for elem in root:
        if elem.tag != "method":
            raise SchemaViolation(f"unexpected element <{elem.tag}> under <callgraph>")
        attrs = elem.attrib
        for required in ("id", "inClass", "inFramework", "inLibrary",
                         "inApplication", "reachable"):
            if required not in attrs:
                raise SchemaViolation(f"<method> missing required attribute {required!r}")
        method_id = attrs["id"]
        if method_id in seen_ids:
            raise SchemaViolation(f"duplicate method id {method_id!r}")
        seen_ids.add(method_id)
        try:
            ref = MethodRef.from_text(method_id)
        except ValueError as exc:
            raise SchemaViolation(str(exc)) from exc
        if attrs["inClass"] != ref.in_class:
            raise SchemaViolation(
                f"inClass {attrs['inClass']!r} disagrees with id {method_id!r}")
        node = MethodNode(
            ref,
            _parse_bool(attrs["inFramework"], "inFramework"),
            _parse_bool(attrs["inLibrary"], "inLibrary"),
            _parse_bool(attrs["inApplication"], "inApplication"),
            _parse_bool(attrs["reachable"], "reachable"),
        )
        nodes.append(node)
        if attrs.get("entry") == "true":
            entry_points.add(ref)
        for child in elem:
            if child.tag != "calls":
                raise SchemaViolation(f"unexpected element <{child.tag}> under <method>")
            target = child.attrib.get("target")
            if target is None:
                raise SchemaViolation("<calls> missing required attribute 'target'")
            pending_calls.append((ref, target))
    for caller, target in pending_calls:
        if target not in seen_ids:
            raise SchemaViolation(f"dangling call target {target!r}")
        edges.add((caller, MethodRef.from_text(target)))
    return CallGraph(frozenset(nodes), frozenset(edges), frozenset(entry_points))


def find_main_entries(h: ClassHierarchy) -> set[MethodRef]:
    """All application-partition main methods, the default entry points."""
    from .classfile import MAIN_DESCRIPTOR, MAIN_NAME

    entries = set()
    for name, cf in h.classes.items():
        flags = h.origins.get(name, (False, False, False))
        if not flags[2]:
            continue
        if cf.find_method(MAIN_NAME, MAIN_DESCRIPTOR) is not None:
            entries.add(MethodRef(name, MAIN_NAME, MAIN_DESCRIPTOR))
    return entries
