"""The assembled fixture corpus: a small application with framework stub.

Covers interfaces, inheritance chains, inner classes, all five invoke
kinds, class initializers, duplicate class names across partition
components, and three runnable entry points used for dynamic traces:

  fix/Main1 - static call chain
  fix/Main2 - virtual and interface dispatch over two hierarchies
  fix/Main3 - class initializers, static fields, invokedynamic
"""

from __future__ import annotations

import zipfile
from pathlib import Path

from classasm import (
    ACC_ABSTRACT,
    ACC_INTERFACE,
    ACC_PRIVATE,
    ACC_PUBLIC,
    ACC_STATIC,
    ACC_SUPER,
    AsmClass,
    AsmMethod,
    assemble_class,
)

OBJECT = "java/lang/Object"
PUB = ACC_PUBLIC
PUBSTAT = ACC_PUBLIC | ACC_STATIC
MAIN_DESC = "([Ljava/lang/String;)V"

BSM_DESC = ("(Ljava/lang/invoke/MethodHandles$Lookup;Ljava/lang/String;"
            "Ljava/lang/invoke/MethodType;)Ljava/lang/invoke/CallSite;")


def _ctor(super_name: str, extra: list[tuple] | None = None) -> AsmMethod:
    code = [("aload_0",), ("invokespecial", super_name, "<init>", "()V")]
    code += extra or []
    code.append(("return",))
    return AsmMethod("<init>", "()V", PUB, code)


def framework_classes() -> list[AsmClass]:
    return [
        AsmClass(
            OBJECT, super_name=None, flags=PUB | ACC_SUPER,
            source_file="Object.java",
            methods=[
                AsmMethod("<init>", "()V", PUB, [("return",)]),
                AsmMethod("toString", "()Ljava/lang/String;", PUB,
                          [("ldc_str", "obj"), ("areturn",)]),
            ]),
    ]


def library_classes() -> list[AsmClass]:
    return [
        AsmClass(
            "fix/LibThing", source_file="LibThing.java",
            methods=[
                _ctor(OBJECT),
                AsmMethod("twice", "(I)I", PUBSTAT,
                          [("iload_0",), ("iconst_2",), ("imul",), ("ireturn",)]),
            ]),
        # also provided by the application partition: shadowing fixture
        AsmClass(
            "fix/Dup", source_file="Dup.java",
            methods=[
                _ctor(OBJECT),
                AsmMethod("tag", "()I", PUBSTAT, [("iconst_1",), ("ireturn",)]),
            ]),
    ]


def application_classes() -> list[AsmClass]:
    shape = AsmClass(
        "fix/Shape", flags=PUB | ACC_INTERFACE | ACC_ABSTRACT,
        source_file="Shape.java",
        methods=[
            AsmMethod("area", "()I", PUB | ACC_ABSTRACT),
            AsmMethod("label", "()Ljava/lang/String;", PUB | ACC_ABSTRACT),
        ])

    circle = AsmClass(
        "fix/Circle", interfaces=("fix/Shape",), source_file="Circle.java",
        fields=(("r", "I", ACC_PRIVATE),),
        methods=[
            AsmMethod("<init>", "(I)V", PUB, [
                ("aload_0",), ("invokespecial", OBJECT, "<init>", "()V"),
                ("aload_0",), ("iload_1",), ("putfield", "fix/Circle", "r", "I"),
                ("return",),
            ], lines=((0, 5), (4, 6), (9, 7))),
            AsmMethod("area", "()I", PUB, [
                ("aload_0",), ("getfield", "fix/Circle", "r", "I"),
                ("aload_0",), ("getfield", "fix/Circle", "r", "I"),
                ("imul",), ("iconst_3",), ("imul",), ("ireturn",),
            ], lines=((0, 10),)),
            AsmMethod("label", "()Ljava/lang/String;", PUB,
                      [("ldc_str", "circle"), ("areturn",)]),
        ])

    square = AsmClass(
        "fix/Square", interfaces=("fix/Shape",), source_file="Square.java",
        fields=(("s", "I", ACC_PRIVATE),),
        methods=[
            AsmMethod("<init>", "(I)V", PUB, [
                ("aload_0",), ("invokespecial", OBJECT, "<init>", "()V"),
                ("aload_0",), ("iload_1",), ("putfield", "fix/Square", "s", "I"),
                ("return",),
            ]),
            AsmMethod("area", "()I", PUB, [
                ("aload_0",), ("getfield", "fix/Square", "s", "I"),
                ("aload_0",), ("getfield", "fix/Square", "s", "I"),
                ("imul",), ("ireturn",),
            ]),
            AsmMethod("label", "()Ljava/lang/String;", PUB,
                      [("ldc_str", "square"), ("areturn",)]),
        ])

    base = AsmClass(
        "fix/Base", source_file="Base.java",
        methods=[
            _ctor(OBJECT),
            AsmMethod("speak", "()Ljava/lang/String;", PUB,
                      [("ldc_str", "base"), ("areturn",)]),
            AsmMethod("greet", "()Ljava/lang/String;", PUB, [
                ("aload_0",),
                ("invokevirtual", "fix/Base", "speak", "()Ljava/lang/String;"),
                ("areturn",),
            ]),
        ])

    mid = AsmClass(
        "fix/Mid", super_name="fix/Base", source_file="Mid.java",
        methods=[
            _ctor("fix/Base"),
            AsmMethod("midOnly", "()V", PUB, [("return",)]),
        ])

    leaf = AsmClass(
        "fix/Leaf", super_name="fix/Mid", source_file="Leaf.java",
        methods=[
            _ctor("fix/Mid"),
            AsmMethod("speak", "()Ljava/lang/String;", PUB,
                      [("ldc_str", "leaf"), ("areturn",)]),
        ])

    util = AsmClass(
        "fix/Util", source_file="Util.java",
        methods=[
            _ctor(OBJECT),
            AsmMethod("a", "()V", PUBSTAT,
                      [("invokestatic", "fix/Util", "b", "()V"), ("return",)],
                      lines=((0, 12), (3, 13))),
            AsmMethod("b", "()V", PUBSTAT, [("return",)]),
            AsmMethod("max", "(II)I", PUBSTAT, [
                ("iload_0",), ("iload_1",), ("if_icmpge", "left"),
                ("iload_1",), ("ireturn",),
                ("label", "left"), ("iload_0",), ("ireturn",),
            ], lines=((0, 20), (3, 21), (5, 22))),
        ])

    counter = AsmClass(
        "fix/Counter", source_file="Counter.java",
        fields=(("n", "I", PUBSTAT),),
        methods=[
            _ctor(OBJECT),
            AsmMethod("<clinit>", "()V", ACC_STATIC, [
                ("invokestatic", "fix/Counter", "seed", "()I"),
                ("putstatic", "fix/Counter", "n", "I"),
                ("return",),
            ]),
            AsmMethod("seed", "()I", PUBSTAT, [("bipush", 7), ("ireturn",)]),
            AsmMethod("get", "()I", PUBSTAT,
                      [("getstatic", "fix/Counter", "n", "I"), ("ireturn",)]),
            AsmMethod("bump", "()V", PUBSTAT, [
                ("getstatic", "fix/Counter", "n", "I"), ("iconst_1",), ("iadd",),
                ("putstatic", "fix/Counter", "n", "I"), ("return",),
            ]),
        ])

    helper = AsmClass(
        "fix/App$Helper", source_file="App.java",
        inner_class=("fix/App$Helper", "fix/App", "Helper"),
        methods=[
            _ctor(OBJECT),
            AsmMethod("help", "()I", PUBSTAT, [("iconst_2",), ("ireturn",)]),
        ])

    app = AsmClass(
        "fix/App", source_file="App.java",
        inner_class=("fix/App$Helper", "fix/App", "Helper"),
        bootstrap_methods=(("fix/App", "bsm", BSM_DESC),),
        extra_attribute="VendorMeta",
        methods=[
            _ctor(OBJECT),
            AsmMethod("main", MAIN_DESC, PUBSTAT, [
                ("invokestatic", "fix/Util", "a", "()V"),
                ("new", "fix/Circle"), ("dup",), ("iconst_2",),
                ("invokespecial", "fix/Circle", "<init>", "(I)V"), ("astore_1",),
                ("aload_1",), ("invokeinterface", "fix/Shape", "area", "()I", 1), ("pop",),
                ("new", "fix/Leaf"), ("dup",),
                ("invokespecial", "fix/Leaf", "<init>", "()V"), ("astore_2",),
                ("aload_2",),
                ("invokevirtual", "fix/Base", "speak", "()Ljava/lang/String;"), ("pop",),
                ("invokedynamic", "run", "()V", 0),
                ("invokestatic", "fix/Counter", "bump", "()V"),
                ("getstatic", "fix/Counter", "n", "I"), ("pop",),
                ("ldc_str", "hello"), ("pop",),
                ("return",),
            ], lines=((0, 30), (3, 31), (10, 32), (19, 33), (28, 34),
                      (33, 35), (39, 36), (43, 37))),
            AsmMethod("bsm", BSM_DESC, PUBSTAT,
                      [("aconst_null",), ("areturn",)]),
            # parse-only coverage: wide constants, switches, arrays, wide locals
            AsmMethod("constants", "()V", PUBSTAT, [
                ("ldc2_long", 1234567890123), ("pop2",),
                ("ldc2_double", 2.5), ("pop2",),
                ("ldc_w_str", "wide string"), ("pop",),
                ("ldc_int", 100000), ("pop",),
                ("ldc_float", 1.5), ("pop",),
                ("ldc_class", "fix/Shape"), ("pop",),
                ("sipush", 999), ("pop",),
                ("return",),
            ]),
            AsmMethod("pick", "(I)I", PUBSTAT, [
                ("iload_0",),
                ("tableswitch", "other", 0, ["zero", "one"]),
                ("label", "zero"), ("iconst_0",), ("ireturn",),
                ("label", "one"), ("iconst_1",), ("ireturn",),
                ("label", "other"),
                ("iload_0",),
                ("lookupswitch", "fail", [(10, "ten"), (99, "many")]),
                ("label", "ten"), ("bipush", 10), ("ireturn",),
                ("label", "many"), ("bipush", 99), ("ireturn",),
                ("label", "fail"), ("iconst_m1",), ("ireturn",),
            ]),
            AsmMethod("arrays", "(I)[I", PUBSTAT, [
                ("iload_0",), ("newarray", "int"), ("astore_1",),
                ("iconst_2",), ("anewarray", "fix/Shape"), ("pop",),
                ("wide_iload", 300), ("pop",),
                ("wide_iinc", 300, -2),
                ("iinc", 1, 5),
                ("aload_1",), ("arraylength",), ("pop",),
                ("aload_1",), ("areturn",),
            ], max_locals=302),
        ])

    main1 = AsmClass(
        "fix/Main1", source_file="Main1.java",
        methods=[
            _ctor(OBJECT),
            AsmMethod("main", MAIN_DESC, PUBSTAT,
                      [("invokestatic", "fix/Util", "a", "()V"), ("return",)]),
        ])

    main2 = AsmClass(
        "fix/Main2", source_file="Main2.java",
        methods=[
            _ctor(OBJECT),
            AsmMethod("main", MAIN_DESC, PUBSTAT, [
                ("new", "fix/Circle"), ("dup",), ("iconst_2",),
                ("invokespecial", "fix/Circle", "<init>", "(I)V"), ("astore_1",),
                ("new", "fix/Square"), ("dup",), ("iconst_3",),
                ("invokespecial", "fix/Square", "<init>", "(I)V"), ("astore_2",),
                ("aload_1",), ("invokeinterface", "fix/Shape", "area", "()I", 1), ("pop",),
                ("aload_2",), ("invokeinterface", "fix/Shape", "area", "()I", 1), ("pop",),
                ("new", "fix/Leaf"), ("dup",),
                ("invokespecial", "fix/Leaf", "<init>", "()V"), ("astore_3",),
                ("aload_3",),
                ("invokevirtual", "fix/Base", "speak", "()Ljava/lang/String;"), ("pop",),
                ("new", "fix/Mid"), ("dup",),
                ("invokespecial", "fix/Mid", "<init>", "()V"),
                ("invokevirtual", "fix/Mid", "speak", "()Ljava/lang/String;"), ("pop",),
                ("aload_3",),
                ("invokevirtual", "fix/Base", "greet", "()Ljava/lang/String;"), ("pop",),
                ("return",),
            ]),
        ])

    main3 = AsmClass(
        "fix/Main3", source_file="Main3.java",
        bootstrap_methods=(("fix/App", "bsm", BSM_DESC),),
        methods=[
            _ctor(OBJECT),
            AsmMethod("main", MAIN_DESC, PUBSTAT, [
                ("invokestatic", "fix/Counter", "bump", "()V"),
                ("getstatic", "fix/Counter", "n", "I"), ("pop",),
                ("invokedynamic", "run", "()V", 0),
                ("invokestatic", "fix/App$Helper", "help", "()I"), ("pop",),
                ("invokestatic", "fix/Dup", "tag", "()I"), ("pop",),
                ("iconst_4",),
                ("invokestatic", "fix/LibThing", "twice", "(I)I"), ("pop",),
                ("return",),
            ]),
        ])

    dup_app = AsmClass(
        "fix/Dup", source_file="Dup.java",
        methods=[
            _ctor(OBJECT),
            AsmMethod("tag", "()I", PUBSTAT, [("iconst_2",), ("ireturn",)]),
        ])

    return [shape, circle, square, base, mid, leaf, util, counter,
            helper, app, main1, main2, main3, dup_app]


def all_classes() -> dict[str, list[AsmClass]]:
    return {
        "framework": framework_classes(),
        "library": library_classes(),
        "application": application_classes(),
    }


def write_corpus(root: Path, library_as_jar: bool = True) -> dict[str, Path]:
    """Assemble the corpus into container paths under ``root``.

    The framework and application partitions are directories; the library
    partition is packaged as a jar to exercise archive containers.
    """
    paths = {}
    groups = all_classes()
    for group in ("framework", "application"):
        directory = root / group
        for spec in groups[group]:
            target = directory / (spec.name + ".class")
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(assemble_class(spec))
        paths[group] = directory
    if library_as_jar:
        jar = root / "library.jar"
        with zipfile.ZipFile(jar, "w") as zf:
            for spec in groups["library"]:
                zf.writestr(spec.name + ".class", assemble_class(spec))
        paths["library"] = jar
    else:
        directory = root / "library"
        for spec in groups["library"]:
            target = directory / (spec.name + ".class")
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(assemble_class(spec))
        paths["library"] = directory
    return paths
