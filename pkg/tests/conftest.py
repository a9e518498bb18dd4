from dataclasses import dataclass
from pathlib import Path

import pytest

from apprepo.callgraph import ClassHierarchy, ClasspathPartition, build_hierarchy

from classasm import AsmClass
from fixtures import all_classes, write_corpus


@dataclass
class Corpus:
    root: Path
    paths: dict[str, Path]
    groups: dict[str, list[AsmClass]]
    partition: ClasspathPartition

    def spec(self, class_name: str) -> AsmClass:
        """Ground-truth description of one corpus class (shadowing applied)."""
        for group in ("application", "library", "framework"):
            for spec in self.groups[group]:
                if spec.name == class_name:
                    return spec
        raise KeyError(class_name)

    def all_specs(self) -> list[AsmClass]:
        seen = set()
        out = []
        for group in ("application", "library", "framework"):
            for spec in self.groups[group]:
                if spec.name not in seen:
                    seen.add(spec.name)
                    out.append(spec)
        return out


@pytest.fixture(scope="session")
def corpus(tmp_path_factory) -> Corpus:
    root = tmp_path_factory.mktemp("corpus")
    paths = write_corpus(root)
    partition = ClasspathPartition.of(
        framework=[paths["framework"]],
        library=[paths["library"]],
        application=[paths["application"]],
    )
    return Corpus(root, paths, all_classes(), partition)


@pytest.fixture(scope="session")
def hierarchy(corpus) -> ClassHierarchy:
    return build_hierarchy(corpus.partition)
