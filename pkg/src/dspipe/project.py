"""Whole-repository analysis: per-file pipelines, entry points, artifacts,
coupling, and a heuristic project-level pipeline.
"""

from __future__ import annotations

import ast
import enum
import logging
import re
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .dictionary import ApiDictionary, seed_dictionary
from .frontend import AstMetrics, CallEvent, SourceError, ast_metrics, extract_calls, load_source, parse_cells
from .pipeline import Level, Pipeline, StageOccurrence, build_low_level
from .taxonomy import Stage

logger = logging.getLogger(__name__)

SOURCE_SUFFIXES = (".py", ".ipynb")
SHELL_SUFFIXES = (".sh", ".bash")
CHECKPOINT_SUFFIXES = (".ckpt", ".h5", ".pb", ".onnx")
SKIP_DIRS = {".git", ".hg", ".svn", "__pycache__", ".ipynb_checkpoints", ".venv", "venv", "node_modules"}
LOOSE_COUPLING_MIN_CONTRIBUTORS = 6

# Resolved call names that parse command-line arguments.
CLI_PARSER_APIS = (
    "argparse.ArgumentParser",
    "optparse.OptionParser",
    "getopt.getopt",
    "docopt.docopt",
    "fire.Fire",
    "click.command",
    "click.group",
    "typer.Typer",
    "absl.app.run",
    "absl.flags",
    "tensorflow.app.run",
    "tensorflow.flags",
    "tensorflow.app.flags",
    "tensorflow.compat.v1.app.run",
    "tensorflow.compat.v1.flags",
)

# Filename keyword -> role stage, checked in order.
FILENAME_ROLES: tuple[tuple[Stage, tuple[str, ...]], ...] = (
    (Stage.ACQ, ("download", "fetch")),
    (Stage.PRP, ("preprocess", "prepro", "prep", "clean")),
    (Stage.TRN, ("train",)),
    (Stage.EVL, ("eval", "test", "validate")),
    (Stage.PRD, ("predict", "infer", "demo")),
    (Stage.MDL, ("model", "network")),
    (Stage.ACQ, ("data", "dataset", "loader")),
)


class ProjectError(ValueError):
    pass


class ArtifactKind(enum.Enum):
    CHECKPOINT = "checkpoint"
    JSON_MODEL = "json-model"
    SAVED_SOURCE = "saved-source"


class Coupling(enum.Enum):
    LOOSE = "loose"
    TIGHT = "tight"
    UNKNOWN = "unknown"


@dataclass
class FileAnalysis:
    path: str  # relative to the project root, posix separators
    metrics: AstMetrics
    pipeline: Pipeline
    main_guard: bool = False
    parses_cli: bool = False
    loads_artifact: bool = False

    def to_json(self) -> dict:
        return {
            "path": self.path,
            "ast": self.metrics.to_json(),
            "pipeline": [occ.stage.code for occ in self.pipeline.sequence],
        }


@dataclass
class ProjectModel:
    root: str
    files: list[FileAnalysis]
    modules: dict[str, list[str]]
    entry_points: list[str]
    artifacts: list[tuple[str, ArtifactKind]]
    contributors: int | None
    coupling: Coupling
    coupling_detail: str
    high_level: Pipeline
    development_phase: bool = False
    post_development_phase: bool = False
    diagnostics: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "files": [f.to_json() for f in self.files],
            "modules": self.modules,
            "entry_points": self.entry_points,
            "artifacts": [{"path": p, "kind": k.value} for p, k in self.artifacts],
            "contributors": self.contributors,
            "coupling": self.coupling.value,
            "coupling_detail": self.coupling_detail,
            "phases": {
                "development": self.development_phase,
                "post_development": self.post_development_phase,
            },
            "high_level": {
                "heuristic": True,
                "sequence": [occ.stage.code for occ in self.high_level.sequence],
                "pipeline": self.high_level.to_json(),
            },
        }


# ---------------------------------------------------------------------------
# per-file facts
# ---------------------------------------------------------------------------


def _is_main_guard(node: ast.AST) -> bool:
    if not isinstance(node, ast.If) or not isinstance(node.test, ast.Compare):
        return False
    test = node.test
    if len(test.ops) != 1 or not isinstance(test.ops[0], ast.Eq):
        return False
    sides = [test.left, test.comparators[0]]
    has_name = any(isinstance(s, ast.Name) and s.id == "__name__" for s in sides)
    has_main = any(isinstance(s, ast.Constant) and s.value == "__main__" for s in sides)
    return has_name and has_main


def _calls_cli_parser(events: Sequence[CallEvent]) -> bool:
    for e in events:
        for api in CLI_PARSER_APIS:
            if e.resolved_name == api or e.resolved_name.startswith(api + "."):
                return True
    return False


def analyze_file(
    path: Path, root: Path, dictionary: ApiDictionary
) -> tuple[FileAnalysis, list[str]]:
    rel = path.relative_to(root).as_posix()
    unit = load_source(path)
    diags = []
    parsed = parse_cells(unit, diags)
    events = extract_calls(unit, parsed=parsed)
    pipeline = build_low_level(events, dictionary, rel)
    loads = any(
        (entry := dictionary.match_entry(e)) is not None and entry.note.startswith("artifact-load")
        for e in events
    )
    guard = any(_is_main_guard(node) for _, tree in parsed for node in tree.body)
    fa = FileAnalysis(
        path=rel,
        metrics=ast_metrics(unit, parsed=parsed),
        pipeline=pipeline,
        main_guard=guard,
        parses_cli=_calls_cli_parser(events),
        loads_artifact=loads,
    )
    return fa, [str(d) for d in diags]


def iter_files(root: Path) -> list[Path]:
    out = []
    for p in sorted(root.rglob("*")):
        rel_parts = p.relative_to(root).parts
        if any(part in SKIP_DIRS or part.startswith(".") for part in rel_parts[:-1]):
            continue
        if p.is_file():
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# project-level heuristics
# ---------------------------------------------------------------------------


def detect_entry_points(files: Sequence[FileAnalysis], shell_scripts: dict[str, str] | None = None) -> list[str]:
    """Files run directly: main guard, CLI parsing, or named by a shell script."""
    shell_text = "\n".join((shell_scripts or {}).values())
    entries = []
    for f in files:
        name = Path(f.path).name
        in_shell = bool(shell_text) and re.search(
            r"(?<![\w.-])" + re.escape(name) + r"(?![\w-])", shell_text
        )
        if f.main_guard or f.parses_cli or in_shell:
            entries.append(f.path)
    return entries


def detect_artifacts(
    paths: Sequence[str], files: Sequence[FileAnalysis] = ()
) -> list[tuple[str, ArtifactKind]]:
    found: dict[str, ArtifactKind] = {}
    for p in paths:
        name = Path(p).name.lower()
        if _has_checkpoint_suffix(name):
            found[p] = ArtifactKind.CHECKPOINT
        elif name.endswith(".json") and "model" in name:
            found[p] = ArtifactKind.JSON_MODEL
    for f in files:
        stages = set(f.pipeline.stages)
        if Stage.MDL in stages and not stages & {Stage.TRN, Stage.PRD}:
            found.setdefault(f.path, ArtifactKind.SAVED_SOURCE)
    return sorted(found.items())


def _has_checkpoint_suffix(name: str) -> bool:
    # TensorFlow writes model.ckpt-1000.index, model.ckpt.meta, ...
    if name.endswith(CHECKPOINT_SUFFIXES):
        return True
    return re.search(r"\.ckpt([-.]|$)", name) is not None


def classify_coupling(contributors: int | None, entry_points: int = 0) -> tuple[Coupling, str]:
    if contributors is None:
        return Coupling.UNKNOWN, "contributor count not supplied"
    if contributors < 1:
        raise ProjectError(f"contributors must be at least 1, got {contributors}")
    coupling = Coupling.LOOSE if contributors >= LOOSE_COUPLING_MIN_CONTRIBUTORS else Coupling.TIGHT
    detail = f"{contributors} contributor(s), {entry_points} entry point(s)"
    if coupling is Coupling.TIGHT and entry_points <= 2:
        detail += "; few entry points corroborate tight coupling"
    elif coupling is Coupling.LOOSE and entry_points > 2:
        detail += "; multiple entry points corroborate loose coupling"
    elif entry_points:
        detail += "; entry-point count does not corroborate"
    return coupling, detail


def filename_role(path: str) -> Stage | None:
    tokens = [t for t in re.split(r"[^a-z0-9]+|(?<=[a-z])(?=[0-9])", Path(path).stem.lower()) if t]
    for stage, keywords in FILENAME_ROLES:
        if any(t in keywords or t.startswith(keywords) for t in tokens):
            return stage
    return None


def dominant_stage(p: Pipeline) -> Stage | None:
    calls: Counter = Counter()
    for occ in p.sequence:
        if occ.stage.is_ordered:
            calls[occ.stage] += occ.calls
    if not calls:
        return None
    return min(calls, key=lambda s: (-calls[s], s.ordinal))


def order_high_level(
    files: Sequence[FileAnalysis], entry_points: Sequence[str] = (), source: str = ""
) -> Pipeline:
    """Project pipeline from file roles, ordered along the stage chain.

    A file's role is its filename keyword stage, else its dominant stage.
    Entry points integrate other modules, so every stage they exercise is
    added to their role.
    """
    analyzed = [f for f in files if f.pipeline.sequence or filename_role(f.path)]
    if len(analyzed) == 1:
        only = analyzed[0].pipeline
        if only.sequence:
            return Pipeline(source, Level.HIGH, only.sequence, dict(only.dropped))

    entries = set(entry_points)
    contributors: dict[Stage, list[int]] = {}
    for idx, f in enumerate(sorted(files, key=lambda f: f.path)):
        roles = set()
        keyword = filename_role(f.path)
        if keyword is not None:
            roles.add(keyword)
        else:
            dom = dominant_stage(f.pipeline)
            if dom is not None:
                roles.add(dom)
        if f.path in entries:
            roles.update(s for s in f.pipeline.stages if s.is_ordered)
        for stage in roles:
            contributors.setdefault(stage, []).append(idx)
    sequence = []
    for stage in sorted(contributors, key=lambda s: s.ordinal):
        idxs = contributors[stage]
        sequence.append(StageOccurrence(stage, 1, (min(idxs), max(idxs)), len(idxs)))
    return Pipeline(source, Level.HIGH, tuple(sequence))


def analyze_project(
    root: str | Path, contributors: int | None = None, dictionary: ApiDictionary | None = None,
    *, analyses: Sequence[FileAnalysis] | None = None,
) -> ProjectModel:
    root = Path(root)
    if not root.is_dir():
        raise ProjectError(f"not a directory: {root}")
    dictionary = dictionary or seed_dictionary()
    all_paths = iter_files(root)
    sources = [p for p in all_paths if p.suffix in SOURCE_SUFFIXES]
    if not sources:
        raise ProjectError(f"no source files (.py/.ipynb) under {root}")

    diagnostics: list[str] = []
    if analyses is None:
        files = []
        for p in sources:
            try:
                fa, diags = analyze_file(p, root, dictionary)
            except (SourceError, UnicodeDecodeError) as exc:
                diagnostics.append(f"{p.relative_to(root).as_posix()}: skipped: {exc}")
                continue
            files.append(fa)
            diagnostics += diags
    else:
        files = list(analyses)
    files.sort(key=lambda f: f.path)

    modules: dict[str, list[str]] = {}
    for f in files:
        parent = Path(f.path).parent.as_posix()
        modules.setdefault(parent, []).append(f.path)

    shell = {
        p.relative_to(root).as_posix(): p.read_text(encoding="utf-8", errors="replace")
        for p in all_paths
        if p.suffix in SHELL_SUFFIXES
    }
    entry_points = detect_entry_points(files, shell)
    artifacts = detect_artifacts([p.relative_to(root).as_posix() for p in all_paths], files)
    coupling, detail = classify_coupling(contributors, len(entry_points))
    high = order_high_level(files, entry_points, root.name)

    trains = any(Stage.TRN in f.pipeline for f in files)
    return ProjectModel(
        root=root.name,
        files=files,
        modules=modules,
        entry_points=entry_points,
        artifacts=artifacts,
        contributors=contributors,
        coupling=coupling,
        coupling_detail=detail,
        high_level=high,
        development_phase=bool(artifacts) and trains,
        post_development_phase=any(f.loads_artifact for f in files),
        diagnostics=diagnostics,
    )
