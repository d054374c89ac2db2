"""Corpus statistics and anti-pattern lint rules over pipelines."""

from __future__ import annotations

import csv
import enum
import io
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .pipeline import Pipeline
from .taxonomy import REPORT_STAGES, Stage, is_feedback_edge

DEFAULT_JUNGLE_MIN_RUNS = 3
DEFAULT_TANGLE_THRESHOLD = 3


class EmptyCorpusError(ValueError):
    pass


class Rule(enum.Enum):
    MISSING_EVALUATION = "MissingEvaluation"
    FEEDBACK_LOOP = "FeedbackLoop"
    PIPELINE_JUNGLE = "PipelineJungle"
    TANGLED_STAGES = "TangledStages"


class Severity(enum.Enum):
    INFO = "info"
    WARN = "warn"


@dataclass(frozen=True)
class Finding:
    source: str
    rule: Rule
    detail: str
    severity: Severity

    @property
    def sort_key(self) -> tuple:
        return (self.source, _RULE_ORDER[self.rule], self.detail)

    def __str__(self) -> str:
        return f"{self.source}: {self.rule.value}: {self.detail}"

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "rule": self.rule.value,
            "severity": self.severity.value,
            "detail": self.detail,
        }


_RULE_ORDER = {rule: i for i, rule in enumerate(Rule)}


# ---------------------------------------------------------------------------
# corpus statistics
# ---------------------------------------------------------------------------


def stage_frequency(pipelines: Sequence[Pipeline]) -> dict[Stage, Fraction]:
    """Fraction of pipelines in which each stage appears at least once."""
    if not pipelines:
        raise EmptyCorpusError("stage frequency needs at least one pipeline")
    present: Counter = Counter()
    for p in pipelines:
        present.update(set(p.stages))
    n = len(pipelines)
    return {s: Fraction(present[s], n) for s in REPORT_STAGES}


def transition_matrix(pipelines: Iterable[Pipeline]) -> Counter:
    """Counts of adjacent (before, after) stage pairs over the corpus."""
    matrix: Counter = Counter()
    for p in pipelines:
        matrix.update(p.edges)
    return matrix


def matrix_rows(matrix: Counter, stages: Sequence[Stage] = REPORT_STAGES) -> list[list[int]]:
    return [[matrix.get((a, b), 0) for b in stages] for a in stages]


def matrix_to_csv(matrix: Counter, stages: Sequence[Stage] = REPORT_STAGES) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["from\\to", *(s.code for s in stages)])
    for stage, row in zip(stages, matrix_rows(matrix, stages)):
        writer.writerow([stage.code, *row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# lint rules
# ---------------------------------------------------------------------------


def lint_missing_stage(p: Pipeline, required: Iterable[Stage] = (Stage.EVL,)) -> list[Finding]:
    findings = []
    for stage in sorted(set(required), key=lambda s: s.ordinal):
        if stage in p:
            continue
        detail = f"no {stage.code} ({stage.display_name}) stage in pipeline"
        if stage is Stage.EVL and Stage.VIS in p:
            detail += "; visualization calls present, evaluation may be done by plotting"
        findings.append(Finding(p.source, Rule.MISSING_EVALUATION, detail, Severity.WARN))
    return findings


def lint_feedback_loops(p: Pipeline) -> list[Finding]:
    findings = []
    for (a, b), n in p.edges.items():
        if not (a.is_ordered and b.is_ordered) or not is_feedback_edge(a, b):
            continue
        findings.append(
            Finding(p.source, Rule.FEEDBACK_LOOP, f"{a.code}→{b.code} (x{n})", Severity.INFO)
        )
    return findings


def lint_pipeline_jungle(
    p: Pipeline, min_runs: int = DEFAULT_JUNGLE_MIN_RUNS, stage: Stage = Stage.PRP
) -> list[Finding]:
    stages = p.stages
    runs = stages.count(stage)
    if runs < min_runs:
        return []
    # Collapsed form guarantees both neighbours of a run differ from it.
    pairs = []
    for i, s in enumerate(stages):
        if s is stage and 0 < i < len(stages) - 1:
            pair = (stages[i - 1], stages[i + 1])
            if pair not in pairs:
                pairs.append(pair)
    if len(pairs) < 2:
        return []
    between = ", ".join(f"({a.code},{b.code})" for a, b in pairs)
    detail = f"{stage.code} occurs {runs} times, between {between}"
    return [Finding(p.source, Rule.PIPELINE_JUNGLE, detail, Severity.WARN)]


def tangling_scores(p: Pipeline) -> dict[Stage, int]:
    """Per-stage scatter: number of extra runs beyond the first."""
    return {s: n - 1 for s, n in p.occurrences().items()}


def lint_tangled(p: Pipeline, threshold: int = DEFAULT_TANGLE_THRESHOLD) -> list[Finding]:
    scatter = tangling_scores(p)
    score = sum(scatter.values())
    if score < threshold:
        return []
    parts = ", ".join(
        f"{s.code} {n}" for s, n in sorted(scatter.items(), key=lambda kv: kv[0].ordinal) if n
    )
    detail = f"tangling score {score} (scatter: {parts})"
    return [Finding(p.source, Rule.TANGLED_STAGES, detail, Severity.WARN)]


RULE_NAMES = {
    "missing": Rule.MISSING_EVALUATION,
    "feedback": Rule.FEEDBACK_LOOP,
    "jungle": Rule.PIPELINE_JUNGLE,
    "tangled": Rule.TANGLED_STAGES,
}


@dataclass(frozen=True)
class LintConfig:
    rules: frozenset[Rule] = frozenset(Rule)
    required: tuple[Stage, ...] = (Stage.EVL,)
    jungle_min_runs: int = DEFAULT_JUNGLE_MIN_RUNS
    tangle_threshold: int = DEFAULT_TANGLE_THRESHOLD

    def __post_init__(self) -> None:
        if self.jungle_min_runs < 1 or self.tangle_threshold < 1:
            raise ValueError("lint thresholds must be positive")


def lint(p: Pipeline, config: LintConfig = LintConfig()) -> list[Finding]:
    findings: list[Finding] = []
    if Rule.MISSING_EVALUATION in config.rules:
        findings += lint_missing_stage(p, config.required)
    if Rule.FEEDBACK_LOOP in config.rules:
        findings += lint_feedback_loops(p)
    if Rule.PIPELINE_JUNGLE in config.rules:
        findings += lint_pipeline_jungle(p, config.jungle_min_runs)
    if Rule.TANGLED_STAGES in config.rules:
        findings += lint_tangled(p, config.tangle_threshold)
    return findings


def has_warnings(findings: Iterable[Finding]) -> bool:
    return any(f.severity is Severity.WARN for f in findings)


# ---------------------------------------------------------------------------
# corpus report
# ---------------------------------------------------------------------------


@dataclass
class CorpusReport:
    """Additive summary of many pipelines; ``merge`` is associative and commutative."""

    n_pipelines: int = 0
    presence: Counter = field(default_factory=Counter)
    transition: Counter = field(default_factory=Counter)
    dropped: Counter = field(default_factory=Counter)
    pipelines: list[Pipeline] = field(default_factory=list)
    lint: list[Finding] = field(default_factory=list)

    @classmethod
    def of(cls, p: Pipeline, config: LintConfig | None = None) -> CorpusReport:
        return cls(
            n_pipelines=1,
            presence=Counter(set(p.stages)),
            transition=Counter(p.edges),
            dropped=Counter(p.dropped),
            pipelines=[p],
            lint=lint(p, config) if config is not None else [],
        )

    def merge(self, other: CorpusReport) -> CorpusReport:
        return CorpusReport(
            n_pipelines=self.n_pipelines + other.n_pipelines,
            presence=self.presence + other.presence,
            transition=self.transition + other.transition,
            dropped=self.dropped + other.dropped,
            pipelines=sorted(self.pipelines + other.pipelines, key=lambda p: p.sort_key),
            lint=sorted(self.lint + other.lint, key=lambda f: f.sort_key),
        )

    @property
    def stage_frequency(self) -> dict[Stage, Fraction]:
        if self.n_pipelines == 0:
            raise EmptyCorpusError("corpus contains no pipelines")
        return {s: Fraction(self.presence[s], self.n_pipelines) for s in REPORT_STAGES}

    def to_json(self) -> dict:
        freq = self.stage_frequency
        return {
            "n_pipelines": self.n_pipelines,
            "stage_frequency": {s.code: float(freq[s]) for s in REPORT_STAGES},
            "transitions": [
                {"from": a.code, "to": b.code, "count": self.transition[(a, b)]}
                for a in REPORT_STAGES
                for b in REPORT_STAGES
                if self.transition[(a, b)]
            ],
            "dropped": {"GEN": self.dropped["GEN"], "NoMatch": self.dropped["NoMatch"]},
            "pipelines": [p.to_json() for p in self.pipelines],
            "lint": [f.to_json() for f in self.lint],
        }


def build_report(pipelines: Iterable[Pipeline], config: LintConfig | None = None) -> CorpusReport:
    report = CorpusReport()
    for p in pipelines:
        report = report.merge(CorpusReport.of(p, config))
    return report
