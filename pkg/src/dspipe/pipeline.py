"""Low-level (API-call) and high-level (notebook heading) pipelines."""

from __future__ import annotations

import enum
import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from .dictionary import ApiDictionary, DictEntry
from .frontend import CallEvent, SourceUnit, extract_headings
from .taxonomy import Stage

NO_MATCH = "NoMatch"


class Level(enum.Enum):
    LOW = "low"
    HIGH = "high"


@dataclass(frozen=True)
class StageOccurrence:
    stage: Stage
    occurrence: int  # k-th run of this stage, 1-based
    span: tuple[int, int]  # first and last position merged into this run
    calls: int

    @property
    def label(self) -> str:
        return f"{self.stage.code}#{self.occurrence}"

    def to_json(self) -> dict:
        return {
            "stage": self.stage.code,
            "occurrence": self.occurrence,
            "calls": self.calls,
            "span": list(self.span),
        }


@dataclass(frozen=True)
class Pipeline:
    source: str
    level: Level
    sequence: tuple[StageOccurrence, ...]
    dropped: dict[str, int] = field(default_factory=dict, compare=False)

    @property
    def stages(self) -> tuple[Stage, ...]:
        return tuple(occ.stage for occ in self.sequence)

    @property
    def edges(self) -> Counter:
        """Adjacent (from, to) pairs with counts, keyed in first-seen order."""
        stages = self.stages
        return Counter(zip(stages, stages[1:]))

    @cached_property
    def sort_key(self) -> tuple:
        """Total order used when reports list many pipelines."""
        return (self.source, self.level.value, tuple(occ.label for occ in self.sequence))

    def __len__(self) -> int:
        return len(self.sequence)

    def __contains__(self, stage: Stage) -> bool:
        return any(occ.stage is stage for occ in self.sequence)

    def occurrences(self) -> Counter:
        return Counter(self.stages)

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "level": self.level.value,
            "sequence": [occ.to_json() for occ in self.sequence],
            "edges": [
                {"from": a.code, "to": b.code, "count": n} for (a, b), n in self.edges.items()
            ],
            "dropped": {"GEN": self.dropped.get("GEN", 0), NO_MATCH: self.dropped.get(NO_MATCH, 0)},
        }


def collapse(
    stages: Sequence[Stage], positions: Sequence[int] | None = None
) -> tuple[StageOccurrence, ...]:
    """Merge maximal runs of equal stages into numbered occurrences.

    ``positions`` gives the order index of each input item (defaults to
    ``0..n-1``) and feeds the span of each run.
    """
    if positions is None:
        positions = range(len(stages))
    seen: Counter = Counter()
    out: list[StageOccurrence] = []
    run_stage = None
    run_first = run_last = run_calls = 0
    for stage, pos in zip(stages, positions):
        if stage is run_stage:
            run_last = pos
            run_calls += 1
            continue
        if run_stage is not None:
            out.append(StageOccurrence(run_stage, seen[run_stage], (run_first, run_last), run_calls))
        run_stage = stage
        seen[stage] += 1
        run_first = run_last = pos
        run_calls = 1
    if run_stage is not None:
        out.append(StageOccurrence(run_stage, seen[run_stage], (run_first, run_last), run_calls))
    return tuple(out)


def from_stages(source: str, stages: Iterable[Stage], level: Level = Level.LOW) -> Pipeline:
    """Pipeline built directly from a stage list (collapsed on the way in)."""
    return Pipeline(source, level, collapse(list(stages)))


def classify_events(
    events: Sequence[CallEvent], dictionary: ApiDictionary
) -> list[tuple[CallEvent, DictEntry | None]]:
    return [(e, dictionary.match_entry(e)) for e in events]


def build_low_level(
    events: Sequence[CallEvent], dictionary: ApiDictionary, source: str = ""
) -> Pipeline:
    """Map calls to stages, drop generic and unknown calls, collapse runs."""
    stages: list[Stage] = []
    positions: list[int] = []
    dropped = {"GEN": 0, NO_MATCH: 0}
    for event in events:
        entry = dictionary.match_entry(event)
        if entry is None:
            dropped[NO_MATCH] += 1
        elif entry.stage is Stage.GEN:
            dropped["GEN"] += 1
        else:
            stages.append(entry.stage)
            positions.append(event.order_index)
    return Pipeline(source, Level.LOW, collapse(stages, positions), dropped)


# Checked top to bottom; the first stage with a matching pattern wins.
HEADING_KEYWORDS: tuple[tuple[Stage, tuple[str, ...]], ...] = (
    (Stage.ACQ, (r"\b(load|read|import|get|fetch)(ing)?( the| in)? data", r"\bdata ?(loading|acquisition|collection)",
                 r"\bacquisition", r"\bdownload")),
    (Stage.LIB, (r"\bload(ing)? (the )?librar", r"\bimport", r"\blibrar", r"\bpackages\b")),
    (Stage.EDA, (r"\bexplorat", r"\beda\b", r"\bexplor(e|ing)\b", r"\bdata exploration")),
    (Stage.VIS, (r"\bvisuali", r"\bplot")),
    (Stage.PRP, (r"\bsplit",)),
    (Stage.EVL, (r"\bevaluat", r"\bvalidation", r"\bmetric", r"\bscor(e|ing)\b")),
    (Stage.PRD, (r"\bpredict(ion|ions|ing)?\b", r"\bsubmi(t|ssion)", r"\binference")),
    (Stage.TRN, (r"\btrain", r"\bfitting\b")),
    (Stage.FTR, (r"\bfeature",)),
    (Stage.PRP, (r"\bclean", r"\bpre-?process", r"\bprepar", r"\bmissing values?", r"\bwrangl", r"\bimput")),
    (Stage.STR, (r"\bstorage", r"\bdatabase")),
    (Stage.INT, (r"\binterpret", r"\bexplainab")),
    (Stage.CMN, (r"\bcommunicat",)),
    (Stage.DPL, (r"\bdeploy",)),
    (Stage.MDL, (r"\bmodel", r"\bclassifier", r"\bneural network", r"\barchitecture")),
)

_HEADING_RULES = tuple(
    (stage, re.compile("|".join(patterns))) for stage, patterns in HEADING_KEYWORDS
)


def classify_heading(heading: str) -> Stage | None:
    """Stage named by a notebook section heading, or None if unclassified."""
    text = heading.lower()
    for stage, rule in _HEADING_RULES:
        if rule.search(text):
            return stage
    return None


def build_high_level(unit: SourceUnit) -> Pipeline:
    stages: list[Stage] = []
    cells: list[int] = []
    unclassified = 0
    for cell_index, heading in extract_headings(unit):
        stage = classify_heading(heading)
        if stage is None:
            unclassified += 1
            continue
        stages.append(stage)
        cells.append(cell_index)
    return Pipeline(unit.path, Level.HIGH, collapse(stages, cells), {NO_MATCH: unclassified})
