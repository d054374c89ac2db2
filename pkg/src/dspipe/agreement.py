"""Cohen's kappa for auditing stage labels between two raters.

Used to compare the automatic heading classifier (or a dictionary) against
a manual label file.  Agreement fractions are computed exactly with
``Fraction`` and only converted to float for reporting.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Hashable, Sequence
from dataclasses import dataclass
from fractions import Fraction

# Upper bound (inclusive) of each band.
KAPPA_BANDS = (
    (0.20, "Slight agreement"),
    (0.40, "Fair agreement"),
    (0.60, "Moderate agreement"),
    (0.80, "Substantial agreement"),
    (1.00, "Perfect agreement"),
)
BELOW_CHANCE = "Poor agreement"
_EPS = 1e-12


@dataclass(frozen=True)
class AgreementReport:
    n: int
    po: float
    pe: float
    kappa: float
    interpretation: str

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "po": self.po,
            "pe": self.pe,
            "kappa": self.kappa,
            "interpretation": self.interpretation,
        }


def interpret_kappa(kappa: float) -> str:
    if kappa < 0:
        return BELOW_CHANCE
    for upper, label in KAPPA_BANDS:
        if kappa <= upper + _EPS:
            return label
    return KAPPA_BANDS[-1][1]


def cohens_kappa(labels_a: Sequence[Hashable], labels_b: Sequence[Hashable]) -> AgreementReport:
    if len(labels_a) != len(labels_b):
        raise ValueError(f"label lists differ in length: {len(labels_a)} vs {len(labels_b)}")
    n = len(labels_a)
    if n == 0:
        raise ValueError("cannot compute agreement on empty label lists")
    po = Fraction(sum(a == b for a, b in zip(labels_a, labels_b)), n)
    count_a = Counter(labels_a)
    count_b = Counter(labels_b)
    pe = sum((Fraction(count_a[k] * count_b[k], n * n) for k in count_a), Fraction(0))
    if pe == 1:
        kappa = Fraction(1)  # both raters used one identical category throughout
    else:
        kappa = (po - pe) / (1 - pe)
    return AgreementReport(n, float(po), float(pe), float(kappa), interpret_kappa(float(kappa)))
