"""Stage vocabulary shared by every analysis in the package.

Eleven canonical stages are ordered along the main chain; three extra
stages (library loading, EDA, visualization) come from notebook-level
pipelines, and ``GEN`` collects calls that perform no stage at all.
"""

from __future__ import annotations

import enum


class Layer(enum.Enum):
    PREPROCESSING = "Preprocessing"
    MODEL_BUILDING = "ModelBuilding"
    POSTPROCESSING = "Postprocessing"
    AUXILIARY = "Auxiliary"


class UnknownStageError(ValueError):
    """Raised for a stage code outside the closed vocabulary."""


class UnorderedStageError(ValueError):
    """Raised when an ordering question involves VIS or GEN."""


class Stage(enum.Enum):
    # code = (display name, layer, ordinal); ordinal 0 means unordered
    ACQ = ("Data Acquisition", Layer.PREPROCESSING, 10)
    PRP = ("Data Preparation", Layer.PREPROCESSING, 20)
    STR = ("Storage", Layer.PREPROCESSING, 30)
    FTR = ("Feature Engineering", Layer.MODEL_BUILDING, 40)
    MDL = ("Modeling", Layer.MODEL_BUILDING, 50)
    TRN = ("Training", Layer.MODEL_BUILDING, 60)
    EVL = ("Evaluation", Layer.MODEL_BUILDING, 70)
    PRD = ("Prediction", Layer.MODEL_BUILDING, 80)
    INT = ("Interpretation", Layer.POSTPROCESSING, 90)
    CMN = ("Communication", Layer.POSTPROCESSING, 100)
    DPL = ("Deployment", Layer.POSTPROCESSING, 110)
    LIB = ("Library Loading", Layer.AUXILIARY, 5)
    EDA = ("Exploratory Data Analysis", Layer.AUXILIARY, 25)
    VIS = ("Visualization", Layer.AUXILIARY, 0)
    GEN = ("Generic", Layer.AUXILIARY, 0)

    def __init__(self, display_name: str, layer: Layer, ordinal: int) -> None:
        self.display_name = display_name
        self.layer = layer
        self.ordinal = ordinal

    @property
    def code(self) -> str:
        return self.name

    @property
    def is_ordered(self) -> bool:
        return self.ordinal != 0

    def __repr__(self) -> str:
        return f"Stage.{self.name}"

    def __str__(self) -> str:
        return self.name


CANONICAL_STAGES: tuple[Stage, ...] = tuple(
    sorted((s for s in Stage if s.layer is not Layer.AUXILIARY), key=lambda s: s.ordinal)
)

# Display / serialization order: ordered stages by ordinal, then VIS; GEN is never reported.
REPORT_STAGES: tuple[Stage, ...] = tuple(
    sorted((s for s in Stage if s.is_ordered), key=lambda s: s.ordinal)
) + (Stage.VIS,)


def stage_from_code(code: str) -> Stage:
    """Return the stage for ``code``, ignoring case and surrounding whitespace."""
    key = code.strip().upper() if isinstance(code, str) else code
    try:
        return Stage[key]
    except KeyError:
        raise UnknownStageError(f"unknown stage code: {code!r}") from None


def is_feedback_edge(src: Stage, dst: Stage) -> bool:
    """True when moving from ``src`` to ``dst`` goes back along the chain."""
    for stage in (src, dst):
        if not stage.is_ordered:
            raise UnorderedStageError(f"stage {stage.name} has no position in the chain")
    return dst.ordinal < src.ordinal
