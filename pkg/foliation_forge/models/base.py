import enum
import logging
from dataclasses import dataclass

from ..chart import Chart
from ..scalar import ScalarField

LOGGER = logging.getLogger(__name__)


class ModelKind(enum.Enum):
    LEFSCHETZ = "lefschetz"
    FOLD_ORIENTABLE = "fold"
    FOLD_NONORIENTABLE = "fold-nonorientable"
    CUSTOM = "custom"

    @property
    def is_fold(self):
        return self in (ModelKind.FOLD_ORIENTABLE, ModelKind.FOLD_NONORIENTABLE)

    @classmethod
    def from_tag(cls, tag):
        try:
            return cls(tag)
        except ValueError:
            return cls.CUSTOM


@dataclass(frozen=True, eq=False)
class ModelDescriptor:
    """Which local singularity model a structure stands for, on which chart, with which k."""

    kind: ModelKind
    chart: Chart
    k: ScalarField

    @property
    def singular_label(self):
        if self.kind is ModelKind.LEFSCHETZ:
            return "LefschetzPoint"
        if self.kind.is_fold:
            return "FoldCircle"
        return "Singular"


def describe(P):
    return ModelDescriptor(ModelKind.from_tag(P.model_tag), P.chart, P.k)
