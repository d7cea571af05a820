"""Ready-made local models of the singularities of broken Lefschetz fibrations."""
from .base import ModelDescriptor, ModelKind, describe
from .fold import (
    certify_involution_symmetric,
    fold_casimirs,
    fold_chart,
    fold_model,
    fold_singular_distance,
    involution,
    involution_poisson_check,
    killing_signature,
    quotient_representative,
    sl2_check,
)
from .lefschetz import (
    lefschetz_casimirs,
    lefschetz_chart,
    lefschetz_model,
    lefschetz_singular_distance,
)
from .singular_set import SingularSetEntry, SingularSetReport, classify_singular_set


def singular_distance(P):
    """Distance-to-singular-set function for a model structure, or None for custom ones."""
    kind = describe(P).kind
    if kind is ModelKind.LEFSCHETZ:
        return lefschetz_singular_distance
    if kind.is_fold:
        return fold_singular_distance
    return None
