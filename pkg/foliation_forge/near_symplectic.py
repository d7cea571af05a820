"""The near-symplectic form of a circle-valued Morse function on a product chart.

On S^1_t x R^3 with the product metric and orientation dt ^ dx1 ^ dx2 ^ dx3,

    omega = dt ^ df + *(dt ^ df)

is self-dual with omega ^ omega = 2 |grad f|^2 vol. Since d*(dt ^ df) = (Laplacian f) dx1 ^ dx2 ^ dx3,
omega is closed only for harmonic f, so the model Morse function is the harmonic index-1
quadratic x2^2 + x3^2 - 2 x1^2 rather than -x1^2 + x2^2 + x3^2. It vanishes exactly on
S^1 x Crit(f), and there its linearization has rank 3. Near that circle omega shrinks linearly,
while the leaf forms of the fold Poisson structure grow like the inverse distance.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from tqdm import tqdm

from .chart import TWO_PI, Chart, exact_node
from .checks import CheckResult
from .defaults import DEFAULT_THREADS, UNIT_BOX
from .errors import BackendError, DimensionMismatchError
from .leaves import area_form_ratio
from .multivector import (
    DifferentialForm,
    differential,
    exact_rank,
    exterior_derivative,
    hodge_star,
    pointwise_norm,
    rank_at,
    wedge,
)
from .polynomial import Polynomial, parse_polynomial
from .scalar import ScalarField
from .utils import chunks

LOGGER = logging.getLogger(__name__)

NEAR_SYMPLECTIC_NAMES = ("t", "x1", "x2", "x3")
MORSE_NAMES = ("x1", "x2", "x3")
MODEL_MORSE_FUNCTION = "-2*x1^2 + x2^2 + x3^2"
CIRCLE_PARITIES = ("even", "odd")


def near_symplectic_chart(radius=UNIT_BOX[1]):
    return Chart(
        NEAR_SYMPLECTIC_NAMES,
        bounds=[(0, TWO_PI)] + [(-radius, radius)] * 3,
        periods=(TWO_PI, None, None, None),
        label="near-symplectic",
    )


@dataclass(frozen=True, eq=False)
class NearSymplecticForm:
    chart: Chart
    omega: DifferentialForm
    f: Polynomial
    circle_parity: str = "even"

    @property
    def wedge_square(self):
        """The coefficient of omega ^ omega on dt ^ dx1 ^ dx2 ^ dx3."""
        return wedge(self.omega, self.omega)[(0, 1, 2, 3)]


def _morse_polynomial(f, chart):
    if isinstance(f, ScalarField):
        f = f.require_exact("The near-symplectic construction")
    if isinstance(f, str):
        f = parse_polynomial(f, MORSE_NAMES)
    if not isinstance(f, Polynomial):
        raise BackendError(f"Cannot build a near-symplectic form from {f!r}")
    if f.dimension == 3:
        return f.embed(chart.names, (1, 2, 3))
    if f.dimension != chart.dimension:
        raise DimensionMismatchError(f"f has {f.dimension} variables, expected 3")
    return f


def _laplacian(f):
    laplacian = Polynomial.zero(f.names)
    for index in range(1, len(f.names)):
        laplacian = laplacian + f.diff(index).diff(index)
    return laplacian


def build_near_symplectic(f=MODEL_MORSE_FUNCTION, chart=None, circle_parity="even"):
    """omega = dt ^ df + *(dt ^ df) for a polynomial f on (x1, x2, x3)."""
    if circle_parity not in CIRCLE_PARITIES:
        raise ValueError(f"circle_parity must be one of {CIRCLE_PARITIES}, got {circle_parity!r}")
    chart = chart or near_symplectic_chart()
    f = _morse_polynomial(f, chart)
    dt_df = wedge(DifferentialForm.basis(chart, 0), differential(chart, f))
    omega = dt_df + hodge_star(dt_df)
    LOGGER.debug(f"Near-symplectic form of f = {f}: {omega!r}")
    if not _laplacian(f).is_zero:
        LOGGER.warning(f"f = {f} is not harmonic, so omega is not closed")
    return NearSymplecticForm(chart, omega, f, circle_parity)


@dataclass(frozen=True)
class CriticalPoint:
    point: Tuple
    index: int
    nullity: int
    hessian: Tuple[Tuple, ...]

    @property
    def morse(self):
        return self.nullity == 0

    @property
    def indefinite(self):
        return 0 < self.index < len(self.hessian)


def classify_critical_point(f, point, names=MORSE_NAMES):
    """Morse index and nullity of f at a critical point, from the exact Hessian."""
    if isinstance(f, str):
        f = parse_polynomial(f, names)
    point = tuple(point)
    gradient = [partial.evaluate(point, exact=True) for partial in f.gradient()]
    if any(gradient):
        raise ValueError(f"{point} is not a critical point of {f}: gradient {gradient}")
    hessian = tuple(
        tuple(second.evaluate(point, exact=True) for second in partial.gradient())
        for partial in f.gradient()
    )
    nullity = len(hessian) - exact_rank(hessian)
    eigenvalues = np.linalg.eigvalsh(np.asarray(hessian, dtype=float))
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    index = int(np.sum(eigenvalues < -1e-12 * scale))
    return CriticalPoint(point, index, nullity, hessian)


@dataclass(frozen=True)
class NearSymplecticEntry:
    point: Tuple
    wedge_square: object
    is_zero: bool
    omega_rank: int
    gradient_rank: Optional[int] = None


@dataclass(frozen=True)
class NearSymplecticReport:
    circle_parity: str
    entries: Tuple[NearSymplecticEntry, ...]
    checks: Tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def zero_nodes(self):
        return tuple(entry for entry in self.entries if entry.is_zero)

    @property
    def passed(self):
        return all(self.checks)


def _evaluate_chunk(ns, nodes, wedge_square, linearization):
    entries = []
    for node in nodes:
        point = exact_node(node)
        values = ns.omega.values(point, exact=True)
        is_zero = not any(values.values())
        gradient_rank = None
        if is_zero:
            gradient_rank = exact_rank(
                [[partial.evaluate(point, exact=True) for partial in row] for row in linearization]
            )
        entries.append(
            NearSymplecticEntry(
                tuple(node),
                wedge_square.evaluate(point, exact=True),
                is_zero,
                rank_at(ns.omega, point, exact=True),
                gradient_rank,
            )
        )
    return entries


def _closed_check(ns, nodes):
    """d omega = 0 exactly; otherwise every nonzero component and the first node where one is
    nonzero."""
    d_omega = exterior_derivative(ns.omega).polynomials()
    if not d_omega:
        return CheckResult(name="closed", passed=True, exact=True)
    names = ns.chart.names
    components = {"^".join(names[i] for i in key): str(p) for key, p in sorted(d_omega.items())}
    witness = next(
        (
            tuple(node)
            for node in nodes
            if any(p.evaluate(exact_node(node), exact=True) for p in d_omega.values())
        ),
        None,
    )
    return CheckResult(
        name="closed",
        passed=False,
        exact=True,
        residual=next(iter(components.values())),
        witness=witness,
        detail={"d_omega": components},
    )


def check_near_symplectic(ns, grid, threads=DEFAULT_THREADS, progress=True, chunk_size=2000):
    """Identities of omega, then per-node values of omega ^ omega / vol, the zero locus and the
    rank of the linearization of omega at its zeros."""
    if not grid.within(ns.chart):
        raise ValueError(f"Grid {grid.counts} leaves the box of chart {ns.chart.names}")
    omega_polys = ns.omega.polynomials()
    wedge_square = ns.wedge_square.require_exact("The wedge-square check")
    gradient_norm = Polynomial.zero(ns.chart.names)
    for partial in ns.f.gradient():
        gradient_norm = gradient_norm + partial * partial
    linearization = [
        [polynomial.diff(index) for index in range(ns.chart.dimension)]
        for _, polynomial in sorted(omega_polys.items())
    ]

    nodes = sorted(grid.nodes())
    checks = [
        _closed_check(ns, nodes),
        CheckResult(
            name="wedge_square_identity",
            passed=wedge_square == gradient_norm * 2,
            exact=True,
            detail={"wedge_square": str(wedge_square)},
        ),
    ]

    entries = []
    with tqdm(total=len(nodes), unit="node", disable=not progress) as bar:
        with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
            batches = list(chunks(nodes, chunk_size))
            for batch, result in zip(
                batches,
                executor.map(
                    lambda batch: _evaluate_chunk(ns, batch, wedge_square, linearization), batches
                ),
            ):
                entries.extend(result)
                bar.update(len(batch))

    negative = next((entry for entry in entries if entry.wedge_square < 0), None)
    checks.append(
        CheckResult(
            name="wedge_square_nonnegative",
            passed=negative is None,
            exact=True,
            witness=negative.point if negative else None,
        )
    )
    critical = [
        entry
        for entry in entries
        if not any(partial.evaluate(exact_node(entry.point)) for partial in ns.f.gradient())
    ]
    mismatch = {entry.point for entry in critical} ^ {entry.point for entry in entries if entry.is_zero}
    checks.append(
        CheckResult(
            name="zero_locus",
            passed=not mismatch,
            exact=True,
            witness=min(mismatch) if mismatch else None,
            detail={"zero_nodes": sum(1 for entry in entries if entry.is_zero)},
        )
    )
    low_rank = next(
        (entry for entry in entries if entry.is_zero and entry.gradient_rank != 3), None
    )
    checks.append(
        CheckResult(
            name="intrinsic_gradient_rank",
            passed=low_rank is None,
            exact=True,
            residual=low_rank.gradient_rank if low_rank else 0,
            witness=low_rank.point if low_rank else None,
        )
    )
    rank_two = next((entry for entry in entries if entry.omega_rank == 2), None)
    checks.append(
        CheckResult(
            name="never_rank_two",
            passed=rank_two is None,
            exact=True,
            witness=rank_two.point if rank_two else None,
        )
    )
    for check in checks:
        if not check:
            LOGGER.warning(f"Near-symplectic check {check.name} failed (witness {check.witness})")
    return NearSymplecticReport(ns.circle_parity, tuple(entries), tuple(checks))


@dataclass(frozen=True)
class ContrastRow:
    radius: float
    omega_norm: float
    leaf_ratio: float


@dataclass(frozen=True)
class ContrastTable:
    rows: Tuple[ContrastRow, ...]
    omega_slope: float
    leaf_slope: float


def contrast_report(ns, P, radii):
    """|omega| and the fold leaf-form ratio at distance r from the circle, along x1."""
    radii = sorted((float(radius) for radius in radii), reverse=True)
    if any(radius <= 0 for radius in radii):
        raise ValueError(f"Contrast radii must be positive, got {radii}")
    rows = []
    for radius in radii:
        point = (0.0, radius, 0.0, 0.0)
        rows.append(ContrastRow(radius, pointwise_norm(ns.omega, point), area_form_ratio(P, point)))
    omega_slope = leaf_slope = float("nan")
    if len(rows) >= 2:
        logs = np.log(radii)
        omega_slope = float(np.polyfit(logs, np.log([row.omega_norm for row in rows]), 1)[0])
        leaf_slope = float(np.polyfit(logs, np.log([row.leaf_ratio for row in rows]), 1)[0])
    LOGGER.info(f"Contrast slopes: omega {omega_slope:.6f}, leaf form {leaf_slope:.6f}")
    return ContrastTable(tuple(rows), omega_slope, leaf_slope)
