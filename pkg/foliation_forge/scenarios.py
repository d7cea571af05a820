"""Scenario files and the pipelines that run them.

A scenario is a JSON object; the CLI flags override its fields. Each pipeline builds the requested
structure, runs its checks and returns RunResults for ``reports.emit_report``.
"""
import logging
import math
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

import inflect
import numpy as np

from .brackets import (
    ProportionalByConstant,
    build_flaschka_ratiu,
    compare_conformal,
    is_casimir,
    jacobi_check,
)
from .chart import Chart, GridSpec
from .checks import CheckResult
from .defaults import (
    DEFAULT_RADII,
    DEFAULT_RADII_POINTS,
    DEFAULT_RESULTS_PATH,
    DEFAULT_SEED,
    DEFAULT_STEP,
    DEFAULT_THREADS,
    UNIT_BOX,
)
from .errors import PolynomialParseError, ScenarioError
from .leaves import RadialPath, StepPolicy, integrate_hamiltonian, scaling_fit
from .models import (
    ModelKind,
    certify_involution_symmetric,
    classify_singular_set,
    fold_chart,
    fold_model,
    involution_poisson_check,
    killing_signature,
    lefschetz_chart,
    lefschetz_model,
    quotient_representative,
    sl2_check,
)
from .near_symplectic import (
    MODEL_MORSE_FUNCTION,
    build_near_symplectic,
    check_near_symplectic,
    classify_critical_point,
    contrast_report,
    near_symplectic_chart,
)
from .polynomial import parse_polynomial
from .reports import RunResults, structure_document
from .sampling import STREAM_CASIMIRS, random_generator, random_polynomial
from .utils import load_json

LOGGER = logging.getLogger(__name__)
inflecter = inflect.engine()

SCENARIO_KINDS = (
    "lefschetz",
    "fold",
    "fold-nonorientable",
    "custom-casimirs",
    "near-symplectic",
    "contrast",
)
POISSON_KINDS = ("lefschetz", "fold", "fold-nonorientable", "custom-casimirs")
CUSTOM_NAMES = ("x1", "x2", "x3", "x4")
DRIFT_TOLERANCE = 1e-8
SLOPE_TOLERANCE = 0.01
EXPECTED_SLOPES = {"lefschetz": -2.0, "fold": -1.0, "fold-nonorientable": -1.0}
EXPECTED_CONSTANTS = {"lefschetz": Fraction(4), "fold": Fraction(-2), "fold-nonorientable": Fraction(-2)}
DEFAULT_FLOWS = {
    "lefschetz": {"h": "x1", "x0": ["0", "0", "1/2", "0"], "T": 1},
    "fold": {"h": "x3", "x0": ["0", "1", "0", "0"], "T": 1},
    "fold-nonorientable": {"h": "x3", "x0": ["0", "1", "0", "0"], "T": 1},
}
DEFAULT_GRID_COUNTS = {"lefschetz": (21, 21, 21, 21)}
FOLD_GRID_COUNTS = (8, 21, 21, 21)


def parse_number(text):
    """An exact rational from text like "3", "-1/2" or "0.25"; floats pass through."""
    if isinstance(text, (int, Fraction)) and not isinstance(text, bool):
        return Fraction(text)
    if isinstance(text, float):
        return text
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as error:
        raise ScenarioError(f"Cannot read {text!r} as a number") from error


def parse_point(text):
    values = text.split(",") if isinstance(text, str) else list(text)
    return tuple(parse_number(value) for value in values)


def parse_radii(text):
    """Radii as "a..b" (five geometric points), "a..b:n", a comma list or a list of numbers."""
    if text is None:
        return list(DEFAULT_RADII)
    if not isinstance(text, str):
        return [float(parse_number(value)) for value in text]
    if ".." in text:
        bounds, _, count = text.partition(":")
        start, _, stop = bounds.partition("..")
        try:
            count = int(count) if count else DEFAULT_RADII_POINTS
            start, stop = float(start), float(stop)
        except ValueError as error:
            raise ScenarioError(f"Cannot read radii range {text!r}") from error
        if start <= 0 or stop <= 0 or count < 2:
            raise ScenarioError(f"Radii range {text!r} needs positive ends and at least 2 points")
        return [float(value) for value in np.geomspace(start, stop, count)]
    return [float(parse_number(value)) for value in text.split(",") if value.strip()]


@dataclass(frozen=True)
class FlowSpec:
    h: str
    x0: tuple
    T: float = 1.0
    step: float = DEFAULT_STEP


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value):
    return _is_int(value) or isinstance(value, (float, str, Fraction))


def _require(condition, key, value, expected):
    if not condition:
        raise ScenarioError(f"Scenario key {key!r} must be {expected}, got {value!r}")


def _is_pair_list(value, item_check):
    return isinstance(value, list) and all(
        isinstance(pair, list) and len(pair) == 2 and all(map(item_check, pair)) for pair in value
    )


def _check_types(config):
    """Shape of every field read from JSON or flags; values are parsed where they are used."""
    for key in ("k", "f", "circle_parity"):
        value = getattr(config, key)
        _require(isinstance(value, str), key, value, "text")
    casimirs = config.casimirs
    _require(
        isinstance(casimirs, list) and all(isinstance(text, str) for text in casimirs),
        "casimirs",
        casimirs,
        "a list of polynomial texts",
    )
    _require(config.radius is None or _is_number(config.radius), "radius", config.radius, "a number")
    _require(config.output is None or isinstance(config.output, str), "output", config.output, "a path")
    for key, low in (("random_cases", 0), ("seed", 0), ("threads", 1)):
        value = getattr(config, key)
        _require(_is_int(value) and value >= low, key, value, f"an integer >= {low}")

    grid = config.grid
    if grid is not None:
        _require(
            isinstance(grid, dict) and set(grid) <= {"counts", "bounds"},
            "grid",
            grid,
            "an object with 'counts' and optional 'bounds'",
        )
        counts = grid.get("counts", [])
        _require(
            isinstance(counts, list) and all(_is_int(count) and count >= 1 for count in counts),
            "grid.counts",
            counts,
            "a list of positive integers",
        )
        bounds = grid.get("bounds", [])
        _require(_is_pair_list(bounds, _is_number), "grid.bounds", bounds, "a list of [low, high] pairs")

    flows = config.flows
    _require(
        flows is None or (isinstance(flows, list) and all(isinstance(flow, dict) for flow in flows)),
        "flows",
        flows,
        "a list of objects",
    )
    radii = config.radii
    _require(
        radii is None
        or isinstance(radii, str)
        or (isinstance(radii, list) and all(map(_is_number, radii))),
        "radii",
        radii,
        "a range text or a list of numbers",
    )
    path = config.path
    _require(
        path is None
        or (
            isinstance(path, dict)
            and all(isinstance(path.get(key, []), list) for key in ("origin", "direction"))
        ),
        "path",
        path,
        "an object with 'origin' and 'direction' lists",
    )
    pairs = config.involution_pairs
    _require(
        _is_pair_list(pairs, lambda name: isinstance(name, str)),
        "involution_pairs",
        pairs,
        "a list of [name, name] pairs",
    )


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    k: str = "1"
    casimirs: List[str] = field(default_factory=list)
    radius: Optional[str] = None
    f: str = MODEL_MORSE_FUNCTION
    circle_parity: str = "even"
    grid: Optional[dict] = None
    flows: Optional[list] = None
    radii: Optional[object] = None
    path: Optional[dict] = None
    involution_pairs: list = field(default_factory=lambda: [["x1", "x2"], ["theta", "x1"]])
    random_cases: int = 10
    output: Optional[str] = None
    seed: int = DEFAULT_SEED
    threads: int = DEFAULT_THREADS

    def __post_init__(self):
        if self.scenario not in SCENARIO_KINDS:
            raise ScenarioError(
                f"Unknown scenario {self.scenario!r}; expected one of {', '.join(SCENARIO_KINDS)}"
            )
        _check_types(self)
        if self.scenario == "custom-casimirs" and len(self.casimirs) != 2:
            raise ScenarioError("A custom-casimirs scenario needs exactly two Casimir polynomials")

    @classmethod
    def from_dict(cls, data):
        known = {item.name for item in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ScenarioError(f"Unknown scenario key(s): {', '.join(unknown)}")
        if "scenario" not in data:
            raise ScenarioError("A scenario file needs a 'scenario' field")
        return cls(**data)

    def with_overrides(self, **overrides):
        return replace(self, **{key: value for key, value in overrides.items() if value is not None})

    def output_path(self, command):
        return Path(self.output) if self.output else DEFAULT_RESULTS_PATH / f"{command}-{self.scenario}"

    def as_dict(self):
        return asdict(self)


def load_scenario(path):
    try:
        data = load_json(Path(path))
    except FileNotFoundError as error:
        raise ScenarioError(f"No scenario file at {path}") from error
    except ValueError as error:
        raise ScenarioError(f"Scenario file {path} is not valid JSON: {error}") from error
    if not isinstance(data, dict):
        raise ScenarioError(f"Scenario file {path} must hold a JSON object")
    return ScenarioConfig.from_dict(data)


def _progress():
    """Progress bars only at INFO verbosity or chattier."""
    return LOGGER.isEnabledFor(logging.INFO)


def _radius(config, default):
    return parse_number(config.radius) if config.radius is not None else default


def build_structure(config, k=None):
    """The Poisson structure a scenario asks for (k overrides the configured factor)."""
    k_text = config.k if k is None else k
    if config.scenario == "lefschetz":
        chart = lefschetz_chart(_radius(config, 1))
        return lefschetz_model(parse_polynomial(k_text, chart.names), chart)
    if config.scenario in ("fold", "fold-nonorientable", "contrast"):
        chart = fold_chart(_radius(config, 2))
        return fold_model(
            parse_polynomial(k_text, chart.names), config.scenario != "fold-nonorientable", chart
        )
    if config.scenario == "custom-casimirs":
        radius = _radius(config, 1)
        chart = Chart(CUSTOM_NAMES, bounds=[(-radius, radius)] * 4, label="custom")
        return build_flaschka_ratiu(
            chart,
            [parse_polynomial(text, chart.names) for text in config.casimirs],
            parse_polynomial(k_text, chart.names),
            model_tag="custom",
        )
    raise ScenarioError(f"Scenario {config.scenario!r} does not describe a Poisson structure")


def _grid(config, chart, counts):
    """Grid from the scenario, defaulting to the chart box cut down to [-1, 1] off the circle."""
    spec = config.grid or {}
    counts = tuple(spec.get("counts", counts))
    if "bounds" in spec:
        bounds = [tuple(parse_number(value) for value in pair) for pair in spec["bounds"]]
    else:
        bounds = [
            (lo, hi) if period else (max(lo, Fraction(UNIT_BOX[0])), min(hi, Fraction(UNIT_BOX[1])))
            for (lo, hi), period in zip(chart.bounds, chart.periods)
        ]
    try:
        grid = GridSpec.for_chart(chart, counts, bounds)
    except ValueError as error:
        raise ScenarioError(f"Invalid grid {spec}: {error}") from error
    if not grid.within(chart):
        raise ScenarioError(f"Grid bounds {bounds} leave the chart box {chart.bounds}")
    return grid


def _on_singular_set(kind, node):
    if kind is ModelKind.LEFSCHETZ:
        return not any(node)
    return not any(node[1:])


def _check_stratification(results, P, config):
    kind = ModelKind.from_tag(P.model_tag)
    counts = DEFAULT_GRID_COUNTS.get(config.scenario, FOLD_GRID_COUNTS if kind.is_fold else (9,) * 4)
    report = classify_singular_set(
        P, _grid(config, P.chart, counts), config.threads, progress=_progress()
    )
    results.add_table(
        "singular_set",
        P.chart.names + ("rank", "label"),
        [entry.point + (entry.rank, entry.label) for entry in report.entries],
    )
    if kind is ModelKind.CUSTOM:
        bad = next((entry for entry in report.entries if entry.rank > 2), None)
    else:
        bad = next(
            (
                entry
                for entry in report.entries
                if (entry.rank == 0) != _on_singular_set(kind, entry.point) or entry.rank > 2
            ),
            None,
        )
    results.add_check(
        CheckResult(
            name="rank_stratification",
            passed=bad is None and report.ranks_even,
            exact=P.is_exact,
            witness=bad.point if bad else None,
            residual=bad.rank if bad else 0,
        ),
        nodes=len(report.entries),
        singular_nodes=len(report.singular),
    )


def _random_construction_suite(results, config):
    """Seeded random Casimir pairs: each built structure must satisfy Jacobi exactly."""
    chart = Chart(CUSTOM_NAMES, label="random")
    rng = random_generator(config.seed, STREAM_CASIMIRS)
    factors = (1, parse_polynomial("1 + x1^2", CUSTOM_NAMES))
    failure = None
    for case in range(config.random_cases):
        casimirs = [random_polynomial(rng, CUSTOM_NAMES) for _ in range(2)]
        P = build_flaschka_ratiu(chart, casimirs, factors[case % 2])
        if not jacobi_check(P) or not all(is_casimir(P, F) for F in P.casimirs):
            failure = [str(F.polynomial) for F in P.casimirs]
            break
    results.add_check(
        CheckResult(
            name="random_construction",
            passed=failure is None,
            exact=True,
            detail={"cases": config.random_cases, "failing_casimirs": failure},
        )
    )


def run_verify(config):
    if config.scenario == "near-symplectic":
        return run_near_symplectic(config, command="verify")
    if config.scenario == "contrast":
        return run_near_symplectic(config, command="verify").merge(run_contrast(config))
    results = RunResults("verify", config.scenario, config.seed)
    P = build_structure(config)
    results.documents["structure"] = structure_document(P)
    results.add_check(jacobi_check(P, seed=config.seed))
    casimir_results = [is_casimir(P, F, seed=config.seed) for F in P.casimirs]
    results.add_check(
        CheckResult(
            name="casimirs",
            passed=all(casimir_results),
            exact=all(result.exact for result in casimir_results),
            detail={"failing": [i for i, result in enumerate(casimir_results) if not result]},
        )
    )

    if config.scenario in EXPECTED_CONSTANTS:
        reference = build_structure(config, k="1")
        built = build_flaschka_ratiu(reference.chart, reference.casimirs, 1)
        verdict = compare_conformal(built, reference)
        expected = EXPECTED_CONSTANTS[config.scenario]
        results.add_check(
            CheckResult(
                name="proportionality",
                passed=isinstance(verdict, ProportionalByConstant) and verdict.ratio == expected,
                exact=True,
                detail={"verdict": str(verdict), "expected": expected},
            ),
            proportionality_constant=getattr(verdict, "ratio", None),
        )

    _check_stratification(results, P, config)

    if config.scenario.startswith("fold"):
        if P.k.is_exact and P.k.polynomial.is_constant:
            results.add_check(sl2_check(P, normalize=True))
            signature = killing_signature(P)
            results.add_check(
                CheckResult(name="killing_signature", passed=signature == (2, 1, 0), exact=True),
                signature=signature,
            )
        if config.scenario == "fold-nonorientable":
            results.add_check(certify_involution_symmetric(P.chart, P.k, seed=config.seed))
        for g, h in config.involution_pairs:
            results.add_check(
                involution_poisson_check(P, g, h, seed=config.seed),
                name=f"involution[{g},{h}]",
            )

    if config.random_cases:
        _random_construction_suite(results, config)
    return results


def _flow_specs(config):
    flows = config.flows if config.flows is not None else [DEFAULT_FLOWS.get(config.scenario)]
    specs = []
    for flow in flows:
        if flow is None:
            continue
        if not isinstance(flow, dict) or not {"h", "x0"} <= set(flow):
            raise ScenarioError(f"A flow needs 'h' and 'x0', got {flow!r}")
        specs.append(
            FlowSpec(
                str(flow["h"]),
                parse_point(flow["x0"]),
                float(parse_number(flow.get("T", 1))),
                float(parse_number(flow.get("step", DEFAULT_STEP))),
            )
        )
    return specs


def run_flow(config):
    results = RunResults("flow", config.scenario, config.seed)
    P = build_structure(config)
    for index, spec in enumerate(_flow_specs(config)):
        trajectory = integrate_hamiltonian(
            P,
            parse_polynomial(spec.h, P.chart.names),
            spec.x0,
            spec.T,
            StepPolicy(step=spec.step),
            label=f"h={spec.h}",
            progress=_progress(),
        )
        casimir_names = tuple(f"F{a + 1}" for a in range(len(P.casimirs)))
        results.add_table(
            f"trajectory_{index}",
            ("t",) + P.chart.names + casimir_names,
            [
                (t,) + point + values
                for t, point, values in zip(
                    trajectory.times, trajectory.points, trajectory.casimir_values
                )
            ],
        )
        extra = {}
        if config.scenario == "fold-nonorientable":
            # the endpoint downstairs, in the fundamental domain of the quotient
            extra["quotient_endpoint"] = quotient_representative(trajectory.endpoint)
        results.add_check(
            CheckResult(
                name=f"flow[{index}]",
                passed=trajectory.max_drift <= DRIFT_TOLERANCE,
                exact=False,
                residual=trajectory.max_drift,
                detail={
                    "h": spec.h,
                    "endpoint": trajectory.endpoint,
                    "time": trajectory.times[-1],
                    "events": [event.kind for event in trajectory.events],
                },
            ),
            drift=trajectory.drift,
            **extra,
        )
    return results


def _path(config, P):
    if not config.path:
        return None
    try:
        return RadialPath(
            tuple(float(parse_number(v)) for v in config.path["origin"]),
            tuple(float(parse_number(v)) for v in config.path["direction"]),
        )
    except KeyError as error:
        raise ScenarioError(f"A path needs 'origin' and 'direction', missing {error}") from error


def run_scaling(config):
    results = RunResults("scaling", config.scenario, config.seed)
    P = build_structure(config)
    fit = scaling_fit(P, _path(config, P), parse_radii(config.radii))
    results.documents["scaling"] = {
        "model": fit.model,
        "radii": list(fit.radii),
        "values": list(fit.values),
        "slope": fit.slope,
        "intercept": fit.intercept,
        "residual": fit.residual,
    }
    expected = EXPECTED_SLOPES.get(config.scenario)
    checked = expected is not None and P.k.is_exact and P.k.polynomial.is_constant and not config.path
    results.add_check(
        CheckResult(
            name="scaling_slope",
            passed=abs(fit.slope - expected) <= SLOPE_TOLERANCE if checked else math.isfinite(fit.slope),
            exact=False,
            residual=abs(fit.slope - expected) if checked else 0.0,
            detail={"expected": expected if checked else None},
        ),
        slope=fit.slope,
    )
    return results


def _near_symplectic_form(config):
    chart = near_symplectic_chart(_radius(config, 1))
    try:
        return build_near_symplectic(config.f, chart, config.circle_parity)
    except ValueError as error:
        if isinstance(error, PolynomialParseError):
            raise
        raise ScenarioError(str(error)) from error


def run_near_symplectic(config, command="near-symplectic"):
    results = RunResults(command, config.scenario, config.seed)
    ns = _near_symplectic_form(config)
    report = check_near_symplectic(
        ns, _grid(config, ns.chart, FOLD_GRID_COUNTS), config.threads, progress=_progress()
    )
    results.add_table(
        "near_symplectic",
        ns.chart.names + ("wedge_square", "is_zero", "omega_rank", "gradient_rank"),
        [
            entry.point
            + (
                entry.wedge_square,
                entry.is_zero,
                entry.omega_rank,
                "" if entry.gradient_rank is None else entry.gradient_rank,
            )
            for entry in report.entries
        ],
    )
    for check in report.checks:
        results.add_check(check, circle_parity=report.circle_parity)
    try:
        critical = classify_critical_point(config.f, (0, 0, 0))
    except ValueError:
        critical = None
    if critical is not None:
        results.add_check(
            CheckResult(name="morse_origin", passed=critical.morse and critical.indefinite, exact=True),
            index=critical.index,
            nullity=critical.nullity,
        )
    return results


def run_contrast(config):
    results = RunResults("contrast", config.scenario, config.seed)
    ns = _near_symplectic_form(config)
    P = build_structure(replace(config, scenario="fold"))
    table = contrast_report(ns, P, parse_radii(config.radii))
    results.add_table(
        "contrast",
        ("radius", "omega_norm", "leaf_ratio"),
        [(row.radius, row.omega_norm, row.leaf_ratio) for row in table.rows],
    )
    checked = P.k.polynomial.is_constant
    passed = (
        abs(table.omega_slope - 1) <= SLOPE_TOLERANCE and abs(table.leaf_slope + 1) <= SLOPE_TOLERANCE
        if checked
        else math.isfinite(table.omega_slope) and math.isfinite(table.leaf_slope)
    )
    results.add_check(
        CheckResult(name="contrast_slopes", passed=passed, exact=False),
        omega_slope=table.omega_slope,
        leaf_slope=table.leaf_slope,
    )
    return results


def run_all(config):
    if config.scenario in POISSON_KINDS:
        results = run_verify(config).merge(run_scaling(config))
        if config.flows or config.scenario in DEFAULT_FLOWS:
            results.merge(run_flow(config))
    elif config.scenario == "contrast":
        results = run_verify(config)
    else:
        results = run_near_symplectic(config)
    results.command = "all"
    return results


PIPELINES = {
    "verify": run_verify,
    "flow": run_flow,
    "scaling": run_scaling,
    "near-symplectic": run_near_symplectic,
    "contrast": run_contrast,
    "all": run_all,
}


def describe_outcome(results):
    passed = len(results.checks) - len(results.failed)
    failed = len(results.failed)
    return (
        f"{passed} {inflecter.plural('check', passed)} passed, "
        f"{failed} {inflecter.plural('check', failed)} failed"
    )
