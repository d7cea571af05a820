import math

import numpy as np
import pytest

from foliation_forge.brackets import build_flaschka_ratiu
from foliation_forge.errors import LiftError, SingularPointError
from foliation_forge.leaves import (
    LeafFrame,
    RadialPath,
    StepPolicy,
    anchor_kernel,
    anchor_matrix,
    area_form_ratio,
    casimir_critical,
    covector_lift,
    frames_agree,
    integrate_hamiltonian,
    leaf_form,
    leaf_frame,
    reference_frame,
    scaling_fit,
)
from foliation_forge.models import fold_model, lefschetz_model, singular_distance

FACTORS = ("1", "1 + x1^2")


def plane(u, v):
    return LeafFrame((), tuple(u), tuple(v))


@pytest.mark.parametrize(
    "q, u, v",
    [((1, 0, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)), ((0, 0, 1, 0), (1, 0, 0, 0), (0, 1, 0, 0))],
)
def test_lefschetz_frames(lefschetz, q, u, v):
    assert frames_agree(leaf_frame(lefschetz, q), plane(u, v))


def test_fold_frame(fold):
    assert frames_agree(leaf_frame(fold, (0, 1, 0, 0)), plane((0, 0, 1, 0), (0, 0, 0, 1)))


def test_frames_are_orthonormal_and_positive(lefschetz, rng):
    for q in lefschetz.chart.sample(rng, 50, margin=0.1):
        frame = leaf_frame(lefschetz, q)
        u, v = np.array(frame.u), np.array(frame.v)
        assert np.allclose([u @ u, v @ v, u @ v], [1, 1, 0], atol=1e-12)
        assert frame.residual <= 1e-10
        assert leaf_form(lefschetz, q, u, v) > 0


def test_covector_lifts(lefschetz):
    q = (1, 0, 0, 0)
    assert np.allclose(covector_lift(lefschetz, q, (0, 0, 1, 0)), (0, 0, 0, 1))
    assert np.allclose(covector_lift(lefschetz, q, (0, 0, 0, 1)), (0, 0, -1, 0))
    assert np.allclose(covector_lift(lefschetz, q, (0, 0, 0, 0)), 0)


def test_vectors_off_the_leaf_have_no_lift(lefschetz):
    with pytest.raises(LiftError):
        covector_lift(lefschetz, (1, 0, 0, 0), (1, 0, 0, 0))


def test_leaf_form_examples(lefschetz, fold):
    q = (1, 0, 0, 0)
    assert leaf_form(lefschetz, q, (0, 0, 1, 0), (0, 0, 0, 1)) == pytest.approx(1.0)
    assert leaf_form(lefschetz, q, (0, 0, 0, 1), (0, 0, 1, 0)) == pytest.approx(-1.0)
    assert leaf_form(lefschetz, q, (0, 0, 1, 0), (0, 0, 1, 0)) == pytest.approx(0.0)
    assert area_form_ratio(fold, (0.0, 0, 3, 4)) == pytest.approx(0.2)


@pytest.mark.parametrize(
    "model, q, expected",
    [
        ("lefschetz", (1, 0, 0, 0), 1.0),
        ("lefschetz", (0, 0, 1, 0), 1.0),
        ("lefschetz", (1, 0, 2, 0), 0.2),
        ("fold", (0, 1, 0, 0), 1.0),
        ("fold", (1.5, -1, 0, 0), 1.0),
        ("fold", (0, 0, 3, 4), 0.2),
    ],
)
def test_area_form_ratio_examples(lefschetz, fold, model, q, expected):
    P = lefschetz if model == "lefschetz" else fold
    assert area_form_ratio(P, q) == pytest.approx(expected, rel=1e-12)


def test_leaf_computations_refuse_singular_points(lefschetz, fold):
    with pytest.raises(SingularPointError):
        area_form_ratio(lefschetz, (0, 0, 0, 0))
    with pytest.raises(SingularPointError):
        leaf_frame(fold, (1.0, 0, 0, 0))


@pytest.mark.parametrize("k", FACTORS)
def test_lefschetz_ratio_law(rng, k):
    P = lefschetz_model(k)
    distance = singular_distance(P)
    checked = 0
    for q in P.chart.sample(rng, 1000):
        if distance(q) < 0.05:
            continue
        expected = 1 / (float(P.k(q)) * sum(c**2 for c in q))
        assert area_form_ratio(P, q) == pytest.approx(expected, rel=1e-9)
        checked += 1
    assert checked > 900


@pytest.mark.parametrize("k", FACTORS)
def test_fold_ratio_law(rng, k):
    P = fold_model(k)
    distance = singular_distance(P)
    for q in P.chart.sample(rng, 1000):
        if distance(q) < 0.05:
            continue
        expected = 1 / (float(P.k(q)) * distance(q))
        assert area_form_ratio(P, q) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("model", ["lefschetz", "fold"])
def test_reference_frames(lefschetz, fold, rng, model):
    P = lefschetz if model == "lefschetz" else fold
    points = P.chart.sample(rng, 200, margin=0.05)
    points += [(0.0, 0.0, 1.0, 0.5) if model == "lefschetz" else (0.5, -1.0, 0, 0)]
    for q in points:
        if singular_distance(P)(q) < 0.05:
            continue
        reference = reference_frame(P, q)
        assert frames_agree(reference, leaf_frame(P, q), tolerance=1e-9)
        target = reference.u if reference.lifted == "u" else reference.v
        assert np.allclose(anchor_matrix(P, q) @ np.array(reference.lift), target, atol=1e-9)
        assert reference.value == pytest.approx(area_form_ratio(P, q), rel=1e-9)


def test_reference_frame_needs_a_model(chart4):
    P = build_flaschka_ratiu(chart4, ["x1", "x2"])
    with pytest.raises(ValueError):
        reference_frame(P, (0.1, 0.2, 0.3, 0.4))


def test_leaf_form_ignores_the_choice_of_lift(lefschetz, rng):
    trials = 0
    while trials < 500:
        q = lefschetz.chart.sample(rng, 1)[0]
        if math.dist(q, (0, 0, 0, 0)) < 0.05:
            continue
        frame = leaf_frame(lefschetz, q)
        kernel = anchor_kernel(lefschetz, q)
        assert kernel.shape == (2, 4)
        alpha = covector_lift(lefschetz, q, frame.u) + rng.normal(size=2) @ kernel
        beta = covector_lift(lefschetz, q, frame.v) + rng.normal(size=2) @ kernel
        expected = leaf_form(lefschetz, q, frame.u, frame.v)
        assert leaf_form(lefschetz, q, frame.u, frame.v, alpha, beta) == pytest.approx(
            expected, rel=1e-10
        )
        trials += 1


def test_casimirs_critical_only_on_the_singular_set(lefschetz, fold):
    assert casimir_critical(lefschetz, (0, 0, 0, 0))
    assert not casimir_critical(lefschetz, (0.3, 0, 0, 0))
    assert casimir_critical(fold, (2.0, 0, 0, 0))
    assert not casimir_critical(fold, (2.0, 0, 0.1, 0))


@pytest.mark.parametrize("model, slope", [("lefschetz", -2.0), ("fold", -1.0)])
def test_scaling_slopes(lefschetz, fold, model, slope):
    P = lefschetz if model == "lefschetz" else fold
    fit = scaling_fit(P)
    assert fit.slope == pytest.approx(slope, abs=1e-6)
    assert fit.residual <= 1e-6
    assert list(fit.radii) == sorted(fit.radii, reverse=True)


def test_constant_structure_does_not_scale(chart4):
    P = build_flaschka_ratiu(chart4, ["x1", "x2"])
    fit = scaling_fit(P, radii=[0.5, 0.1, 0.01])
    assert fit.slope == pytest.approx(0.0, abs=1e-9)
    assert fit.values == pytest.approx((1.0, 1.0, 1.0))


def test_scaling_along_a_custom_path(lefschetz):
    path = RadialPath((0.0, 0.0, 0.0, 0.0), (1.0, 1.0, 0.0, 0.0))
    assert scaling_fit(lefschetz, path, [0.1, 0.01]).slope == pytest.approx(-2.0, abs=1e-6)


@pytest.mark.parametrize("radii", [[0.1], [0.1, -0.1], [0.1, 0.1], [0.1, 0.0]])
def test_scaling_rejects_bad_radii(lefschetz, radii):
    with pytest.raises(ValueError):
        scaling_fit(lefschetz, radii=radii)


def test_radial_path_needs_a_direction():
    with pytest.raises(ValueError):
        RadialPath((0.0, 0.0), (0.0, 0.0)).point(1.0)


def test_fold_flow_is_hyperbolic(fold):
    trajectory = integrate_hamiltonian(fold, "x3", (0, 1, 0, 0), 1.0)
    _, x1, x2, x3 = trajectory.endpoint
    assert (x1, x2, x3) == pytest.approx((math.cosh(1.0), math.sinh(1.0), 0.0), abs=1e-6)
    assert trajectory.times[-1] == 1.0
    assert trajectory.max_drift <= 1e-8
    assert trajectory.events == ()


def test_flow_of_a_casimir_stands_still(fold):
    x0 = (0.5, 1.0, 0.5, -0.5)
    trajectory = integrate_hamiltonian(fold, "-x1^2 + x2^2 + x3^2", x0, 0.1)
    assert all(point == pytest.approx(x0) for point in trajectory.points)


def test_zero_time_flow(fold):
    trajectory = integrate_hamiltonian(fold, "x3", (0, 1, 0, 0), 0)
    assert trajectory.times == (0.0,)
    assert len(trajectory.points) == 1
    assert trajectory.max_drift == 0


def test_flow_arguments_are_checked(fold):
    with pytest.raises(ValueError):
        integrate_hamiltonian(fold, "x3", (0, 1, 0, 0), -1.0)
    with pytest.raises(ValueError):
        integrate_hamiltonian(fold, "x3", (0, 3, 0, 0), 1.0)


def test_flow_stops_at_the_chart_boundary(fold):
    trajectory = integrate_hamiltonian(fold, "x3", (0, 1, 0, 0), 3.0)
    (event,) = trajectory.events
    assert event.kind == "BoundaryExit"
    assert event.time == pytest.approx(math.acosh(2.0), abs=2e-3)
    assert all(fold.chart.contains(point) for point in trajectory.points)


def test_step_is_halved_as_the_bivector_grows(fold):
    policy = StepPolicy(step=1e-2, growth_limit=1.2)
    trajectory = integrate_hamiltonian(fold, "x3", (0, 1, 0, 0), 1.0, policy=policy)
    steps = np.diff(trajectory.times)
    assert steps[0] == pytest.approx(1e-2)
    assert steps[-1] < 1e-2
    assert trajectory.times[-1] == 1.0


def test_lefschetz_flow_keeps_its_casimirs(lefschetz):
    trajectory = integrate_hamiltonian(lefschetz, "x1", (0.5, 0.2, 0.3, 0.1), 0.5, label="x1-flow")
    assert trajectory.label == "x1-flow"
    assert trajectory.events == ()
    assert trajectory.max_drift <= 1e-8
