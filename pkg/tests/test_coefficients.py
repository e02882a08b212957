import numpy as np
import pytest
from scipy.integrate import quad

from nematoflow.coefficients import (
    CoefficientBounds,
    CoefficientModel,
    capital_lambda_eval,
    default_theta_samples,
    ginzburg_landau,
    gronwall_constant_K,
    make_model,
    validate_assumptions,
)


def test_default_model_passes_validation():
    model = make_model("default")
    report = validate_assumptions(model, default_theta_samples(model.theta_floor))
    assert report.passed
    assert report.worst_margin() >= 0.0


def test_default_lambda_anchor_identities():
    model = make_model("default")
    assert model.lam(0.0) == pytest.approx(0.0, abs=1e-15)
    assert float(model.lam_d1(0.0)) == pytest.approx(1.0)  # lambda_bar * a


def test_unbounded_lambda_fails_with_named_bound():
    bar = 1.0
    model = CoefficientModel(
        name="linear-lambda",
        mu=lambda th: np.full_like(np.asarray(th, float), 0.5),
        mu_d1=lambda th: np.zeros_like(np.asarray(th, float)),
        mu_d2=lambda th: np.zeros_like(np.asarray(th, float)),
        lam=lambda th: bar * np.asarray(th, float),
        lam_d1=lambda th: np.full_like(np.asarray(th, float), bar),
        lam_d2=lambda th: np.zeros_like(np.asarray(th, float)),
        theta_floor=1.0,
        bounds=CoefficientBounds(0.5, 0.5, 0.0, 0.0, bar, bar, 0.0),
    )
    report = validate_assumptions(model, np.array([0.0, 1.0, 2.0, 50.0]))
    assert not report.passed
    failed = {c.name for c in report.failed_checks()}
    assert "lambda <= lambda_max" in failed


def test_mu_margins_by_dense_sampling():
    # Margin oracle: check (1.12)-style bounds directly on a dense grid.
    model = make_model("default")
    thetas = np.arange(0.0, 100.0, 1e-3)
    mu = model.mu(thetas)
    b = model.bounds
    assert mu.min() >= b.mu_lo
    assert mu.max() <= b.mu_hi
    assert np.abs(model.mu_d1(thetas)).max() <= b.mu_d1_max + 1e-15
    assert np.abs(model.mu_d2(thetas)).max() <= b.mu_d2_max + 1e-15


def test_validation_preconditions():
    model = make_model("default")
    with pytest.raises(ValueError):
        validate_assumptions(model, np.array([]))
    with pytest.raises(ValueError):
        validate_assumptions(model, np.array([0.0, -1.0, 1.0]))
    with pytest.raises(ValueError):
        validate_assumptions(model, np.array([1.0, 2.0]))  # missing 0


def test_capital_lambda_anchor_and_quadrature_oracle():
    model = make_model("default", theta_floor=1.0)
    assert capital_lambda_eval(model, 1.0) == pytest.approx(0.0, abs=1e-14)
    # Independent oracle: adaptive quadrature of 1/lambda on [1, 2].
    oracle, _ = quad(lambda s: 1.0 / (1.0 - np.exp(-s)), 1.0, 2.0,
                     epsabs=0.0, epsrel=1e-12)
    assert oracle == pytest.approx(1.3132616875182228, rel=1e-12)
    assert capital_lambda_eval(model, 2.0) == pytest.approx(oracle, rel=1e-10)


def test_capital_lambda_derivative_finite_difference():
    model = make_model("default", theta_floor=1.0)
    h = 1e-5
    rng = np.random.default_rng(7)
    thetas = model.theta_floor + h + rng.uniform(0.0, 20.0, size=100)
    fd = (model.capital_lambda(thetas + h) - model.capital_lambda(thetas - h)) / (2 * h)
    assert np.allclose(fd, 1.0 / model.lam(thetas), rtol=1e-6)


def test_capital_lambda_quadrature_fallback_matches_closed_form():
    closed = make_model("default", theta_floor=1.0)
    generic = CoefficientModel(
        name="default-no-closed-form",
        mu=closed.mu, mu_d1=closed.mu_d1, mu_d2=closed.mu_d2,
        lam=closed.lam, lam_d1=closed.lam_d1, lam_d2=closed.lam_d2,
        theta_floor=1.0, bounds=closed.bounds,
    )
    thetas = np.array([1.0, 1.5, 2.0, 5.0, 20.0])
    assert np.allclose(generic.capital_lambda(thetas),
                       closed.capital_lambda(thetas), rtol=1e-10, atol=1e-12)


def test_capital_lambda_below_floor_rejected():
    model = make_model("default", theta_floor=1.0)
    with pytest.raises(ValueError):
        capital_lambda_eval(model, 0.5)


def test_gronwall_constant_reciprocal():
    model = make_model("constant", params={"lambda": 0.5}, theta_floor=1.0,
                       relaxed=True)
    assert gronwall_constant_K(model) == pytest.approx(2.0)


def test_gronwall_slack_nonnegative_dense():
    model = make_model("default", theta_floor=1.0)
    K = gronwall_constant_K(model)
    thetas = np.linspace(model.theta_floor, 50.0 * model.theta_floor, 5001)
    slack = K * thetas - model.capital_lambda(thetas)
    assert slack.min() >= -1e-12
    thetas = np.linspace(model.theta_floor, 100.0, 5001)
    slack = K * thetas - model.capital_lambda(thetas)
    assert slack.min() >= -1e-12


def test_gronwall_constant_lambda_exact_slack():
    c = 0.5
    floor = 1.0
    model = make_model("constant", params={"lambda": c}, theta_floor=floor,
                       relaxed=True)
    K = gronwall_constant_K(model)
    thetas = np.linspace(floor, 10.0, 11)
    slack = K * thetas - model.capital_lambda(thetas)
    # Lambda = (theta - floor)/c, so the slack is floor/c identically.
    assert np.allclose(slack, floor / c, rtol=0, atol=1e-14)


def test_constant_model_requires_relaxed_flag():
    with pytest.raises(ValueError):
        make_model("constant")


def test_unknown_model_name():
    with pytest.raises(ValueError):
        make_model("nonsense")


def test_ginzburg_landau_point_values():
    W, f = ginzburg_landau(np.array([1.0, 0.0, 0.0]))
    assert W == pytest.approx(0.0)
    assert np.allclose(f, 0.0)

    W, f = ginzburg_landau(np.array([0.0, 0.0, 0.0]))
    assert W == pytest.approx(1.0)
    assert np.allclose(f, 0.0)

    W, f = ginzburg_landau(np.array([2.0, 0.0, 0.0]))
    assert W == pytest.approx(9.0)
    assert np.allclose(f, [6.0, 0.0, 0.0])


def test_ginzburg_landau_force_is_gradient_of_quarter_energy():
    # Oracle: central finite difference of W/4 component by component.
    rng = np.random.default_rng(11)
    h = 1e-6
    for _ in range(100):
        d = rng.uniform(-1.0, 1.0, size=3)
        d *= rng.uniform(0.0, 2.0) / max(np.linalg.norm(d), 1e-9)
        _, f = ginzburg_landau(d)
        for i in range(3):
            dp, dm = d.copy(), d.copy()
            dp[i] += h
            dm[i] -= h
            Wp, _ = ginzburg_landau(dp)
            Wm, _ = ginzburg_landau(dm)
            fd = (Wp - Wm) / (8 * h)
            assert abs(f[i] - fd) < 1e-8


def test_ginzburg_landau_field_shapes():
    d = np.zeros((3, 4, 4, 4))
    d[0] = 1.0
    W, f = ginzburg_landau(d)
    assert W.shape == (4, 4, 4)
    assert f.shape == d.shape
    assert np.all(W == 0.0)
