"""Temperature-dependent material coefficients and derived quantities.

A :class:`CoefficientModel` bundles the viscosity mu(theta), the elastic
coupling lambda(theta), their first two derivatives, and the potential
Lambda(theta) solving Lambda' = 1/lambda with Lambda(theta_floor) = 0.
The built-in families are the smallest smooth choices satisfying the
admissibility bounds; a constant-coefficient family is available behind
a relaxed-validation flag for oracle comparisons only.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad


@dataclass(frozen=True)
class CoefficientBounds:
    """Admissibility constants for the material functions."""

    mu_lo: float
    mu_hi: float
    mu_d1_max: float
    mu_d2_max: float
    lambda_max: float
    lambda_d1_max: float
    lambda_d2_max: float

    def __post_init__(self):
        for name in ("mu_lo", "mu_hi", "lambda_max"):
            if getattr(self, name) <= 0:
                raise ValueError(f"bound {name} must be positive")
        for name in ("mu_d1_max", "mu_d2_max", "lambda_d1_max", "lambda_d2_max"):
            if getattr(self, name) < 0:
                raise ValueError(f"bound {name} must be nonnegative")


@dataclass(frozen=True)
class CoefficientModel:
    """Material coefficient set with validated admissibility bounds.

    All callables are vectorized over numpy arrays.  ``capital_lambda``
    may be None, in which case evaluation falls back to adaptive
    quadrature of 1/lambda from ``theta_floor``.  Instances are
    immutable and safe to share across threads.
    """

    name: str
    mu: callable
    mu_d1: callable
    mu_d2: callable
    lam: callable
    lam_d1: callable
    lam_d2: callable
    theta_floor: float
    bounds: CoefficientBounds
    capital_lambda: callable = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.theta_floor <= 0:
            raise ValueError("theta_floor must be positive")
        if self.capital_lambda is None:
            object.__setattr__(self, "capital_lambda", _quadrature_lambda(self))


@dataclass(frozen=True)
class CheckResult:
    name: str
    margin: float
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking a model against the admissibility bounds."""

    checks: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failed_checks(self):
        return [c for c in self.checks if not c.passed]

    def worst_margin(self):
        return min(c.margin for c in self.checks)

    def as_dict(self):
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "margin": c.margin, "passed": c.passed}
                for c in self.checks
            ],
        }


def _quadrature_lambda(model):
    """Build Lambda by adaptive quadrature of 1/lambda from the floor."""

    floor = model.theta_floor

    def one(theta):
        if theta == floor:
            return 0.0
        val, _ = quad(lambda s: 1.0 / model.lam(s), floor, theta,
                      epsabs=0.0, epsrel=1e-12, limit=200)
        return val

    def capital_lambda(theta):
        arr = np.asarray(theta, dtype=float)
        if arr.ndim == 0:
            return one(float(arr))
        return np.vectorize(one)(arr)

    return capital_lambda


def make_model(name, params=None, theta_floor=1.0, relaxed=False):
    """Construct a named coefficient model.

    Known names: "default" (saturating-exponential lambda, decaying mu,
    closed-form Lambda) and "constant" (mu, lambda constant; violates
    lambda(0) = 0, so it requires relaxed=True and is for test oracles
    only).  Unless relaxed, the model is validated on a dense theta grid
    covering [0, 100] and construction fails on any violated bound.
    """

    params = dict(params or {})
    if name == "default":
        model = _default_model(params, theta_floor)
    elif name == "constant":
        if not relaxed:
            raise ValueError(
                "constant-coefficient model violates lambda(0) = 0; "
                "pass relaxed=True (test use only)")
        model = _constant_model(params, theta_floor)
    else:
        raise ValueError(f"unknown coefficient model '{name}'")

    if not relaxed:
        report = validate_assumptions(model, default_theta_samples(theta_floor))
        if not report.passed:
            bad = ", ".join(c.name for c in report.failed_checks())
            raise ValueError(f"model '{name}' violates bounds: {bad}")
    return model


def default_theta_samples(theta_floor=1.0):
    """Dense validation grid on [0, 100] including 0 and the floor."""

    grid = np.concatenate((
        [0.0, 1e-6, theta_floor],
        np.linspace(1e-3, 100.0, 4001),
    ))
    return np.unique(grid)


def _default_model(params, theta_floor):
    lam_bar = float(params.pop("lambda_bar", 1.0))
    a = float(params.pop("a", 1.0))
    mu_lo = float(params.pop("mu_lo", 0.1))
    mu_hi = float(params.pop("mu_hi", 1.0))
    if params:
        raise ValueError(f"unknown model parameters: {sorted(params)}")
    if lam_bar <= 0 or a <= 0 or not 0 < mu_lo <= mu_hi:
        raise ValueError("default model needs lambda_bar, a > 0 and 0 < mu_lo <= mu_hi")
    dmu = mu_hi - mu_lo

    # Closed-form antiderivative of 1/lambda: (theta + log(1-e^{-a theta})/a)/lam_bar
    def primitive(theta):
        theta = np.asarray(theta, dtype=float)
        return (theta + np.log1p(-np.exp(-a * theta)) / a) / lam_bar

    anchor = primitive(theta_floor)

    return CoefficientModel(
        name="default",
        mu=lambda th: mu_lo + dmu * np.exp(-np.asarray(th, dtype=float)),
        mu_d1=lambda th: -dmu * np.exp(-np.asarray(th, dtype=float)),
        mu_d2=lambda th: dmu * np.exp(-np.asarray(th, dtype=float)),
        lam=lambda th: lam_bar * (-np.expm1(-a * np.asarray(th, dtype=float))),
        lam_d1=lambda th: lam_bar * a * np.exp(-a * np.asarray(th, dtype=float)),
        lam_d2=lambda th: -lam_bar * a * a * np.exp(-a * np.asarray(th, dtype=float)),
        theta_floor=theta_floor,
        bounds=CoefficientBounds(
            mu_lo=mu_lo, mu_hi=mu_hi, mu_d1_max=dmu, mu_d2_max=dmu,
            lambda_max=lam_bar, lambda_d1_max=lam_bar * a,
            lambda_d2_max=lam_bar * a * a,
        ),
        capital_lambda=lambda th: primitive(th) - anchor,
        params={"lambda_bar": lam_bar, "a": a, "mu_lo": mu_lo, "mu_hi": mu_hi},
    )


def _constant_model(params, theta_floor):
    c_mu = float(params.pop("mu", 0.5))
    c_lam = float(params.pop("lambda", 0.5))
    if params:
        raise ValueError(f"unknown model parameters: {sorted(params)}")
    if c_mu <= 0 or c_lam <= 0:
        raise ValueError("constant model needs mu, lambda > 0")

    def const(value):
        return lambda th: np.full_like(np.asarray(th, dtype=float), value)

    return CoefficientModel(
        name="constant",
        mu=const(c_mu), mu_d1=const(0.0), mu_d2=const(0.0),
        lam=const(c_lam), lam_d1=const(0.0), lam_d2=const(0.0),
        theta_floor=theta_floor,
        bounds=CoefficientBounds(
            mu_lo=c_mu, mu_hi=c_mu, mu_d1_max=0.0, mu_d2_max=0.0,
            lambda_max=c_lam, lambda_d1_max=0.0, lambda_d2_max=0.0,
        ),
        capital_lambda=lambda th: (np.asarray(th, dtype=float) - theta_floor) / c_lam,
        params={"mu": c_mu, "lambda": c_lam},
    )


def validate_assumptions(model, theta_samples):
    """Check every admissibility inequality over the sample grid.

    Returns a :class:`ValidationReport` with one worst-case margin per
    inequality; the report passes iff all margins are >= 0, lambda(0)
    vanishes to 1e-12 absolute, and lambda'(0) is strictly positive.
    """

    samples = np.asarray(theta_samples, dtype=float)
    if samples.size == 0:
        raise ValueError("theta_samples must be nonempty")
    if np.any(samples < 0):
        raise ValueError("theta_samples must be nonnegative temperatures")
    if not np.any(samples == 0.0):
        raise ValueError("theta_samples must include 0")
    if not np.any(np.abs(samples - model.theta_floor) <= 1e-12):
        raise ValueError("theta_samples must include theta_floor")

    b = model.bounds
    lam = np.asarray(model.lam(samples), dtype=float)
    lam1 = np.asarray(model.lam_d1(samples), dtype=float)
    lam2 = np.asarray(model.lam_d2(samples), dtype=float)
    mu = np.asarray(model.mu(samples), dtype=float)
    mu1 = np.asarray(model.mu_d1(samples), dtype=float)
    mu2 = np.asarray(model.mu_d2(samples), dtype=float)

    lam_at_0 = float(model.lam(0.0))
    lam_d1_at_0 = float(model.lam_d1(0.0))

    checks = [
        CheckResult("lambda(0) = 0", 1e-12 - abs(lam_at_0),
                    abs(lam_at_0) <= 1e-12),
        CheckResult("lambda'(0) > 0", lam_d1_at_0, lam_d1_at_0 > 0.0),
        CheckResult("lambda' >= 0", float(lam1.min()), lam1.min() >= 0.0),
        CheckResult("lambda' <= lambda_d1_max",
                    float(b.lambda_d1_max - lam1.max()),
                    lam1.max() <= b.lambda_d1_max),
        CheckResult("lambda <= lambda_max",
                    float(b.lambda_max - lam.max()),
                    lam.max() <= b.lambda_max),
        CheckResult("|lambda''| <= lambda_d2_max",
                    float(b.lambda_d2_max - np.abs(lam2).max()),
                    np.abs(lam2).max() <= b.lambda_d2_max),
        CheckResult("mu >= mu_lo", float(mu.min() - b.mu_lo),
                    mu.min() >= b.mu_lo),
        CheckResult("mu <= mu_hi", float(b.mu_hi - mu.max()),
                    mu.max() <= b.mu_hi),
        CheckResult("|mu'| <= mu_d1_max",
                    float(b.mu_d1_max - np.abs(mu1).max()),
                    np.abs(mu1).max() <= b.mu_d1_max),
        CheckResult("|mu''| <= mu_d2_max",
                    float(b.mu_d2_max - np.abs(mu2).max()),
                    np.abs(mu2).max() <= b.mu_d2_max),
    ]
    return ValidationReport(checks=tuple(checks))


def capital_lambda_eval(model, theta):
    """Evaluate Lambda(theta), the anchored antiderivative of 1/lambda.

    Only defined for theta >= theta_floor, where Lambda(theta_floor) = 0.
    """

    arr = np.asarray(theta, dtype=float)
    if np.any(arr < model.theta_floor):
        raise ValueError("capital_lambda_eval requires theta >= theta_floor")
    out = model.capital_lambda(arr)
    return float(out) if arr.ndim == 0 else out


def gronwall_constant_K(model):
    """Reciprocal of lambda at the temperature floor.

    With lambda nondecreasing this K satisfies K*theta - Lambda(theta) >= 0
    for theta >= theta_floor, which a sampling check asserts.
    """

    lam_floor = float(model.lam(model.theta_floor))
    if lam_floor <= 0:
        raise ValueError("lambda(theta_floor) <= 0: invalid coefficient model")
    K = 1.0 / lam_floor
    thetas = np.linspace(model.theta_floor, max(100.0, 100.0 * model.theta_floor), 257)
    slack = K * thetas - model.capital_lambda(thetas)
    if slack.min() < -1e-12:
        raise ValueError("K*theta - Lambda(theta) < 0: invalid coefficient model")
    return K


def ginzburg_landau(d):
    """Penalty energy density W = (|d|^2-1)^2 and force f = (|d|^2-1) d.

    ``d`` has the 3 director components on its leading axis; W comes
    back without that axis, f with it.  f is the gradient of W/4.
    """

    d = np.asarray(d, dtype=float)
    if d.shape[0] != 3:
        raise ValueError("director value must have 3 components on axis 0")
    excess = np.sum(d * d, axis=0) - 1.0
    return excess**2, excess * d
