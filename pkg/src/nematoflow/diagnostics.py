"""Runtime diagnostics: energy law, maximum principles, blow-up monitor.

Every quantity here mirrors a proved a priori bound of the continuous
system; the solver reports violations but never clips fields, since a
violation is exactly the signal the harness exists to detect.  The
discretization is allowed a per-step overshoot of TOL_PRINCIPLE and a
cumulative one of TOL_CUMULATIVE.
"""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .coefficients import ginzburg_landau

TOL_PRINCIPLE = 1e-8
TOL_CUMULATIVE = 1e-6
DIV_TOL = 1e-10


class PrincipleViolationError(RuntimeError):
    """Temperature fell below the floor beyond the per-step tolerance."""


@dataclass
class DiagnosticsRecord:
    """Per-step monitored quantities, one JSON object per line."""

    t: float
    total_energy: float
    dissipation: float
    kinetic: float
    thermal: float
    elastic: float
    penalty: float
    d_max_norm: float
    theta_min: float
    div_residual: float
    F_functional: float
    H_functional: float
    picard_iters: int

    def to_json(self):
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, line):
        return cls(**json.loads(line))


def _check_theta_floor(state, model):
    theta_min = float(state.theta.min())
    if theta_min < model.theta_floor - TOL_PRINCIPLE:
        raise PrincipleViolationError(
            f"min theta = {theta_min} fell below the floor {model.theta_floor}")
    return theta_min


def energy_components(grid, state, model, K):
    """The four pieces of the monitored energy; all quadratures physical."""
    _check_theta_floor(state, model)
    u_sq = np.einsum("cxyz,cxyz->xyz", state.u, state.u)
    kinetic = 0.5 * (K + 1.0) * grid.integrate(u_sq)

    lam_pot = model.capital_lambda(state.theta)
    thermal = grid.integrate((K + 1.0) * state.theta - lam_pot)

    grad_d = grid.bwd(grid.grad(grid.fwd(state.d)))
    elastic = 0.5 * grid.integrate(np.einsum("icxyz,icxyz->xyz", grad_d, grad_d))

    W, _ = ginzburg_landau(state.d)
    penalty = 0.25 * grid.integrate(W)
    return {"kinetic": kinetic, "thermal": thermal,
            "elastic": elastic, "penalty": penalty}


def total_energy(grid, state, model, K):
    """Monitored energy: kinetic + thermal potential + elastic + penalty."""
    return float(sum(energy_components(grid, state, model, K).values()))


def dissipation(grid, state, model):
    """Nonnegative dissipation density integrated over the box."""
    _check_theta_floor(state, model)
    theta = state.theta
    lam = model.lam(theta)
    lam_d1 = model.lam_d1(theta)
    mu = model.mu(theta)

    theta_hat = grid.fwd(theta)
    grad_theta = grid.bwd(grid.grad(theta_hat))
    grad_theta_sq = np.einsum("ixyz,ixyz->xyz", grad_theta, grad_theta)

    u_hat = grid.fwd(state.u)
    grad_u = grid.bwd(grid.grad(u_hat))
    sym = grad_u + np.swapaxes(grad_u, 0, 1)
    sym_sq = np.einsum("ijxyz,ijxyz->xyz", sym, sym)

    d_hat = grid.fwd(state.d)
    lap_d = grid.bwd(grid.laplacian(d_hat))
    _, pen_force = ginzburg_landau(state.d)
    relax = lap_d - pen_force
    relax_sq = np.einsum("cxyz,cxyz->xyz", relax, relax)

    density = (lam_d1 / lam**2 * grad_theta_sq
               + 0.5 * mu / lam * sym_sq
               + relax_sq)
    return float(grid.integrate(density))


def energy_balance_residual(record_prev, record_next, dt):
    """Discrete defect of dE/dt + D = 0 with midpoint dissipation."""
    dE = (record_next.total_energy - record_prev.total_energy) / dt
    mid = 0.5 * (record_prev.dissipation + record_next.dissipation)
    return dE + mid


def principle_checks(grid, state, theta_floor, tol=TOL_PRINCIPLE):
    """Director bound, temperature floor, and incompressibility flags."""
    d_max = float(np.sqrt(np.einsum("cxyz,cxyz->xyz", state.d, state.d).max()))
    theta_min = float(state.theta.min())
    div_res = grid.div_residual(grid.fwd(state.u))
    return {
        "d_ok": d_max <= 1.0 + tol,
        "theta_ok": theta_min >= theta_floor - tol,
        "div_ok": div_res < DIV_TOL,
        "margins": {
            "d_overshoot": d_max - 1.0,
            "theta_slack": theta_min - theta_floor,
            "div_residual": div_res,
        },
    }


def high_order_functionals(grid, state, d_increment=None, dt=None):
    """Growth functionals F and H built from second/third-order norms.

    F = |grad u|_{H1}^2 + |grad theta|_{H1}^2 + |lap d|_{H1}^2 + 1.
    H = |lap u|_{H1}^2 + |lap theta|_{H1}^2 + |grad lap d|_{L2}^2
        + |lap d_t|_{L2}^2, with d_t the committed increment quotient
    (zero when no increment is supplied, e.g. on the first record).
    """
    u_hat = grid.fwd(state.u)
    theta_hat = grid.fwd(state.theta)
    d_hat = grid.fwd(state.d)

    F = (grid.sobolev_norm_sq(grid.grad(u_hat), 1)
         + grid.sobolev_norm_sq(grid.grad(theta_hat), 1)
         + grid.sobolev_norm_sq(grid.laplacian(d_hat), 1)
         + 1.0)
    H = (grid.sobolev_norm_sq(grid.laplacian(u_hat), 1)
         + grid.sobolev_norm_sq(grid.laplacian(theta_hat), 1)
         + grid.sobolev_norm_sq(grid.grad(grid.laplacian(d_hat)), 0))
    if d_increment is not None:
        if dt is None or dt <= 0:
            raise ValueError("dt must accompany d_increment")
        dt_hat = grid.fwd(d_increment) / dt
        H += grid.sobolev_norm_sq(grid.laplacian(dt_hat), 0)
    return float(F), float(H)


def compute_record(grid, state, model, K, picard_iters=0, d_prev=None, dt=None):
    """Assemble the full per-step diagnostics record."""
    comps = energy_components(grid, state, model, K)
    checks = principle_checks(grid, state, model.theta_floor)
    increment = None if d_prev is None else state.d - d_prev
    F, H = high_order_functionals(grid, state, increment, dt)
    return DiagnosticsRecord(
        t=state.t,
        total_energy=float(sum(comps.values())),
        dissipation=dissipation(grid, state, model),
        kinetic=comps["kinetic"],
        thermal=comps["thermal"],
        elastic=comps["elastic"],
        penalty=comps["penalty"],
        d_max_norm=checks["margins"]["d_overshoot"] + 1.0,
        theta_min=checks["margins"]["theta_slack"] + model.theta_floor,
        div_residual=checks["margins"]["div_residual"],
        F_functional=F,
        H_functional=H,
        picard_iters=int(picard_iters),
    )


def blowup_monitor(times, F_values):
    """Advisory blow-up horizon from the Riccati-type growth bound.

    Fits the constant C in dF/dt <= C F^4 by least squares on the
    clipped ratio max(dF/dt / F^4, 0) and returns
    T* = 1 / (3 C F(0)^3).  A series that never grows yields C = 0 and
    T* = +inf.
    """
    times = np.asarray(times, dtype=float)
    F = np.asarray(F_values, dtype=float)
    if times.shape != F.shape or times.ndim != 1:
        raise ValueError("times and F_values must be 1D arrays of equal length")
    if times.size < 10:
        raise ValueError("blowup_monitor needs at least 10 samples")
    dFdt = np.gradient(F, times)
    ratios = np.clip(dFdt / F**4, 0.0, None)
    C_fit = float(ratios.mean())
    if C_fit <= 0.0:
        return {"T_star_estimate": math.inf, "C_fit": 0.0}
    return {"T_star_estimate": 1.0 / (3.0 * C_fit * F[0] ** 3), "C_fit": C_fit}
