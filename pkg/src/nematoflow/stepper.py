"""One time step of the coupled velocity-temperature-director system.

A step is the fixed point of the composed map: given a velocity
iterate, relax the director, then the temperature, then recover the
velocity from the Leray-projected momentum equation, and repeat until
the velocity iterate stops moving.  Diffusion is treated implicitly
with a constant coefficient (the spatial minimum of the viscosity for
the momentum equation), everything else explicitly; products are
dealiased by the 2/3 rule.  Pressure is diagnostic, recovered from the
divergence of the momentum equation after the step commits.
"""

from dataclasses import dataclass, field

import numpy as np

from .coefficients import ginzburg_landau

_SPLITTINGS = ("imex", "fully-explicit")
_ADVECTION_FORMS = ("convective", "skew")


class PicardConvergenceError(RuntimeError):
    """Fixed-point iteration failed; carries the residual history."""

    def __init__(self, residual_history):
        self.residual_history = list(residual_history)
        super().__init__(
            f"picard iteration did not converge in {len(self.residual_history)} "
            f"iterations (last residual {self.residual_history[-1]:.3e})")


@dataclass
class StepConfig:
    dt: float
    picard_tol: float = 1e-10
    picard_max: int = 50
    splitting: str = "imex"
    dealias_on: bool = True
    cubic_dealias: bool = False   # 1/2-rule masks instead of 2/3
    advection: str = "convective"

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not 0.0 < self.picard_tol < 1.0:
            raise ValueError("picard_tol must lie in (0, 1)")
        if self.picard_max < 1:
            raise ValueError("picard_max must be >= 1")
        if self.splitting not in _SPLITTINGS:
            raise ValueError(f"splitting must be one of {_SPLITTINGS}")
        if self.advection not in _ADVECTION_FORMS:
            raise ValueError(f"advection must be one of {_ADVECTION_FORMS}")


@dataclass
class State:
    """Physical-space snapshot (u, theta, d, p) at time t.

    Physical arrays are the canonical storage: snapshots serialize them
    bit-exactly, so a resumed run replays the identical float sequence.
    """

    u: np.ndarray
    theta: np.ndarray
    d: np.ndarray
    p: np.ndarray
    t: float

    def __post_init__(self):
        shape = self.theta.shape
        if len(shape) != 3 or len(set(shape)) != 1:
            raise ValueError("theta must be a cubic (n, n, n) array")
        if self.u.shape != (3,) + shape or self.d.shape != (3,) + shape:
            raise ValueError("u and d must be (3, n, n, n) arrays on the same grid")
        if self.p.shape != shape:
            raise ValueError("p must match theta's shape")

    @property
    def n(self):
        return self.theta.shape[0]

    def copy(self):
        return State(self.u.copy(), self.theta.copy(), self.d.copy(),
                     self.p.copy(), self.t)

    @classmethod
    def rest(cls, grid, theta_floor):
        shape = (grid.n,) * 3
        d = np.zeros((3,) + shape)
        d[0] = 1.0
        return cls(u=np.zeros((3,) + shape), theta=np.full(shape, theta_floor),
                   d=d, p=np.zeros(shape), t=0.0)


def _dealias(grid, config, f_hat):
    if not config.dealias_on:
        return f_hat
    return grid.dealias(f_hat, "1/2" if config.cubic_dealias else "2/3")


def _advect(grid, config, v_phys, f_hat):
    """Spectral v.grad(f) for scalar or 3-component f, dealiased."""
    df = grid.bwd(grid.grad(f_hat))
    if f_hat.ndim == 3:
        conv = np.einsum("ixyz,ixyz->xyz", v_phys, df)
    else:
        conv = np.einsum("ixyz,icxyz->cxyz", v_phys, df)
    conv_hat = grid.fwd(conv)
    if config.advection == "skew":
        f_phys = grid.bwd(f_hat)
        if f_hat.ndim == 3:
            flux = grid.fwd(v_phys * f_phys)
            conv_hat = 0.5 * (conv_hat + grid.div(flux))
        else:
            flux = grid.fwd(v_phys[:, None] * f_phys[None, :])
            conv_hat = 0.5 * (conv_hat + grid.div(flux))
    return _dealias(grid, config, conv_hat)


def _grad_tensor(grid, v_hat):
    """Physical Jacobian, indexed [i, j] = d_i v_j."""
    return grid.bwd(grid.grad(v_hat))


def _tensor_div(grid, t_hat):
    """(div T)_j = sum_i d_i T_ij for a spectral (3, 3, ...) tensor."""
    return (1j * grid.kx * t_hat[0]
            + 1j * grid.ky * t_hat[1]
            + 1j * grid.kz * t_hat[2])


def _elastic_stress(lam_phys, grad_d):
    """sigma = -lambda(theta) grad d (dyadic) grad d, a symmetric tensor."""
    dd = np.einsum("icxyz,jcxyz->ijxyz", grad_d, grad_d)
    return -lam_phys * dd


def director_substep(grid, d_hat, v_hat, dt, config, forcing=None):
    """Advance the director by transport, diffusion, and norm penalty.

    Diffusion is implicit (exact mode-wise Helmholtz solve); advection
    and the penalty force are explicit and dealiased.
    """
    v_phys = grid.bwd(v_hat)
    adv_hat = _advect(grid, config, v_phys, d_hat)
    _, penalty = ginzburg_landau(grid.bwd(d_hat))
    pen_hat = _dealias(grid, config, grid.fwd(penalty))
    rhs = d_hat - dt * (adv_hat + pen_hat)
    if forcing is not None:
        rhs = rhs + dt * grid.fwd(forcing)
    if config.splitting == "imex":
        return rhs / (1.0 + dt * grid.k2)
    return rhs - dt * grid.k2 * d_hat


def temperature_substep(grid, theta_hat, v_hat, d_hat, model, dt, config,
                        forcing=None):
    """Advance the temperature with viscous and elastic stress heating."""
    v_phys = grid.bwd(v_hat)
    theta_phys = grid.bwd(theta_hat)
    adv_hat = _advect(grid, config, v_phys, theta_hat)

    grad_v = _grad_tensor(grid, v_hat)
    sym = grad_v + np.swapaxes(grad_v, 0, 1)
    sym_sq = np.einsum("ijxyz,ijxyz->xyz", sym, sym)
    grad_d = _grad_tensor(grid, d_hat)
    elastic_power = np.einsum("icxyz,jcxyz,ijxyz->xyz", grad_d, grad_d, grad_v)
    heat = (0.5 * model.mu(theta_phys) * sym_sq
            - model.lam(theta_phys) * elastic_power)

    rhs = theta_hat - dt * adv_hat + dt * _dealias(grid, config, grid.fwd(heat))
    if forcing is not None:
        rhs = rhs + dt * grid.fwd(forcing)
    if config.splitting == "imex":
        return rhs / (1.0 + dt * grid.k2)
    return rhs - dt * grid.k2 * theta_hat


def velocity_substep(grid, u_hat, theta_hat, d_hat, model, dt, config,
                     forcing=None):
    """Advance the velocity; output is Leray-projected hence solenoidal.

    The implicit diffusion coefficient is the spatial minimum of the
    viscosity; the variable remainder and the elastic stress divergence
    are explicit.
    """
    theta_phys = grid.bwd(theta_hat)
    mu_phys = model.mu(theta_phys)
    lam_phys = model.lam(theta_phys)
    mu0 = float(np.min(mu_phys)) if config.splitting == "imex" else 0.0

    u_phys = grid.bwd(u_hat)
    adv_hat = _advect(grid, config, u_phys, u_hat)

    grad_u = _grad_tensor(grid, u_hat)
    sym = grad_u + np.swapaxes(grad_u, 0, 1)
    stress = (mu_phys - mu0) * sym + _elastic_stress(lam_phys, _grad_tensor(grid, d_hat))
    stress_hat = _dealias(grid, config, grid.fwd(stress))

    rhs_hat = -adv_hat + _tensor_div(grid, stress_hat)
    if forcing is not None:
        rhs_hat = rhs_hat + grid.fwd(forcing)
    rhs_hat = grid.leray(rhs_hat)

    if config.splitting == "imex":
        u_star = (u_hat + dt * rhs_hat) / (1.0 + dt * mu0 * grid.k2)
    else:
        u_star = u_hat + dt * rhs_hat
    return grid.leray(u_star)


def pressure_hat(grid, u_hat, theta_hat, d_hat, model, config):
    """Zero-mean spectral pressure from the momentum divergence."""
    theta_phys = grid.bwd(theta_hat)
    grad_u = _grad_tensor(grid, u_hat)
    sym = grad_u + np.swapaxes(grad_u, 0, 1)
    stress = (model.mu(theta_phys) * sym
              + _elastic_stress(model.lam(theta_phys), _grad_tensor(grid, d_hat)))
    stress_hat = _dealias(grid, config, grid.fwd(stress))
    kvec = (grid.kx, grid.ky, grid.kz)
    div_div = -sum(kvec[i] * kvec[j] * stress_hat[i, j]
                   for i in range(3) for j in range(3))
    adv_hat = _advect(grid, config, grid.bwd(u_hat), u_hat)
    rhs = div_div - grid.div(adv_hat)
    p_hat = -rhs * grid.inv_k2
    return p_hat


def pressure_solve(grid, state, model, config=None):
    """Physical-space pressure field for a committed state."""
    config = config or StepConfig(dt=1.0)
    p_hat = pressure_hat(grid, grid.fwd(state.u), grid.fwd(state.theta),
                         grid.fwd(state.d), model, config)
    return grid.bwd(p_hat)


def picard_advance(grid, state, model, config, forcing=None):
    """Advance one step; returns (new_state, iterations, residual_history).

    The velocity iterate starts at the old velocity; each pass re-solves
    the director and temperature substeps from the old state with the
    current iterate, then updates the velocity.  Convergence is relative
    in L2.  In "fully-explicit" splitting a single pass is committed.

    Raises PicardConvergenceError when the tolerance is not met within
    picard_max iterations; callers may halve dt and retry.
    """
    forces = forcing(state.t) if forcing is not None else {}
    f_u = forces.get("u")
    f_theta = forces.get("theta")
    f_d = forces.get("d")

    u0_hat = grid.fwd(state.u)
    theta0_hat = grid.fwd(state.theta)
    d0_hat = grid.fwd(state.d)

    v_hat = u0_hat
    residuals = []
    d_hat = d0_hat
    theta_hat = theta0_hat
    converged = False
    iterations = 0
    for _ in range(config.picard_max):
        d_hat = director_substep(grid, d0_hat, v_hat, config.dt, config, f_d)
        theta_hat = temperature_substep(grid, theta0_hat, v_hat, d_hat, model,
                                        config.dt, config, f_theta)
        v_new = velocity_substep(grid, u0_hat, theta_hat, d_hat, model,
                                 config.dt, config, f_u)
        residual = grid.l2_norm(v_new - v_hat) / max(grid.l2_norm(v_new), 1.0)
        residuals.append(residual)
        v_hat = v_new
        iterations += 1
        if config.splitting == "fully-explicit":
            converged = True
            break
        if residual <= config.picard_tol:
            converged = True
            break
    if not converged:
        raise PicardConvergenceError(residuals)

    p_hat = pressure_hat(grid, v_hat, theta_hat, d_hat, model, config)
    new_state = State(u=grid.bwd(v_hat), theta=grid.bwd(theta_hat),
                      d=grid.bwd(d_hat), p=grid.bwd(p_hat), t=state.t + config.dt)
    return new_state, iterations, residuals


def galerkin_ode_coefficients(grid, basis, theta_phys, d_phys, model):
    """Quadrature coefficients of the velocity equation on an explicit basis.

    ``basis`` is a list of physical solenoidal fields, orthonormal in L2
    (checked to 1e-10).  Returns (A, e, f) with
    A[i, k] = int mu(theta) (grad Phi_i + grad^T Phi_i) : grad Phi_k,
    e[i, j, k] = int Phi_i . grad Phi_j . Phi_k,
    f[k] = int lambda(theta) (grad d dyadic grad d) : grad Phi_k.
    Intended for low-mode validation against the spectral path.
    """
    m = len(basis)
    for i in range(m):
        for j in range(i, m):
            ip = grid.integrate(np.einsum("cxyz,cxyz->xyz", basis[i], basis[j]))
            target = 1.0 if i == j else 0.0
            if abs(ip - target) > 1e-10:
                raise ValueError(f"basis is not orthonormal: (phi_{i}, phi_{j}) = {ip}")

    grads = [_grad_tensor(grid, grid.fwd(phi)) for phi in basis]
    mu_phys = model.mu(theta_phys)
    lam_phys = model.lam(theta_phys)
    grad_d = _grad_tensor(grid, grid.fwd(d_phys))
    dd = np.einsum("icxyz,jcxyz->ijxyz", grad_d, grad_d)

    A = np.empty((m, m))
    e = np.empty((m, m, m))
    f = np.empty(m)
    for k in range(m):
        for i in range(m):
            sym_i = grads[i] + np.swapaxes(grads[i], 0, 1)
            A[i, k] = grid.integrate(
                mu_phys * np.einsum("ijxyz,ijxyz->xyz", sym_i, grads[k]))
            for j in range(m):
                e[i, j, k] = grid.integrate(
                    np.einsum("axyz,abxyz,bxyz->xyz", basis[i], grads[j], basis[k]))
        f[k] = grid.integrate(
            lam_phys * np.einsum("ijxyz,ijxyz->xyz", dd, grads[k]))
    return A, e, f
