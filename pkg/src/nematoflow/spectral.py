"""Periodic-box geometry and Fourier-space field operations.

Fields live on the box [-D, D]^3 with n uniform points per axis.  The
spectral representation is the full complex FFT normalized so that the
k = 0 coefficient equals the field mean; physical fields are real and
their transforms Hermitian-symmetric.  Scalars are (n, n, n) arrays,
vectors and directors (3, n, n, n); spectral arrays are complex128.

All first-order derivative wavenumbers have the Nyquist mode zeroed so
odd-order operators preserve realness; the Laplacian uses the same
wavenumbers so that div(grad f) == laplacian(f) holds exactly for every
input.
"""

import json
import math

import numpy as np

_SPATIAL_AXES = (-3, -2, -1)


class Grid:
    """Uniform periodic grid with precomputed spectral operators."""

    def __init__(self, n, half_width=math.pi):
        if n % 2 != 0 or n < 8:
            raise ValueError("grid.n must be even and >= 8")
        if half_width <= 0:
            raise ValueError("grid.D must be positive")
        self.n = int(n)
        self.D = float(half_width)
        self.spacing = 2.0 * self.D / self.n
        self.volume = (2.0 * self.D) ** 3
        self.x = -self.D + self.spacing * np.arange(self.n)

        modes = np.fft.fftfreq(self.n, 1.0 / self.n)  # integer-valued
        self.modes = modes
        k1 = (math.pi / self.D) * modes
        kd = k1.copy()
        kd[self.n // 2] = 0.0  # Nyquist zeroed, keeps derivatives real
        self.kx = kd.reshape(self.n, 1, 1)
        self.ky = kd.reshape(1, self.n, 1)
        self.kz = kd.reshape(1, 1, self.n)
        self.k2 = self.kx**2 + self.ky**2 + self.kz**2
        inv = np.zeros_like(self.k2)
        nz = self.k2 > 0
        inv[nz] = 1.0 / self.k2[nz]
        self.inv_k2 = inv

        absm = np.abs(modes)
        self._mask_23 = self._axis_mask(absm <= self.n / 3.0)
        self._mask_12 = self._axis_mask(absm <= self.n / 4.0)

    def _axis_mask(self, keep1d):
        keep = keep1d.astype(float)
        return (keep.reshape(self.n, 1, 1)
                * keep.reshape(1, self.n, 1)
                * keep.reshape(1, 1, self.n))

    # -- transforms ----------------------------------------------------

    def fwd(self, f):
        """Physical -> spectral; k = 0 coefficient is the field mean."""
        f = np.asarray(f)
        if f.shape[-3:] != (self.n,) * 3:
            raise ValueError("field shape does not match grid")
        return np.fft.fftn(f, axes=_SPATIAL_AXES) / self.n**3

    def bwd(self, f_hat):
        """Spectral -> physical (real part)."""
        f_hat = np.asarray(f_hat)
        if f_hat.shape[-3:] != (self.n,) * 3:
            raise ValueError("field shape does not match grid")
        return np.real(np.fft.ifftn(f_hat, axes=_SPATIAL_AXES)) * self.n**3

    def meshgrid(self):
        return np.meshgrid(self.x, self.x, self.x, indexing="ij")

    # -- differential operators ----------------------------------------

    def grad(self, f_hat):
        """Stack of partials along a new leading axis: grad(f)[i] = d_i f."""
        return np.stack([1j * self.kx * f_hat,
                         1j * self.ky * f_hat,
                         1j * self.kz * f_hat])

    def div(self, v_hat):
        return (1j * self.kx * v_hat[0]
                + 1j * self.ky * v_hat[1]
                + 1j * self.kz * v_hat[2])

    def laplacian(self, f_hat):
        return -self.k2 * f_hat

    def leray(self, v_hat):
        """Mode-wise projection onto divergence-free fields (k=0 kept)."""
        kv = (self.kx * v_hat[0] + self.ky * v_hat[1] + self.kz * v_hat[2])
        kv *= self.inv_k2
        return np.stack([v_hat[0] - self.kx * kv,
                         v_hat[1] - self.ky * kv,
                         v_hat[2] - self.kz * kv])

    def dealias(self, f_hat, rule="2/3"):
        """Zero modes with any |m_j| above the rule's cutoff."""
        if rule == "2/3":
            return f_hat * self._mask_23
        if rule == "1/2":
            return f_hat * self._mask_12
        raise ValueError(f"unknown dealias rule '{rule}'")

    # -- norms and inner products --------------------------------------

    def integrate(self, f_phys):
        """Quadrature of a physical field over the box (trapezoid = exact
        mean times volume on the periodic uniform grid)."""
        return np.mean(f_phys, axis=_SPATIAL_AXES) * self.volume

    def inner_product(self, f_hat, g_hat):
        """L2 pairing via Parseval, components summed."""
        self._check_pair(f_hat, g_hat)
        return float(np.sum(np.real(f_hat * np.conj(g_hat)))) * self.volume

    def sobolev_norm_sq(self, f_hat, order=0):
        if order not in (0, 1, 2, 3):
            raise ValueError("sobolev order must be one of 0, 1, 2, 3")
        w = (1.0 + self.k2) ** order if order else 1.0
        return float(np.sum(w * np.abs(f_hat) ** 2)) * self.volume

    def sobolev_norm(self, f_hat, order=0):
        return math.sqrt(self.sobolev_norm_sq(f_hat, order))

    def l2_norm(self, f_hat):
        return self.sobolev_norm(f_hat, 0)

    def _check_pair(self, f_hat, g_hat):
        if f_hat.shape != g_hat.shape or f_hat.shape[-3:] != (self.n,) * 3:
            raise ValueError("field shapes do not match grid")

    # -- constraint residuals ------------------------------------------

    def div_residual(self, u_hat):
        """Relative spectral divergence ||div u|| / ||grad u|| (0 for u = 0)."""
        num = np.sqrt(np.sum(np.abs(self.div(u_hat)) ** 2))
        den = np.sqrt(np.sum(self.k2 * np.abs(u_hat) ** 2))
        return float(num / den) if den > 0 else 0.0


def hermitian_residual(f_hat):
    """Max |f(-k) - conj(f(k))|; zero iff the physical field is real."""
    f_hat = np.asarray(f_hat)
    flipped = f_hat
    for ax in _SPATIAL_AXES:
        flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
    return float(np.max(np.abs(flipped - np.conj(f_hat))))


# -- snapshot serialization --------------------------------------------
# One JSON header line {n, D, component_count, time}, then raw
# little-endian float64 in physical space, x-fastest, one component
# after another.


def write_field_snapshot(path, grid, components, time):
    """Write physical-space components (list of (n,n,n) arrays) to disk."""
    comps = [np.ascontiguousarray(c, dtype=np.float64) for c in components]
    for c in comps:
        if c.shape != (grid.n,) * 3:
            raise ValueError("component shape does not match grid")
    header = {"n": grid.n, "D": grid.D,
              "component_count": len(comps), "time": float(time)}
    with open(path, "wb") as fh:
        fh.write((json.dumps(header) + "\n").encode("ascii"))
        for c in comps:
            # tobytes(order="F") makes the x index fastest
            fh.write(c.astype("<f8").tobytes(order="F"))


def read_field_snapshot(path):
    """Read a snapshot; returns (header dict, list of (n,n,n) arrays)."""
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("ascii"))
        n = int(header["n"])
        count = int(header["component_count"])
        raw = fh.read()
    expected = count * n**3 * 8
    if len(raw) != expected:
        raise ValueError(f"snapshot payload is {len(raw)} bytes, expected {expected}")
    flat = np.frombuffer(raw, dtype="<f8")
    comps = [np.ascontiguousarray(
        flat[i * n**3:(i + 1) * n**3].reshape((n, n, n), order="F"))
        for i in range(count)]
    return header, comps
