import numpy as np
import pytest

from nematoflow.spectral import Grid


def mode_mask(grid, mmax):
    keep = (np.abs(grid.modes) <= mmax).astype(float)
    return (keep.reshape(-1, 1, 1) * keep.reshape(1, -1, 1)
            * keep.reshape(1, 1, -1))


def low_mode_scalar(grid, rng, mmax=2, amp=1.0):
    """Real random field band-limited to |m_j| <= mmax."""
    f_hat = grid.fwd(rng.standard_normal((grid.n,) * 3))
    f_hat *= mode_mask(grid, mmax)
    f = grid.bwd(f_hat)
    peak = np.abs(f).max()
    return f * (amp / peak) if peak > 0 else f


def low_mode_vector(grid, rng, mmax=2, amp=1.0):
    return np.stack([low_mode_scalar(grid, rng, mmax, amp) for _ in range(3)])


def solenoidal_vector(grid, rng, mmax=2, amp=1.0):
    v_hat = grid.fwd(low_mode_vector(grid, rng, mmax, amp))
    return grid.bwd(grid.leray(v_hat))


@pytest.fixture
def grid16():
    return Grid(16)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
