"""Hot loops over spectral nodes.

Each kernel takes per-plate amplitude arrays ``r`` and ``t`` of shape
``(N, M)`` (plate, node), the ``N - 1`` gap lengths and the ``M`` values
of κ. Every kernel exists twice: a numpy version vectorised over nodes and
a numba version looping over them. The module-level names pick one
according to :mod:`deltaplates._jit`.
"""
import numpy as np

from . import _jit

__all__ = [
    "log_delta",
    "round_trips",
    "gap_log_derivatives",
    "partition_delta",
    "NUMPY_KERNELS",
    "NUMBA_KERNELS",
]


# --- numpy -----------------------------------------------------------------

def _log_delta_np(r, t, gaps, kappa):
    n = r.shape[0]
    refl = r[0].copy()
    out = np.zeros_like(kappa)
    for k in range(1, n):
        u2 = np.exp(-2.0 * kappa * gaps[k - 1])
        x = refl * u2 * r[k]
        out += np.log1p(-x)
        refl = r[k] + t[k] * t[k] * u2 * refl / (1.0 - x)
    return out


def _round_trips_np(r, t, gaps, kappa):
    n = r.shape[0]
    m = kappa.shape[0]
    u2 = np.exp(-2.0 * kappa[None, :] * np.asarray(gaps)[:, None])
    left = np.empty((n, m))  # reflection of plates 0..k seen from the right
    right = np.empty((n, m))  # reflection of plates k..n-1 seen from the left
    left[0] = r[0]
    for k in range(1, n):
        x = left[k - 1] * u2[k - 1] * r[k]
        left[k] = r[k] + t[k] * t[k] * u2[k - 1] * left[k - 1] / (1.0 - x)
    right[n - 1] = r[n - 1]
    for k in range(n - 2, -1, -1):
        x = r[k] * u2[k] * right[k + 1]
        right[k] = r[k] + t[k] * t[k] * u2[k] * right[k + 1] / (1.0 - x)
    return left[:-1] * right[1:] * u2


def _gap_log_derivatives_np(r, t, gaps, kappa):
    x = _round_trips_np(r, t, gaps, kappa)
    return 2.0 * kappa[None, :] * x / (1.0 - x)


def _partition_delta_np(r, t, gaps, kappa):
    n = r.shape[0]
    pos = np.concatenate(([0.0], np.cumsum(gaps)))
    partial = [np.ones_like(kappa)]
    for k in range(1, n):
        acc = partial[k - 1] * (1.0 - r[k - 1] * r[k] * np.exp(-2.0 * kappa * gaps[k - 1]))
        through = np.ones_like(kappa)
        for j in range(k - 2, -1, -1):
            through = through * t[j + 1] * t[j + 1]
            loop = r[j] * through * r[k] * np.exp(-2.0 * kappa * (pos[k] - pos[j]))
            acc = acc - partial[j] * loop
        partial.append(acc)
    return partial[n - 1]


# --- numba -----------------------------------------------------------------
# Plate loop outside, node loop inside: rows of r and t are contiguous.

def _log_delta_loop(r, t, gaps, kappa):
    n, m = r.shape
    out = np.zeros(m)
    refl = r[0].copy()
    for k in range(1, n):
        g = -2.0 * gaps[k - 1]
        for j in range(m):
            u2 = np.exp(g * kappa[j])
            x = refl[j] * u2 * r[k, j]
            out[j] += np.log1p(-x)
            refl[j] = r[k, j] + t[k, j] * t[k, j] * u2 * refl[j] / (1.0 - x)
    return out


def _round_trips_loop(r, t, gaps, kappa):
    n, m = r.shape
    u2 = np.empty((n - 1, m))
    for k in range(n - 1):
        for j in range(m):
            u2[k, j] = np.exp(-2.0 * gaps[k] * kappa[j])
    left = np.empty((n, m))
    right = np.empty((n, m))
    left[0] = r[0]
    for k in range(1, n):
        for j in range(m):
            x = left[k - 1, j] * u2[k - 1, j] * r[k, j]
            left[k, j] = r[k, j] + t[k, j] * t[k, j] * u2[k - 1, j] * left[k - 1, j] / (1.0 - x)
    right[n - 1] = r[n - 1]
    for k in range(n - 2, -1, -1):
        for j in range(m):
            x = r[k, j] * u2[k, j] * right[k + 1, j]
            right[k, j] = r[k, j] + t[k, j] * t[k, j] * u2[k, j] * right[k + 1, j] / (1.0 - x)
    out = np.empty((n - 1, m))
    for k in range(n - 1):
        for j in range(m):
            out[k, j] = left[k, j] * right[k + 1, j] * u2[k, j]
    return out


def _gap_log_derivatives_loop(r, t, gaps, kappa):
    x = _round_trips_loop(r, t, gaps, kappa)
    n, m = x.shape
    out = np.empty((n, m))
    for k in range(n):
        for j in range(m):
            out[k, j] = 2.0 * kappa[j] * x[k, j] / (1.0 - x[k, j])
    return out


def _partition_delta_loop(r, t, gaps, kappa):
    n, m = r.shape
    pos = np.zeros(n)
    for k in range(1, n):
        pos[k] = pos[k - 1] + gaps[k - 1]
    partial = np.empty((n, m))
    through = np.empty(m)
    partial[0] = 1.0
    for k in range(1, n):
        for j in range(m):
            partial[k, j] = partial[k - 1, j] * (1.0 - r[k - 1, j] * r[k, j] * np.exp(-2.0 * kappa[j] * gaps[k - 1]))
            through[j] = 1.0
        for i in range(k - 2, -1, -1):
            span = -2.0 * (pos[k] - pos[i])
            for j in range(m):
                through[j] *= t[i + 1, j] * t[i + 1, j]
                partial[k, j] -= partial[i, j] * r[i, j] * through[j] * r[k, j] * np.exp(span * kappa[j])
    return partial[n - 1].copy()


NUMPY_KERNELS = {
    "log_delta": _log_delta_np,
    "round_trips": _round_trips_np,
    "gap_log_derivatives": _gap_log_derivatives_np,
    "partition_delta": _partition_delta_np,
}

NUMBA_KERNELS = {}
if _jit.HAVE_NUMBA:
    _round_trips_loop = _jit.njit(_round_trips_loop)
    NUMBA_KERNELS = {
        "log_delta": _jit.njit(_log_delta_loop),
        "round_trips": _round_trips_loop,
        "gap_log_derivatives": _jit.njit(_gap_log_derivatives_loop),
        "partition_delta": _jit.njit(_partition_delta_loop),
    }

_ACTIVE = NUMBA_KERNELS if _jit.USE_JIT else NUMPY_KERNELS


def _prep(r, t, gaps, kappa):
    return (
        np.ascontiguousarray(r, dtype=np.float64),
        np.ascontiguousarray(t, dtype=np.float64),
        np.ascontiguousarray(gaps, dtype=np.float64),
        np.ascontiguousarray(kappa, dtype=np.float64),
    )


def log_delta(r, t, gaps, kappa):
    """ln Δ_{1..N} at every node via the factorised fold (log1p per cavity)."""
    return _ACTIVE["log_delta"](*_prep(r, t, gaps, kappa))


def round_trips(r, t, gaps, kappa):
    """Round-trip amplitude R^<_{1..k} R^>_{k+1..N} e^{-2κ l_k} of every gap k.

    Cutting the stack at gap k gives Δ = Δ_{1..k} Δ_{k+1..N} (1 - x_k);
    the result has shape ``(N - 1, M)``.
    """
    return _ACTIVE["round_trips"](*_prep(r, t, gaps, kappa))


def gap_log_derivatives(r, t, gaps, kappa):
    """∂ ln Δ / ∂ l_k for every gap k, shape ``(N - 1, M)``.

    Splitting the stack at gap k, Δ = Δ_L Δ_R (1 - R_L R_R e^{-2κ l_k})
    and only the last factor depends on l_k.
    """
    return _ACTIVE["gap_log_derivatives"](*_prep(r, t, gaps, kappa))


def partition_delta(r, t, gaps, kappa):
    """Δ_{1..N} from the chain expansion, summed by last link.

    Writing S_k for the partial sum over chains ending at plate k,
    S_k = Σ_{j<k} S_j Δ_{jk}; this visits every chain exactly once.
    """
    return _ACTIVE["partition_delta"](*_prep(r, t, gaps, kappa))
