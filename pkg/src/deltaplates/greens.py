"""Scalar Green's functions g^H, g^E of 1 to 3 δ-plates.

Regions are labelled the way the (z, z') plane is usually drawn: row ``i``
counts source regions from the top (i = 1 means z' right of every plate,
i = N+1 means z' left of every plate) and column ``j`` counts observer
regions from the left. Inside region (i, j)

    g = [δ_{i+j, N+2} e^{-κ|z-z'|} + A_i · B_ij · C_j] / 2κ

where ``A_i`` holds the exponentials from the source to the plates that
bound its region, ``C_j`` those from the bounding plates to the observer,
and ``B_ij`` is a block of path sums. Interior regions have two bounding
plates, so their A and C vectors have two components:

    A (source between a_m and a_{m+1}) = [e^{-κ(z'-a_m)}, e^{-κ(a_{m+1}-z')}]
    C (observer between a_n and a_{n+1}) = [e^{-κ(a_{n+1}-z)}, e^{-κ(z-a_n)}]

Every block entry is a polynomial in r_k, t_k and u_k = e^{-κ l_{k,k+1}}
divided by Δ_{1⋯N}; the polynomials are built once per N and stored as
:class:`PathTerm` lists.
"""
from __future__ import annotations

import functools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    IndexOutOfRange,
    InvalidInput,
    NonPositiveKappa,
    OnPlatePlane,
    StraddlesPlateOrSource,
    UnsupportedN,
)
from .optics import Mode, SpectralPoint, coefficients
from .scattering import Stack, delta_chain

__all__ = [
    "PathTerm",
    "GreensQuery",
    "RegionMatrix",
    "region_matrix",
    "greens_value",
    "locate",
    "check_ode_residual",
    "check_jump_conditions",
    "JumpResiduals",
    "observed_order",
    "MAX_PLATES",
]

MAX_PLATES = 3


# --- polynomial algebra in r, t, u ------------------------------------------

class _Poly:
    """Sparse integer polynomial in the 3N - 1 symbols r_1..r_N, t_1..t_N,
    u_1..u_{N-1}; keys are exponent tuples."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def const(cls, n, c=1):
        return cls(n, {(0,) * (3 * n - 1): c})

    @classmethod
    def symbol(cls, n, kind, k):
        """``kind`` in 'rtu', ``k`` 1-based."""
        offset = {"r": 0, "t": n, "u": 2 * n}[kind]
        exps = [0] * (3 * n - 1)
        exps[offset + k - 1] = 1
        return cls(n, {tuple(exps): 1})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return _Poly(self.n, out)

    def __neg__(self):
        return _Poly(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = defaultdict(int)
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                out[tuple(x + y for x, y in zip(ka, kb))] += va * vb
        return _Poly(self.n, out)

    def __eq__(self, other):
        return self.n == other.n and self.terms == other.terms

    def path_terms(self):
        return tuple(sorted(PathTerm.from_exponents(self.n, k, v) for k, v in self.terms.items()))


@dataclass(frozen=True, order=True)
class PathTerm:
    """``coefficient × Π r_k^{p_k} t_k^{q_k} × Π u_k^{s_k}``.

    ``r_powers``/``t_powers`` are per plate, ``gap_powers`` per gap; the
    propagation length is ``Σ s_k l_k``.
    """

    coefficient: int
    r_powers: tuple
    t_powers: tuple
    gap_powers: tuple

    @classmethod
    def from_exponents(cls, n, exps, coefficient):
        return cls(coefficient, tuple(exps[:n]), tuple(exps[n:2 * n]), tuple(exps[2 * n:]))

    def pathlength(self, gaps) -> float:
        return float(sum(s * g for s, g in zip(self.gap_powers, gaps)))

    def amplitude(self, r, t) -> float:
        amp = float(self.coefficient)
        for x, p in zip(r, self.r_powers):
            amp *= x ** p
        for x, q in zip(t, self.t_powers):
            amp *= x ** q
        return amp

    def evaluate(self, r, t, gaps, kappa) -> float:
        return self.amplitude(r, t) * math.exp(-kappa * self.pathlength(gaps))

    def __str__(self):
        parts = []
        for name, powers in (("r", self.r_powers), ("t", self.t_powers), ("u", self.gap_powers)):
            for k, p in enumerate(powers, start=1):
                if p:
                    parts.append(f"{name}{k}" + (f"^{p}" if p > 1 else ""))
        body = " ".join(parts) or "1"
        return f"{self.coefficient:+d} {body}"


class _Bodies:
    """Numerator polynomials of sub-stacks i..j (1-based, inclusive).

    For a body with Δ-polynomial D, R^< = P_right / D, R^> = P_left / D and
    T = τ / D with τ the product of transmissions and inner propagators.
    """

    def __init__(self, n):
        self.n = n
        self.one = _Poly.const(n, 1)
        self.zero = _Poly(n)
        self.r = [None] + [_Poly.symbol(n, "r", k) for k in range(1, n + 1)]
        self.t = [None] + [_Poly.symbol(n, "t", k) for k in range(1, n + 1)]
        self.u = [None] + [_Poly.symbol(n, "u", k) for k in range(1, n)]

    @functools.lru_cache(maxsize=None)
    def delta(self, i, j):
        if i > j:
            return self.one
        if i == j:
            return self.one
        # add plate j on the right
        return self.delta(i, j - 1) - self.p_right(i, j - 1) * self.r[j] * self.u[j - 1] * self.u[j - 1]

    @functools.lru_cache(maxsize=None)
    def delta_from_right(self, i, j):
        """Same polynomial built by adding plates on the left (consistency check)."""
        if i >= j:
            return self.one
        return self.delta_from_right(i + 1, j) - self.r[i] * self.u[i] * self.u[i] * self.p_left(i + 1, j)

    @functools.lru_cache(maxsize=None)
    def p_right(self, i, j):
        if i > j:
            return self.zero
        if i == j:
            return self.r[j]
        u2 = self.u[j - 1] * self.u[j - 1]
        return self.r[j] * self.delta(i, j) + self.t[j] * self.t[j] * u2 * self.p_right(i, j - 1)

    @functools.lru_cache(maxsize=None)
    def p_left(self, i, j):
        if i > j:
            return self.zero
        if i == j:
            return self.r[i]
        u2 = self.u[i] * self.u[i]
        return self.r[i] * self.delta_from_right(i, j) + self.t[i] * self.t[i] * u2 * self.p_left(i + 1, j)

    def tau(self, i, j):
        out = self.one
        for k in range(i, j + 1):
            out = out * self.t[k]
        for k in range(i, j):
            out = out * self.u[k]
        return out


def _region_sizes(n):
    # index 0 .. n along z; regions 0 and n are exterior
    return [1 if m in (0, n) else 2 for m in range(n + 1)]


@functools.lru_cache(maxsize=None)
def _symbolic_blocks(n):
    """``{(i, j): block}`` where block[a][c] is a tuple of PathTerm; also
    returns the Δ polynomial's path terms."""
    b = _Bodies(n)
    blocks = {}
    for m in range(n + 1):  # source region
        for k in range(n + 1):  # observer region
            # A components: 'A1' exists if m >= 1, 'A2' if m < n
            a_keys = [key for key, ok in (("A1", m >= 1), ("A2", m < n)) if ok]
            c_keys = [key for key, ok in (("C1", k < n), ("C2", k >= 1)) if ok]
            ent = {}
            if k == m:
                d_l, d_r = b.delta(1, m), b.delta(m + 1, n)
                p_l, p_r = b.p_right(1, m), b.p_left(m + 1, n)
                u = b.u[m] if 1 <= m < n else b.one
                ent[("A1", "C2")] = p_l * d_r
                ent[("A2", "C1")] = p_r * d_l
                ent[("A1", "C1")] = p_l * p_r * u
                ent[("A2", "C2")] = p_l * p_r * u
            elif k > m:
                # source body L = 1..m, transmitting body P = m+1..k, beyond Q = k+1..n
                d_l, p_l = b.delta(1, m), b.p_right(1, m)
                tau = b.tau(m + 1, k)
                d_q, p_q = b.delta(k + 1, n), b.p_left(k + 1, n)
                u_m = b.u[m] if m >= 1 else b.zero
                u_k = b.u[k] if k < n else b.zero
                ent[("A2", "C2")] = tau * d_q * d_l
                ent[("A1", "C2")] = tau * d_q * u_m * p_l
                ent[("A2", "C1")] = tau * p_q * u_k * d_l
                ent[("A1", "C1")] = tau * p_q * u_k * u_m * p_l
            else:
                # mirror: R = m+1..n behind the source, P = k+1..m, Q = 1..k
                d_r, p_r = b.delta(m + 1, n), b.p_left(m + 1, n)
                tau = b.tau(k + 1, m)
                d_q, p_q = b.delta(1, k), b.p_right(1, k)
                u_m = b.u[m] if m < n else b.zero
                u_k = b.u[k] if k >= 1 else b.zero
                ent[("A1", "C1")] = tau * d_q * d_r
                ent[("A2", "C1")] = tau * d_q * u_m * p_r
                ent[("A1", "C2")] = tau * p_q * u_k * d_r
                ent[("A2", "C2")] = tau * p_q * u_k * u_m * p_r
            row = n + 1 - m
            col = k + 1
            blocks[(row, col)] = tuple(
                tuple(ent[(a, c)].path_terms() for c in c_keys) for a in a_keys
            )
    return blocks, b.delta(1, n).path_terms()


# --- public types ------------------------------------------------------------

@dataclass(frozen=True)
class GreensQuery:
    z: float
    zprime: float
    mode: Mode
    sp: SpectralPoint


@dataclass(frozen=True)
class RegionMatrix:
    """B matrix of an N-plate stack at one spectral point.

    ``terms[(i, j)]`` is the symbolic block (rows over A components,
    columns over C components, each entry a tuple of :class:`PathTerm`
    summing to Δ · B); ``values[(i, j)]`` the numeric block with the
    1/Δ already applied.
    """

    n: int
    terms: dict
    values: dict
    delta: float

    def entry(self, i: int, j: int) -> np.ndarray:
        return self.values[(i, j)]

    def corner(self, name: str) -> float:
        """``'R<'``, ``'R>'`` or ``'T'`` read off the corners."""
        n = self.n
        idx = {"R<": (1, n + 1), "R>": (n + 1, 1), "T": (1, 1)}[name]
        return float(self.values[idx][0, 0])

    def mirror_pairs(self):
        n = self.n
        for i in range(1, n + 2):
            for j in range(1, n + 2):
                yield (i, j), (n + 2 - j, n + 2 - i)

    def term_multiset(self, i: int, j: int) -> Counter:
        """Entries of block (i, j) as a multiset of term tuples."""
        return Counter(entry for row in self.terms[(i, j)] for entry in row)


def _check_n(stack: Stack):
    if not 1 <= stack.n <= MAX_PLATES:
        raise UnsupportedN(f"closed-form Green's functions exist here only for 1..{MAX_PLATES} plates, got {stack.n}")


def _amplitudes(stack, mode, sp):
    coeffs = [coefficients(p, mode, sp) for p in stack.plates]
    return [c.r for c in coeffs], [c.t for c in coeffs]


def region_matrix(stack: Stack, mode: Mode, sp: SpectralPoint) -> RegionMatrix:
    _check_n(stack)
    kappa = sp.kappa
    if not kappa > 0:
        raise NonPositiveKappa("kappa must be positive")
    blocks, _ = _symbolic_blocks(stack.n)
    r, t = _amplitudes(stack, mode, sp)
    gaps = list(stack.gaps)
    delta = delta_chain(stack, mode, sp) if stack.n > 1 else 1.0
    values = {}
    for key, block in blocks.items():
        values[key] = np.array(
            [[sum(term.evaluate(r, t, gaps, kappa) for term in entry) / delta for entry in row] for row in block]
        )
    return RegionMatrix(stack.n, blocks, values, delta)


def locate(stack: Stack, x: float) -> int:
    """Index of the vacuum region containing ``x`` (0 = left of plate 1)."""
    pos = stack.positions
    if np.any(pos == x):
        raise OnPlatePlane(f"point {x!r} lies on a plate")
    return int(np.searchsorted(pos, x))


def _source_vector(pos, m, zp, kappa):
    n = len(pos)
    out = []
    if m >= 1:
        out.append(math.exp(-kappa * (zp - pos[m - 1])))
    if m < n:
        out.append(math.exp(-kappa * (pos[m] - zp)))
    return np.array(out)


def _observer_vector(pos, k, z, kappa):
    n = len(pos)
    out = []
    if k < n:
        out.append(math.exp(-kappa * (pos[k] - z)))
    if k >= 1:
        out.append(math.exp(-kappa * (z - pos[k - 1])))
    return np.array(out)


def region_label(stack: Stack, z: float, zprime: float) -> tuple:
    m = locate(stack, zprime)
    k = locate(stack, z)
    return stack.n + 1 - m, k + 1


def greens_value(stack: Stack, q: GreensQuery, rm: RegionMatrix | None = None) -> float:
    """g^{mode}(z, z') for the stack.

    ``rm`` may carry a precomputed :func:`region_matrix` for the same
    stack, mode and spectral point.
    """
    _check_n(stack)
    kappa = q.sp.kappa
    if rm is None:
        rm = region_matrix(stack, q.mode, q.sp)
    pos = stack.positions
    m = locate(stack, q.zprime)
    k = locate(stack, q.z)
    a = _source_vector(pos, m, q.zprime, kappa)
    c = _observer_vector(pos, k, q.z, kappa)
    value = float(a @ rm.values[(stack.n + 1 - m, k + 1)] @ c)
    if m == k:
        value += math.exp(-kappa * abs(q.z - q.zprime))
    return value / (2.0 * kappa)


# --- numerical checks --------------------------------------------------------

def check_ode_residual(stack: Stack, q: GreensQuery, h: float) -> float:
    """|(-∂²/∂z² + κ²) g| at ``q.z`` by a central second difference."""
    region = locate(stack, q.z)
    for x in (q.z - h, q.z + h):
        if locate(stack, x) != region:
            raise StraddlesPlateOrSource("stencil crosses a plate")
    if q.z - h <= q.zprime <= q.z + h:
        raise StraddlesPlateOrSource("stencil contains the source point")
    rm = region_matrix(stack, q.mode, q.sp)

    def g(x):
        return greens_value(stack, GreensQuery(x, q.zprime, q.mode, q.sp), rm)

    g0 = g(q.z)
    second = (g(q.z + h) - 2.0 * g0 + g(q.z - h)) / (h * h)
    return abs(-second + q.sp.kappa ** 2 * g0)


class JumpResiduals(NamedTuple):
    value_jump: float
    derivative_jump: float


# one-sided derivative stencils at the plate, using samples at a ± h, 2h, 3h
_STENCILS = {
    1: np.array([-1.0, 1.0, 0.0]),
    2: np.array([-2.5, 4.0, -1.5]),
}


def check_jump_conditions(
    stack: Stack,
    i: int,
    zprime: float,
    mode: Mode,
    sp: SpectralPoint,
    h: float,
    order: int = 2,
) -> JumpResiduals:
    """Residuals of the two matching conditions at plate ``i``.

    For mode H the value jump equals λe/2 times the summed one-sided
    slopes and the slope jump equals ζ²λg/2 times the summed one-sided
    values; mode E swaps λe and λg. One-sided limits are estimated from
    samples at distance h, 2h, 3h from the plate: ``order=1`` uses the
    nearest sample for values and a two-point slope, ``order=2`` linear
    extrapolation for values and a three-point slope. Both residuals are
    absolute.
    """
    _check_n(stack)
    if not 1 <= i <= stack.n:
        raise IndexOutOfRange(f"plate index {i} outside 1..{stack.n}")
    if order not in _STENCILS:
        raise InvalidInput("order must be 1 or 2")
    plate = stack[i]
    if plate.is_ideal:
        raise InvalidInput("matching conditions need finite couplings")
    a = plate.position
    pos = stack.positions
    reach = 3.0 * h
    for other in pos:
        if other != a and abs(other - a) <= reach:
            raise StraddlesPlateOrSource("stencil reaches a neighbouring plate")
    if abs(zprime - a) <= reach:
        raise OnPlatePlane("source too close to the plate for this step")
    lam_e, lam_g = (float(x) for x in plate.couplings(sp.zeta))
    if mode is Mode.E:
        lam_e, lam_g = lam_g, lam_e
    rm = region_matrix(stack, mode, sp)

    def g(x):
        return greens_value(stack, GreensQuery(x, zprime, mode, sp), rm)

    right = np.array([g(a + s * h) for s in (1, 2, 3)])
    left = np.array([g(a - s * h) for s in (1, 2, 3)])
    w = _STENCILS[order]
    if order == 1:
        v_right, v_left = right[0], left[0]
    else:
        v_right, v_left = 2 * right[0] - right[1], 2 * left[0] - left[1]
    d_right = w @ right / h
    d_left = -(w @ left) / h
    value_jump = (v_right - v_left) - 0.5 * lam_e * (d_right + d_left)
    slope_jump = (d_right - d_left) - 0.5 * sp.zeta ** 2 * lam_g * (v_right + v_left)
    return JumpResiduals(abs(value_jump), abs(slope_jump))


def observed_order(residual_h: float, residual_half: float) -> float:
    """log2 of the residual ratio under h → h/2."""
    if residual_half == 0.0:
        return math.inf
    return math.log2(residual_h / residual_half)
