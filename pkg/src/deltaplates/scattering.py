"""Multiple-scattering parameters of a planar stack.

Plates are numbered from 1 in every public function, matching the usual
Δ_{12}, Δ_{123}, ... notation. Two evaluation routes exist for
Δ_{12⋯N}:

* :func:`delta_chain` sums products of nearest-neighbour loops Δ_{i,i+1}
  and non-adjacent loops Δ_{ik} over all increasing chains 1 → N;
* :func:`composite` folds plates pairwise into composite reflection and
  transmission amplitudes, accumulating Δ as a product of cavity factors.

The second is what the integrators use; the first is kept as the
independent check.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateCavity,
    IndexOutOfRange,
    InvalidInput,
    NonPositiveKappa,
    NotNonAdjacent,
    TooSmall,
)
from .optics import Coefficients, Mode, Plate, SpectralPoint, coefficient_arrays, coefficients

__all__ = [
    "Stack",
    "LoopTerm",
    "CompositeCoefficients",
    "delta_nn",
    "delta_far",
    "enumerate_chains",
    "delta_chain",
    "combine",
    "composite",
    "loop_terms",
    "chain_label",
    "stack_arrays",
    "composite_right_fold",
    "factorized_delta",
    "chain_text",
]


@dataclass(frozen=True)
class Stack:
    """Plates ordered by strictly increasing position."""

    plates: tuple

    def __init__(self, plates: Iterable[Plate]):
        plates = tuple(plates)
        if not plates:
            raise InvalidInput("a stack needs at least one plate")
        for left, right in zip(plates, plates[1:]):
            if not right.position > left.position:
                raise InvalidInput(
                    f"plate positions must increase strictly: {left.position!r} then {right.position!r}"
                )
        object.__setattr__(self, "plates", plates)

    def __len__(self):
        return len(self.plates)

    def __getitem__(self, index: int) -> Plate:
        """1-based plate access."""
        _check_index(index, len(self))
        return self.plates[index - 1]

    @property
    def n(self) -> int:
        return len(self.plates)

    @property
    def positions(self) -> np.ndarray:
        return np.array([p.position for p in self.plates])

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.positions)

    @property
    def min_gap(self) -> float:
        if self.n < 2:
            raise TooSmall("a single plate has no gap")
        return float(self.gaps.min())

    @property
    def kappa_only(self) -> bool:
        return all(p.is_kappa_only for p in self.plates)

    def sub(self, first: int, last: int) -> "Stack":
        """Plates ``first..last`` inclusive (1-based)."""
        _check_index(first, self.n)
        _check_index(last, self.n)
        if last < first:
            raise InvalidInput("empty sub-stack")
        return Stack(self.plates[first - 1:last])

    def translated(self, shift: float) -> "Stack":
        return Stack(p.moved_to(p.position + shift) for p in self.plates)

    def scaled(self, factor: float) -> "Stack":
        """Positions multiplied by ``factor``; couplings untouched."""
        if not factor > 0:
            raise InvalidInput("scale factor must be positive")
        return Stack(p.moved_to(p.position * factor) for p in self.plates)

    def with_position(self, index: int, position: float) -> "Stack":
        plates = list(self.plates)
        plates[index - 1] = self[index].moved_to(position)
        return Stack(plates)

    def with_gap(self, gap_index: int, gap: float) -> "Stack":
        """Set gap ``gap_index`` (between plates i and i+1) by moving plates i+1..N rigidly."""
        if not 1 <= gap_index < self.n:
            raise IndexOutOfRange(f"gap index {gap_index} outside 1..{self.n - 1}")
        if not gap > 0:
            raise InvalidInput("gap must be positive")
        shift = gap - self.gaps[gap_index - 1]
        plates = list(self.plates[:gap_index])
        plates += [p.moved_to(p.position + shift) for p in self.plates[gap_index:]]
        return Stack(plates)

    def swapped(self) -> "Stack":
        """Every plate with λe and λg exchanged."""
        return Stack(p.swapped() for p in self.plates)


def _check_index(index, n):
    if not (isinstance(index, (int, np.integer)) and 1 <= index <= n):
        raise IndexOutOfRange(f"plate index {index!r} outside 1..{n}")


def _kappa(sp: SpectralPoint) -> float:
    kappa = sp.kappa
    if not kappa > 0:
        raise NonPositiveKappa(f"kappa must be positive, got {kappa!r}")
    return kappa


def stack_arrays(stack: Stack, mode: Mode, zeta, kappa):
    """Per-plate ``(r, t)`` arrays of shape ``(N, M)`` on a node set."""
    zeta = np.atleast_1d(np.asarray(zeta, dtype=float))
    kappa = np.atleast_1d(np.asarray(kappa, dtype=float))
    pairs = [coefficient_arrays(p, mode, zeta, kappa) for p in stack.plates]
    return np.array([r for r, _ in pairs]), np.array([t for _, t in pairs])


# --- loop terms ------------------------------------------------------------

def delta_nn(stack: Stack, i: int, mode: Mode, sp: SpectralPoint) -> float:
    """Δ_{i,i+1} = 1 - r_i r_{i+1} e^{-2κ l_{i,i+1}}."""
    if not (isinstance(i, (int, np.integer)) and 1 <= i < stack.n):
        raise IndexOutOfRange(f"nearest-neighbour index {i!r} outside 1..{stack.n - 1}")
    kappa = _kappa(sp)
    gap = stack[i + 1].position - stack[i].position
    u = math.exp(-kappa * gap)
    r_i = coefficients(stack[i], mode, sp).r
    r_j = coefficients(stack[i + 1], mode, sp).r
    return 1.0 - r_i * u * r_j * u


def delta_far(stack: Stack, i: int, k: int, mode: Mode, sp: SpectralPoint) -> float:
    """Δ_{ik} for k ≥ i + 2: minus the loop that reflects at i and k and
    crosses every intermediate plate twice."""
    _check_index(i, stack.n)
    _check_index(k, stack.n)
    if k < i + 2:
        raise NotNonAdjacent(f"Δ_{{{i}{k}}} needs k >= i + 2")
    kappa = _kappa(sp)
    amp = coefficients(stack[i], mode, sp).r * coefficients(stack[k], mode, sp).r
    for m in range(i + 1, k):
        t = coefficients(stack[m], mode, sp).t
        amp *= t * t
    return -amp * math.exp(-2.0 * kappa * (stack[k].position - stack[i].position))


def enumerate_chains(n: int) -> list[list[int]]:
    """All increasing index sequences from 1 to ``n``, in lexicographic order.

    Each chain corresponds to a subset of the interior plates 2..n-1, so
    there are 2**(n-2) of them.
    """
    if n < 2:
        raise TooSmall(f"chains need n >= 2, got {n}")
    interior = range(2, n)
    chains = []
    for mask in itertools.product((True, False), repeat=n - 2):
        chains.append([1] + [i for i, keep in zip(interior, mask) if keep] + [n])
    chains.sort()
    return chains


def _coeff_table(stack: Stack, mode: Mode, sp: SpectralPoint) -> list[Coefficients]:
    return [coefficients(p, mode, sp) for p in stack.plates]


def _link(coeffs, positions, kappa, i, k):
    """Δ_{ik} from precomputed coefficients (0-based i, k)."""
    e2 = math.exp(-2.0 * kappa * (positions[k] - positions[i]))
    if k == i + 1:
        return 1.0 - coeffs[i].r * coeffs[k].r * e2
    amp = coeffs[i].r * coeffs[k].r
    for m in range(i + 1, k):
        amp *= coeffs[m].t * coeffs[m].t
    return -amp * e2


def delta_chain(stack: Stack, mode: Mode, sp: SpectralPoint) -> float:
    """Δ_{12⋯N} as the sum over chains of products of Δ_{ik} links."""
    n = stack.n
    if n < 2:
        raise TooSmall("Δ needs at least two plates")
    kappa = _kappa(sp)
    coeffs = _coeff_table(stack, mode, sp)
    positions = [p.position for p in stack.plates]
    cache = {}
    total = 0.0
    for chain in enumerate_chains(n):
        prod = 1.0
        for i, k in zip(chain, chain[1:]):
            key = (i - 1, k - 1)
            if key not in cache:
                cache[key] = _link(coeffs, positions, kappa, *key)
            prod *= cache[key]
        total += prod
    return total


@dataclass(frozen=True)
class LoopTerm:
    """A closed propagation loop between plates ``indices[0]`` and
    ``indices[-1]``, crossing each interior plate twice.

    Its value is ``amplitude × exp(-κ · pathlength)``. The corresponding
    chain factor is ``1 - value`` for adjacent plates and ``-value``
    otherwise.
    """

    indices: tuple
    pathlength: float
    mode: Mode = Mode.H

    @property
    def adjacent(self) -> bool:
        return len(self.indices) == 2

    @property
    def label(self) -> str:
        return chain_label(self.indices[0], self.indices[-1])

    @property
    def factors(self) -> tuple:
        """Symbolic amplitude factors, e.g. ``('r1', 't2', 't2', 'r3')``."""
        first, *middle, last = self.indices
        out = [f"r{first}"]
        for m in middle:
            out += [f"t{m}", f"t{m}"]
        out.append(f"r{last}")
        return tuple(out)

    def amplitude(self, stack: Stack, sp: SpectralPoint) -> float:
        first, *middle, last = self.indices
        amp = coefficients(stack[first], self.mode, sp).r * coefficients(stack[last], self.mode, sp).r
        for m in middle:
            t = coefficients(stack[m], self.mode, sp).t
            amp *= t * t
        return amp

    def value(self, stack: Stack, sp: SpectralPoint) -> float:
        return self.amplitude(stack, sp) * math.exp(-_kappa(sp) * self.pathlength)

    def delta(self, stack: Stack, sp: SpectralPoint) -> float:
        v = self.value(stack, sp)
        return 1.0 - v if self.adjacent else -v

    def expression(self) -> str:
        body = " ".join(self.factors)
        first, last = self.indices[0], self.indices[-1]
        term = f"{body} e^(-2κ(a{last}-a{first}))"
        return f"(1 - {term})" if self.adjacent else f"(-{term})"


def chain_label(i: int, k: int) -> str:
    if i < 10 and k < 10:
        return f"Δ{i}{k}"
    return f"Δ({i},{k})"


def loop_terms(stack: Stack, mode: Mode) -> list[list[LoopTerm]]:
    """Symbolic loops of every chain, in :func:`enumerate_chains` order."""
    if stack.n < 2:
        raise TooSmall("loops need at least two plates")
    pos = stack.positions
    out = []
    for chain in enumerate_chains(stack.n):
        terms = []
        for i, k in zip(chain, chain[1:]):
            terms.append(LoopTerm(tuple(range(i, k + 1)), 2.0 * float(pos[k - 1] - pos[i - 1]), mode))
        out.append(terms)
    return out


# --- composite bodies ------------------------------------------------------

@dataclass(frozen=True)
class CompositeCoefficients:
    """Reflection/transmission of a multi-plate body.

    ``r_left`` is for incidence from the left (R^>), referenced to the
    leftmost plate; ``r_right`` for incidence from the right (R^<),
    referenced to the rightmost plate. ``delta`` is the body's own Δ.
    """

    r_left: float
    r_right: float
    t: float
    delta: float = 1.0

    @classmethod
    def single(cls, c: Coefficients) -> "CompositeCoefficients":
        return cls(c.r, c.r, c.t, 1.0)


def combine(
    left: CompositeCoefficients,
    right: CompositeCoefficients,
    gap: float,
    sp: SpectralPoint,
) -> CompositeCoefficients:
    """Join two bodies separated by ``gap`` (face to face)."""
    if not gap > 0:
        raise InvalidInput(f"gap must be positive, got {gap!r}")
    u = math.exp(-_kappa(sp) * gap)
    pair = 1.0 - left.r_right * u * right.r_left * u
    if not pair > 0:
        raise DegenerateCavity(pair)
    return CompositeCoefficients(
        r_left=left.r_left + left.t * u * right.r_left * u * left.t / pair,
        r_right=right.r_right + right.t * u * left.r_right * u * right.t / pair,
        t=left.t * u * right.t / pair,
        delta=left.delta * right.delta * pair,
    )


def composite(stack: Stack, mode: Mode, sp: SpectralPoint) -> CompositeCoefficients:
    """Fold the plates left to right into one composite body."""
    _kappa(sp)
    plates = stack.plates
    body = CompositeCoefficients.single(coefficients(plates[0], mode, sp))
    for prev, plate in zip(plates, plates[1:]):
        nxt = CompositeCoefficients.single(coefficients(plate, mode, sp))
        body = combine(body, nxt, plate.position - prev.position, sp)
    return body


def composite_right_fold(stack: Stack, mode: Mode, sp: SpectralPoint) -> CompositeCoefficients:
    """Same body folded right to left; used to check fold-order independence."""
    _kappa(sp)
    plates = stack.plates
    body = CompositeCoefficients.single(coefficients(plates[-1], mode, sp))
    for plate, nxt in zip(reversed(plates[:-1]), reversed(plates[1:])):
        prev = CompositeCoefficients.single(coefficients(plate, mode, sp))
        body = combine(prev, body, nxt.position - plate.position, sp)
    return body


def factorized_delta(stack: Stack, split: int, mode: Mode, sp: SpectralPoint) -> float:
    """Δ of the stack rebuilt from the two sides of ``split``.

    Plates 1..split and split+1..N are folded into composite bodies; Δ is
    the product of their own Δ and the cavity factor between them. No chain
    expansion is involved, so this is independent of :func:`delta_chain`.
    """
    if not (isinstance(split, (int, np.integer)) and 1 <= split < stack.n):
        raise IndexOutOfRange(f"split {split!r} outside 1..{stack.n - 1}")
    left = composite(stack.sub(1, split), mode, sp)
    right = composite(stack.sub(split + 1, stack.n), mode, sp)
    u = math.exp(-sp.kappa * (stack[split + 1].position - stack[split].position))
    return left.delta * right.delta * (1.0 - left.r_right * u * right.r_left * u)


def chain_text(chain: Sequence[int]) -> str:
    return "·".join(chain_label(i, k) for i, k in zip(chain, chain[1:]))
