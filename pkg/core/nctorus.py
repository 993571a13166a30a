"""
MagLat - Noncommutative Torus
=============================
Rational-flux Bloch families of the constant-field algebra, Fermi projections,
Chern numbers (Brillouin-zone and real-space), and the Power-Rieffel projection
on a commensurate circle grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg

if TYPE_CHECKING:
    from numpy.typing import NDArray

from config import NUMERICS, POWER_RIEFFEL, TOLERANCES, setup_logging
from .exceptions import GapError, NumericalError
from .lattice_ops import (
    BoxSequence,
    LatticeDomain,
    LatticeOperator,
    commutator_derivation,
    dense_trace,
)

# Module logger
logger = setup_logging()

TWO_PI = 2.0 * np.pi


# =============================================================================
# BLOCH FAMILIES
# =============================================================================

@dataclass(frozen=True)
class BlochFamily:
    """
    A q x q matrix family over a closed grid of the magnetic Brillouin zone.

    Attributes:
        p, q: Flux 2*pi*p/q.
        k1, k2: Momentum axes, each uniform on [0, 2*pi).
        matrices: Array of shape (N1, N2, q, q).
        kind: "hamiltonian" or "projection".
        frames: For projection families, orthonormal frames of shape
            (N1, N2, q, rank).
    """
    p: int
    q: int
    k1: NDArray[np.float64] = field(repr=False)
    k2: NDArray[np.float64] = field(repr=False)
    matrices: NDArray[np.complex128] = field(repr=False)
    kind: str = "hamiltonian"
    frames: NDArray[np.complex128] | None = field(default=None, repr=False)

    @property
    def grid(self) -> tuple[int, int]:
        return (len(self.k1), len(self.k2))

    @property
    def flux(self) -> float:
        return TWO_PI * self.p / self.q

    @property
    def rank(self) -> int:
        if self.frames is None:
            raise ValueError("Only projection families carry a rank")
        return self.frames.shape[-1]

    def eigenvalues(self) -> NDArray[np.float64]:
        """Ascending eigenvalues, shape (N1, N2, q)."""
        return np.linalg.eigvalsh(self.matrices)

    def hermiticity_residual(self) -> float:
        diff = self.matrices - np.conj(np.swapaxes(self.matrices, -1, -2))
        return float(np.max(np.abs(diff)))

    def projection_residual(self) -> float:
        squared = self.matrices @ self.matrices
        return float(np.max(np.abs(squared - self.matrices)))


def _check_flux(p: int, q: int) -> None:
    if q < 1:
        raise ValueError(f"q must be positive, got {q}")
    if gcd(p, q) != 1:
        raise ValueError(f"p={p} and q={q} are not coprime")


def harper_bloch_family(p: int, q: int,
                        grid: tuple[int, int] = NUMERICS.bz_grid) -> BlochFamily:
    """
    Magnetic Bloch reduction of the Harper operator at flux 2*pi*p/q.

    The fiber at (k1, k2) acts on one magnetic cell of q columns: the diagonal
    is 2 cos(k1 - j b), neighbouring columns hop with amplitude 1 and the hop
    closing the cell carries e^{-i k2}.

    Args:
        p, q: Coprime flux numerator and denominator.
        grid: Momentum points (N1, N2), each at least 3.

    Returns:
        Hamiltonian family of shape (N1, N2, q, q).

    Raises:
        ValueError: If p, q are not coprime or the grid is too small.

    Examples:
        >>> harper_bloch_family(0, 1, (4, 4)).matrices[0, 0]
        array([[4.+0.j]])
    """
    _check_flux(p, q)
    n1, n2 = grid
    if n1 < 3 or n2 < 3:
        raise ValueError(f"Brillouin-zone grid must be at least 3x3, got {grid}")
    b = TWO_PI * p / q
    k1 = TWO_PI * np.arange(n1) / n1
    k2 = TWO_PI * np.arange(n2) / n2
    cols = np.arange(q)

    matrices = np.zeros((n1, n2, q, q), dtype=complex)
    matrices[..., cols, cols] = 2.0 * np.cos(k1[:, None, None] - cols[None, None, :] * b)
    hop = np.zeros((n2, q, q), dtype=complex)
    hop[:, cols, (cols - 1) % q] = 1.0
    hop[:, 0, q - 1] = np.exp(-1j * k2)
    matrices += hop[None]
    matrices += np.conj(np.swapaxes(hop, -1, -2))[None]

    family = BlochFamily(p, q, k1, k2, matrices)
    residual = family.hermiticity_residual()
    if residual > TOLERANCES.hermiticity:
        raise NumericalError("harper_bloch_family", f"hermiticity residual {residual:.3e}")
    logger.debug("Bloch family p/q=%d/%d on %dx%d grid", p, q, n1, n2)
    return family


def fermi_projection(family: BlochFamily, mu: float) -> BlochFamily:
    """
    Spectral projection onto eigenvalues below `mu` at every momentum.

    Raises:
        GapError: If mu is within the gap margin of an eigenvalue, or the
            number of states below mu changes across the grid.
    """
    evals, evecs = np.linalg.eigh(family.matrices)
    margin = float(np.min(np.abs(evals - mu)))
    if margin <= TOLERANCES.gap_margin:
        raise GapError((mu, mu), f"eigenvalue within {margin:.2e} of mu")
    below = evals < mu
    ranks = below.sum(axis=-1)
    if ranks.min() != ranks.max():
        raise GapError((mu, mu), "band crosses mu between grid momenta")
    rank = int(ranks.flat[0])
    frames = evecs[..., :rank]
    projections = frames @ np.conj(np.swapaxes(frames, -1, -2))
    result = BlochFamily(family.p, family.q, family.k1, family.k2, projections,
                         kind="projection", frames=frames)
    residual = result.projection_residual()
    if residual > TOLERANCES.projection:
        raise NumericalError("fermi_projection", f"projection residual {residual:.3e}")
    logger.debug("Fermi projection at mu=%.6g has rank %d (margin %.3g)", mu, rank, margin)
    return result


# =============================================================================
# CHERN NUMBERS
# =============================================================================

@dataclass(frozen=True)
class ChernEstimate:
    """A Chern number with its distance from the nearest integer."""
    value: int
    raw: float
    residual: float

    @property
    def converged(self) -> bool:
        return self.residual <= TOLERANCES.integer_residual


def _frames_of(projections: NDArray[np.complex128]) -> NDArray[np.complex128]:
    evals, evecs = np.linalg.eigh(projections)
    ranks = (evals > 0.5).sum(axis=-1)
    if ranks.min() != ranks.max():
        raise NumericalError("chern_fhs", f"rank jumps between {ranks.min()} and {ranks.max()}")
    rank = int(ranks.flat[0])
    return evecs[..., evecs.shape[-1] - rank:]


def _links(frames: NDArray[np.complex128], axis: int,
           seam: NDArray[np.complex128] | None = None) -> NDArray[np.complex128]:
    """Normalized overlap determinants det(v(k)^* v(k + d_axis))."""
    following = np.roll(frames, -1, axis=axis)
    if seam is not None:
        index = [slice(None)] * frames.ndim
        index[axis] = -1
        following[tuple(index)] = seam
    overlaps = np.conj(np.swapaxes(frames, -1, -2)) @ following
    det = np.linalg.det(overlaps)
    modulus = np.abs(det)
    if np.min(modulus) < 1e-12:
        raise NumericalError("chern_fhs", "vanishing link overlap: grid too coarse or gap closed")
    return det / modulus


def plaquette_flux(frames: NDArray[np.complex128],
                   seam: NDArray[np.complex128] | None = None) -> float:
    """
    Sum of plaquette Berry fluxes of a frame field on a grid, in units of 2*pi.

    Plaquettes are oriented so that the lowest Hofstadter band at flux
    +2*pi/q has Chern number +1.

    Args:
        frames: Array (N1, N2, dim, rank) of orthonormal frames.
        seam: Optional frames replacing the wrap-around neighbour along the
            second axis (shape (N1, dim, rank)).
    """
    if frames.shape[-1] == 0:
        return 0.0
    u1 = _links(frames, 0)
    u2 = _links(frames, 1, seam)
    plaquettes = u1 * np.roll(u2, -1, axis=0) * np.conj(np.roll(u1, -1, axis=1)) * np.conj(u2)
    return float(-np.sum(np.angle(plaquettes)) / TWO_PI)


def _estimate(raw: float) -> ChernEstimate:
    value = int(round(raw))
    return ChernEstimate(value, raw, abs(raw - value))


def chern_fhs(projections: BlochFamily) -> int:
    """
    Lattice field-strength Chern number of a projection family.

    Raises:
        NumericalError: On rank jumps, vanishing overlaps, or a flux sum that
            is not close to an integer.
    """
    frames = projections.frames if projections.frames is not None else _frames_of(projections.matrices)
    estimate = _estimate(plaquette_flux(frames))
    if not estimate.converged:
        raise NumericalError("chern_fhs", f"non-integer flux {estimate.raw:.6f}")
    logger.debug("FHS Chern number %d (residual %.2e)", estimate.value, estimate.residual)
    return estimate.value


@dataclass(frozen=True)
class BandGroup:
    """Consecutive bands that touch on the sampled grid, with their Chern number."""
    first: int
    last: int
    energy_min: float
    energy_max: float
    chern: int


@dataclass(frozen=True)
class BulkSpectrum:
    """Sampled band intervals and the gaps between them."""
    bands: tuple[tuple[float, float], ...]
    gaps: tuple[tuple[float, float], ...]


def bulk_gaps(family: BlochFamily, margin: float = TOLERANCES.gap_margin) -> BulkSpectrum:
    """Band intervals on the grid, merged where they overlap, and the open gaps between."""
    evals = family.eigenvalues().reshape(-1, family.q)
    intervals = [(float(evals[:, i].min()), float(evals[:, i].max())) for i in range(family.q)]
    merged: list[list[float]] = []
    for lo, hi in intervals:
        if merged and lo <= merged[-1][1] + margin:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    gaps = tuple((merged[i][1], merged[i + 1][0]) for i in range(len(merged) - 1))
    return BulkSpectrum(tuple(tuple(m) for m in merged), gaps)  # type: ignore[misc]


def band_chern_numbers(family: BlochFamily) -> tuple[BandGroup, ...]:
    """
    Chern number of every isolated band group; the numbers sum to zero.
    """
    evals, evecs = np.linalg.eigh(family.matrices)
    flat = evals.reshape(-1, family.q)
    groups: list[BandGroup] = []
    first = 0
    for i in range(family.q):
        closes = i == family.q - 1 or flat[:, i].max() + TOLERANCES.gap_margin < flat[:, i + 1].min()
        if not closes:
            continue
        estimate = _estimate(plaquette_flux(evecs[..., first:i + 1]))
        if not estimate.converged:
            raise NumericalError("band_chern_numbers", f"bands {first}-{i}: flux {estimate.raw:.6f}")
        groups.append(BandGroup(first, i, float(flat[:, first].min()), float(flat[:, i].max()),
                                estimate.value))
        first = i + 1
    logger.info("Band Chern numbers at %d/%d: %s", family.p, family.q, [g.chern for g in groups])
    return tuple(groups)


def projection_trace(projections: BlochFamily) -> float:
    """Trace per unit volume: the grid average of tr P(k) / q."""
    traces = np.trace(projections.matrices, axis1=-2, axis2=-1).real
    return float(np.mean(traces) / projections.q)


# =============================================================================
# REAL-SPACE PAIRINGS
# =============================================================================

def _dense(a: LatticeOperator | NDArray[np.complex128]) -> NDArray[np.complex128]:
    return a.dense() if isinstance(a, LatticeOperator) else np.asarray(a)


def default_pairing_boxes(domain: LatticeDomain) -> BoxSequence:
    """Central box of side min(N1, N2) // 3, well inside the window."""
    return BoxSequence.central(domain.window, max(1, min(domain.shape) // 3))


def xi_pairing(a0: LatticeOperator | NDArray[np.complex128],
               a1: LatticeOperator | NDArray[np.complex128],
               a2: LatticeOperator | NDArray[np.complex128],
               domain: LatticeDomain, boxes: BoxSequence | None = None) -> complex:
    """
    xi(a0, a1, a2) = i 2pi T(a0 (d1 a1 d2 a2 - d2 a1 d1 a2)).

    Derivations are the commutator form i[., n_j], so the domain must be open.
    T is the box average over the last box; by default a central box a third
    of the window wide, since boxes reaching the open edge pick up edge
    currents that cancel the bulk value.
    """
    boxes = boxes or default_pairing_boxes(domain)
    m0, m1, m2 = _dense(a0), _dense(a1), _dense(a2)
    d1a1 = commutator_derivation(m1, 1, domain)
    d2a1 = commutator_derivation(m1, 2, domain)
    d1a2 = commutator_derivation(m2, 1, domain)
    d2a2 = commutator_derivation(m2, 2, domain)
    density = m0 @ (d1a1 @ d2a2 - d2a1 @ d1a2)
    return 1j * TWO_PI * dense_trace(density, domain, boxes.last)


def chern_realspace(projection: LatticeOperator | NDArray[np.complex128],
                    domain: LatticeDomain, boxes: BoxSequence | None = None) -> ChernEstimate:
    """
    Real-space Chern number xi(P, P, P) on an open window.

    Raises:
        NumericalError: If P is not a projection.
    """
    matrix = _dense(projection)
    residual = float(np.max(np.abs(matrix @ matrix - matrix), initial=0.0))
    if residual > TOLERANCES.realspace_projection:
        raise NumericalError("chern_realspace", f"input is not a projection ({residual:.2e})")
    value = xi_pairing(matrix, matrix, matrix, domain, boxes)
    estimate = _estimate(value.real)
    logger.info("Real-space Chern %.6f (imag %.2e)", value.real, value.imag)
    return estimate


def spectral_projection(h: LatticeOperator | NDArray[np.complex128], mu: float) -> NDArray[np.complex128]:
    """Dense projection onto the eigenvectors of h with energy below mu."""
    evals, evecs = scipy.linalg.eigh(_dense(h))
    frames = evecs[:, evals < mu]
    return frames @ frames.conj().T


# =============================================================================
# GAP LABELS AND BUTTERFLY
# =============================================================================

@dataclass(frozen=True)
class GapLabel:
    """Integers (M, N) with trace = M + N * theta."""
    m: int
    n: int
    residual: float


def gap_label(trace: float, chern: int, theta: float) -> GapLabel:
    """Solve trace = M + chern * theta for the integer M."""
    raw = trace - chern * theta
    m = int(round(raw))
    return GapLabel(m, chern, abs(raw - m))


def coprime_fluxes(q_max: int) -> list[tuple[int, int]]:
    """All p/q in [0, 1) with gcd(p, q) = 1 and q <= q_max."""
    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    return [(p, q) for q in range(1, q_max + 1) for p in range(q) if gcd(p, q) == 1]


def hofstadter_butterfly(q_max: int = NUMERICS.butterfly_q_max,
                         k_grid: int = NUMERICS.butterfly_k_grid) -> list[tuple[int, int, float]]:
    """(p, q, energy) rows of the Hofstadter spectrum for every coprime p/q."""
    rows: list[tuple[int, int, float]] = []
    for p, q in coprime_fluxes(q_max):
        energies = np.sort(harper_bloch_family(p, q, (k_grid, k_grid)).eigenvalues().ravel())
        rows.extend((p, q, float(e)) for e in energies)
    logger.info("Butterfly: %d fluxes, %d energies", len(coprime_fluxes(q_max)), len(rows))
    return rows


# =============================================================================
# POWER-RIEFFEL PROJECTION
# =============================================================================

def _f_profile(x: NDArray[np.float64], theta: float, delta: float) -> NDArray[np.float64]:
    """Piecewise linear f on the circle [0, 1)."""
    x = np.mod(x, 1.0)
    out = np.zeros_like(x)
    rising = x <= delta
    out[rising] = x[rising] / delta
    out[(x > delta) & (x < theta)] = 1.0
    falling = (x >= theta) & (x <= theta + delta)
    out[falling] = 1.0 + (theta - x[falling]) / delta
    return out


def _g_profile(x: NDArray[np.float64], theta: float, delta: float) -> NDArray[np.float64]:
    """g = sqrt(f (1 - f)) on [0, delta], zero elsewhere."""
    x = np.mod(x, 1.0)
    f = _f_profile(x, theta, delta)
    return np.where(x <= delta, np.sqrt(np.clip(f * (1.0 - f), 0.0, None)), 0.0)


@dataclass(frozen=True)
class PowerRieffelRep:
    """
    The projection s1* d1 + d0 + d1 s1 on a K-point circle grid.

    s1 shifts the circle variable by theta = J/K and s2 multiplies by
    e^{2 pi i x}, so that s1 s2 = e^{2 pi i theta} s2 s1.
    """
    theta: float
    delta: float
    K: int
    J: int
    D: int
    d0: NDArray[np.float64] = field(repr=False)
    d1: NDArray[np.float64] = field(repr=False)

    @property
    def matrix(self) -> NDArray[np.complex128]:
        return self.at(0.0, 0.0)

    def at(self, alpha: float, t: float) -> NDArray[np.complex128]:
        """The projection moved by the dual action: s1 -> e^{i alpha} s1, x -> x + t."""
        x = np.arange(self.K) / self.K + t
        f = _f_profile(x, self.theta, self.delta)
        g = _g_profile(x, self.theta, self.delta)
        g_back = _g_profile(x - self.theta, self.theta, self.delta)
        rows = np.arange(self.K)
        p = np.zeros((self.K, self.K), dtype=complex)
        p[rows, rows] = f
        p[rows, (rows + self.J) % self.K] += np.exp(1j * alpha) * g
        p[rows, (rows - self.J) % self.K] += np.exp(-1j * alpha) * g_back
        return p

    def trace(self) -> float:
        """Normalized trace (1/K) Tr p."""
        return float(np.trace(self.matrix).real / self.K)

    def projection_residuals(self) -> tuple[float, float]:
        """(||p^2 - p||, ||p* - p||) in operator norm."""
        p = self.matrix
        return (float(scipy.linalg.norm(p @ p - p, 2)), float(scipy.linalg.norm(p.conj().T - p, 2)))

    def structure_residuals(self) -> dict[str, float]:
        """Residuals of the pointwise relations between f and g, plus the support identity."""
        g, f = self.d1, self.d0
        g_back = np.roll(g, self.J)       # g(x - theta)
        f_next = np.roll(f, -self.J)      # f(x + theta)
        support = (g > 0).astype(float)
        return {
            "disjoint_support": float(np.max(np.abs(g_back * g))),
            "partition": float(np.max(np.abs(g * (f + f_next) - g))),
            "projection": float(np.max(np.abs(f ** 2 + g ** 2 + g_back ** 2 - f))),
            "support_identity": float(np.max(np.abs(g ** 2 - support * (f - f ** 2)))),
        }


def suggest_circle_points(theta: float, delta: float) -> int:
    """Smallest grid size making theta * K and delta * K integers."""
    a = Fraction(theta).limit_denominator(10_000)
    b = Fraction(delta).limit_denominator(10_000)
    return a.denominator * b.denominator // gcd(a.denominator, b.denominator)


def power_rieffel(theta: float, delta: float,
                  K: int = POWER_RIEFFEL.circle_points) -> PowerRieffelRep:
    """
    Build the Power-Rieffel projection on a commensurate circle grid.

    Args:
        theta: Rotation number in (0, 1).
        delta: Ramp width with 0 < delta < theta and theta + delta < 1.
        K: Number of circle points; theta * K and delta * K must be integers.

    Returns:
        The representation with d0 = f and d1 = g sampled on the grid.

    Raises:
        ValueError: If the parameters violate the ordering constraints or the
            grid is not commensurate (the message suggests a valid K).

    Examples:
        >>> round(power_rieffel(1 / 3, 1 / 5, 15).trace(), 12)
        0.333333333333
    """
    if not (0.0 < delta < theta and theta + delta < 1.0):
        raise ValueError(f"need 0 < delta < theta and theta + delta < 1, got theta={theta}, delta={delta}")
    j_raw, d_raw = theta * K, delta * K
    if abs(j_raw - round(j_raw)) > 1e-9 or abs(d_raw - round(d_raw)) > 1e-9:
        raise ValueError(f"K={K} is not commensurate with theta={theta}, delta={delta}; "
                         f"try K={suggest_circle_points(theta, delta)}")
    J, D = int(round(j_raw)), int(round(d_raw))
    theta, delta = J / K, D / K
    index = np.arange(K)
    f = np.zeros(K)
    f[: D + 1] = index[: D + 1] / D
    f[D + 1: J] = 1.0
    f[J: J + D + 1] = 1.0 - (index[J: J + D + 1] - J) / D
    g = np.zeros(K)
    g[: D + 1] = np.sqrt(np.clip(f[: D + 1] * (1.0 - f[: D + 1]), 0.0, None))
    rep = PowerRieffelRep(theta, delta, K, J, D, f, g)
    logger.debug("Power-Rieffel rep theta=%d/%d delta=%d/%d", J, K, D, K)
    return rep


def chern_power_rieffel(rep: PowerRieffelRep,
                        grid: tuple[int, int] = POWER_RIEFFEL.dual_grid) -> ChernEstimate:
    """
    Chern number of the Power-Rieffel projection from the dual-torus action.

    The family P(alpha, beta) over the dual torus has bundle Chern number
    K * Ch. Translating x by one grid cell conjugates P by the cyclic
    relabeling, so only beta in [0, 2 pi / K) is sampled and the last link
    closes onto the relabeled frames.

    Args:
        rep: Power-Rieffel representation.
        grid: (alpha points on the circle, beta points per grid cell).
    """
    n_alpha, n_beta = grid
    if n_alpha < 3 or n_beta < 1:
        raise ValueError(f"dual grid too small: {grid}")
    frames = np.empty((n_alpha, n_beta, rep.K, rep.J), dtype=complex)
    for i in range(n_alpha):
        alpha = TWO_PI * i / n_alpha
        for j in range(n_beta):
            evals, evecs = scipy.linalg.eigh(rep.at(alpha, j / (n_beta * rep.K)))
            rank = int((evals > 0.5).sum())
            if rank != rep.J:
                raise NumericalError("chern_power_rieffel", f"rank {rank} differs from {rep.J}")
            frames[i, j] = evecs[:, rep.K - rep.J:]
    seam = np.roll(frames[:, 0], -1, axis=1)
    estimate = _estimate(plaquette_flux(frames, seam))
    logger.info("Power-Rieffel Chern %.6f on %dx%d dual grid", estimate.raw, n_alpha, n_beta)
    return estimate
