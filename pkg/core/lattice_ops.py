"""
MagLat - Lattice Operators
==========================
Finite-band operators on a lattice window, stored as hopping maps.

An operator `a` is the map {(r, s): c_rs} where c_rs is a complex array over
the window and <n|a|m> = c_{n-m}(n). This is the Fourier decomposition
a = sum g_rs s1^r s2^s up to the gauge phases of the monomials, so Fourier
extraction, Cesaro means and derivations act key by key. Dense matrices are
an on-demand view (row-major site order, index = i1 * N2 + i2).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from math import gcd
from typing import TYPE_CHECKING, Iterable, Mapping

import numpy as np
import scipy.linalg
import scipy.sparse

if TYPE_CHECKING:
    from numpy.typing import NDArray

from config import NUMERICS, TOLERANCES, setup_logging
from .exceptions import DomainError, NumericalError
from .fields import VectorPotential, Window

# Module logger
logger = setup_logging()


# =============================================================================
# TYPE ALIASES
# =============================================================================

Hop = tuple[int, int]
HoppingMap = dict[Hop, "NDArray[np.complex128]"]


# =============================================================================
# DOMAINS
# =============================================================================

class Boundary(str, Enum):
    OPEN = "open"
    MAGNETIC_TORUS = "magnetic_torus"


@dataclass(frozen=True)
class LatticeDomain:
    """A finite realization of l^2(Z^2): an open window or a magnetic torus."""
    window: Window
    boundary: Boundary = Boundary.OPEN
    flux: tuple[int, int] | None = None   # (p, q) on a magnetic torus

    def __post_init__(self) -> None:
        if self.boundary == Boundary.MAGNETIC_TORUS:
            if self.flux is None:
                raise DomainError(self.describe(), "a magnetic torus needs a flux p/q")
            p, q = self.flux
            if q <= 0 or gcd(p, q) != 1:
                raise DomainError(self.describe(), f"flux {p}/{q} is not in lowest terms")
            n1, n2 = self.window.shape
            if n1 % q or n2 % q:
                raise DomainError(self.describe(),
                                  f"side lengths {self.window.shape} not divisible by q={q}")

    @classmethod
    def open(cls, half_width: int) -> LatticeDomain:
        return cls(Window.square(half_width))

    @classmethod
    def torus(cls, side: int, p: int, q: int) -> LatticeDomain:
        return cls(Window.centered(side), Boundary.MAGNETIC_TORUS, (p, q))

    @property
    def periodic(self) -> bool:
        return self.boundary == Boundary.MAGNETIC_TORUS

    @property
    def shape(self) -> tuple[int, int]:
        return self.window.shape

    @property
    def size(self) -> int:
        return self.window.size

    def describe(self) -> str:
        if self.boundary == Boundary.OPEN:
            return f"open {self.window.shape[0]}x{self.window.shape[1]}"
        return f"magnetic torus {self.window.shape[0]}x{self.window.shape[1]} flux {self.flux}"

    def coords(self) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
        return self.window.coords()


def _shift(values: NDArray[np.complex128], hop: Hop, periodic: bool) -> NDArray[np.complex128]:
    """Array whose entry at n is values[n - hop] (zero outside an open window)."""
    r, s = hop
    if periodic:
        return np.roll(values, shift=(r, s), axis=(0, 1))
    out = np.zeros_like(values)
    n1, n2 = values.shape
    if abs(r) >= n1 or abs(s) >= n2:
        return out
    dst1 = slice(max(r, 0), n1 + min(r, 0))
    src1 = slice(max(-r, 0), n1 + min(-r, 0))
    dst2 = slice(max(s, 0), n2 + min(s, 0))
    src2 = slice(max(-s, 0), n2 + min(-s, 0))
    out[dst1, dst2] = values[src1, src2]
    return out


def _source_mask(domain: LatticeDomain, hop: Hop) -> NDArray[np.bool_]:
    """Sites n whose hop source n - hop lies in the window."""
    if domain.periodic:
        return np.ones(domain.shape, dtype=bool)
    return _shift(np.ones(domain.shape, dtype=complex), hop, False).real > 0.5


# =============================================================================
# OPERATORS
# =============================================================================

@dataclass(frozen=True)
class LatticeOperator:
    """A finite-band operator on a lattice domain, stored as a hopping map."""
    domain: LatticeDomain
    hops: Mapping[Hop, NDArray[np.complex128]] = field(repr=False)
    hermitian: bool = False

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_hops(cls, domain: LatticeDomain, hops: Mapping[Hop, object],
                  hermitian: bool = False) -> LatticeOperator:
        """Build an operator, broadcasting scalars and masking boundary hops."""
        clean: HoppingMap = {}
        for hop in sorted(hops):
            values = np.broadcast_to(np.asarray(hops[hop], dtype=complex), domain.shape).copy()
            values[~_source_mask(domain, hop)] = 0.0
            clean[(int(hop[0]), int(hop[1]))] = values
        return cls(domain, clean, hermitian)

    @classmethod
    def identity(cls, domain: LatticeDomain) -> LatticeOperator:
        return cls.from_hops(domain, {(0, 0): 1.0}, hermitian=True)

    @classmethod
    def diagonal(cls, domain: LatticeDomain, values: object) -> LatticeOperator:
        return cls.from_hops(domain, {(0, 0): values})

    @classmethod
    def monomial(cls, domain: LatticeDomain, hop: Hop, coefficient: object = 1.0) -> LatticeOperator:
        return cls.from_hops(domain, {hop: coefficient})

    @classmethod
    def from_dense(cls, matrix: NDArray[np.complex128], domain: LatticeDomain,
                   band: int) -> LatticeOperator:
        """Read the hopping map of a dense matrix with band radius <= `band`."""
        n1, n2 = domain.shape
        rows = np.arange(domain.size).reshape(n1, n2)
        hops: HoppingMap = {}
        for r in range(-band, band + 1):
            for s in range(-band, band + 1):
                mask = _source_mask(domain, (r, s))
                cols = _shift(rows.astype(complex), (r, s), domain.periodic).real.astype(int)
                values = np.where(mask, matrix[rows, cols], 0.0)
                if np.any(values):
                    hops[(r, s)] = values.astype(complex)
        return cls(domain, hops)

    # -- views ----------------------------------------------------------------

    @property
    def band_radius(self) -> int:
        return max((max(abs(r), abs(s)) for r, s in self.hops), default=0)

    def coefficient(self, hop: Hop) -> NDArray[np.complex128]:
        if hop in self.hops:
            return self.hops[hop]
        return np.zeros(self.domain.shape, dtype=complex)

    def to_sparse(self) -> scipy.sparse.csr_matrix:
        n1, n2 = self.domain.shape
        index = np.arange(self.domain.size).reshape(n1, n2)
        rows, cols, data = [], [], []
        for hop in sorted(self.hops):
            values = self.hops[hop]
            mask = _source_mask(self.domain, hop) & (values != 0)
            source = _shift(index.astype(complex), hop, self.domain.periodic).real.astype(int)
            rows.append(index[mask])
            cols.append(source[mask])
            data.append(values[mask])
        if not rows:
            return scipy.sparse.csr_matrix((self.domain.size, self.domain.size), dtype=complex)
        return scipy.sparse.coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.domain.size, self.domain.size)).tocsr()

    def dense(self) -> NDArray[np.complex128]:
        return self.to_sparse().toarray()

    def diagonal_values(self) -> NDArray[np.complex128]:
        """<n|a|n> over the window (torus hops aliasing to zero included)."""
        out = np.zeros(self.domain.shape, dtype=complex)
        n1, n2 = self.domain.shape
        for (r, s), values in self.hops.items():
            if (r, s) == (0, 0) or (self.domain.periodic and r % n1 == 0 and s % n2 == 0):
                out += values
        return out

    # -- algebra --------------------------------------------------------------

    def _combine(self, other: LatticeOperator, sign: float) -> LatticeOperator:
        if other.domain != self.domain:
            raise DomainError(self.domain.describe(), "operators live on different domains")
        hops: HoppingMap = {k: v.copy() for k, v in self.hops.items()}
        for hop, values in other.hops.items():
            hops[hop] = hops.get(hop, 0.0) + sign * values
        return LatticeOperator(self.domain, dict(sorted(hops.items())),
                               self.hermitian and other.hermitian)

    def __add__(self, other: LatticeOperator) -> LatticeOperator:
        return self._combine(other, 1.0)

    def __sub__(self, other: LatticeOperator) -> LatticeOperator:
        return self._combine(other, -1.0)

    def __mul__(self, scalar: complex) -> LatticeOperator:
        hermitian = self.hermitian and complex(scalar).imag == 0.0
        return LatticeOperator(self.domain, {k: scalar * v for k, v in self.hops.items()}, hermitian)

    __rmul__ = __mul__

    def __matmul__(self, other: LatticeOperator) -> LatticeOperator:
        """Operator product: (ab)_{u+v}(n) = a_u(n) b_v(n - u)."""
        if other.domain != self.domain:
            raise DomainError(self.domain.describe(), "operators live on different domains")
        periodic = self.domain.periodic
        hops: HoppingMap = {}
        for u in sorted(self.hops):
            a_u = self.hops[u]
            for v in sorted(other.hops):
                key = (u[0] + v[0], u[1] + v[1])
                term = a_u * _shift(other.hops[v], u, periodic)
                hops[key] = hops[key] + term if key in hops else term
        return LatticeOperator(self.domain, dict(sorted(hops.items())))

    def adjoint(self) -> LatticeOperator:
        """(a*)_{-u}(n) = conj(a_u(n + u))."""
        hops = {(-r, -s): np.conj(_shift(values, (-r, -s), self.domain.periodic))
                for (r, s), values in self.hops.items()}
        return LatticeOperator(self.domain, dict(sorted(hops.items())), self.hermitian)

    def pruned(self, tol: float = 0.0) -> LatticeOperator:
        """Drop hops whose coefficients vanish (up to `tol`)."""
        hops = {k: v for k, v in self.hops.items() if np.max(np.abs(v), initial=0.0) > tol}
        return replace(self, hops=hops)

    def adjoint_residual(self) -> float:
        """max |a_u - (a*)_u| over all hops, without a dense realization."""
        other = self.adjoint()
        keys = set(self.hops) | set(other.hops)
        return max((float(np.max(np.abs(self.coefficient(k) - other.coefficient(k)), initial=0.0))
                    for k in keys), default=0.0)

    def hermiticity_residual(self) -> float:
        m = self.dense()
        return float(np.max(np.abs(m - m.conj().T), initial=0.0))


def operator_norm(a: LatticeOperator | NDArray[np.complex128]) -> float:
    """Largest singular value of the dense realization."""
    matrix = a.dense() if isinstance(a, LatticeOperator) else np.asarray(a)
    if matrix.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(matrix)[0])


def random_banded_operator(domain: LatticeDomain, band: int, seed: int = 0,
                           hermitian: bool = False) -> LatticeOperator:
    """Random operator with every hop of radius <= band populated."""
    rng = np.random.default_rng(seed)
    hops = {}
    for r in range(-band, band + 1):
        for s in range(-band, band + 1):
            hops[(r, s)] = (rng.standard_normal(domain.shape)
                            + 1j * rng.standard_normal(domain.shape))
    a = LatticeOperator.from_hops(domain, hops)
    if hermitian:
        a = 0.5 * (a + a.adjoint())
        a = replace(a, hermitian=True)
    return a


# =============================================================================
# MAGNETIC TRANSLATIONS AND HAMILTONIANS
# =============================================================================

def _check_torus_potential(domain: LatticeDomain, a1: NDArray[np.float64],
                           a2: NDArray[np.float64]) -> None:
    """The wrapped circulation must be the constant flux 2*pi*p/q on every cell."""
    p, q = domain.flux  # type: ignore[misc]
    wrapped = a1 + np.roll(a2, 1, axis=0) - np.roll(a1, 1, axis=1) - a2
    if not np.allclose(np.exp(1j * wrapped), np.exp(2j * np.pi * p / q), atol=1e-10):
        raise DomainError(domain.describe(),
                          f"potential does not close to the constant flux 2*pi*{p}/{q} on the torus")


def magnetic_translation(potential: VectorPotential, axis: int,
                         domain: LatticeDomain) -> LatticeOperator:
    """
    Twisted shift (s_j psi)(n) = exp(i A(n, n - e_j)) psi(n - e_j).

    Args:
        potential: Edge values covering the domain window.
        axis: 1 or 2.
        domain: Open window or magnetic torus.

    Returns:
        Single-hop operator; unitary on a torus, a partial isometry on open
        windows.

    Raises:
        DomainError: If the potential does not cover the window, or does not
            match the torus flux.
    """
    if axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    if not potential.window.contains(domain.window):
        raise DomainError(domain.describe(), "potential window does not cover the domain")
    s1, s2 = potential.window.slices_of(domain.window)
    a1 = potential.a1[s1, s2]
    a2 = potential.a2[s1, s2]
    if domain.periodic:
        _check_torus_potential(domain, a1, a2)
    values = a1 if axis == 1 else a2
    hop = (1, 0) if axis == 1 else (0, 1)
    return LatticeOperator.from_hops(domain, {hop: np.exp(1j * values)})


def commutator_flux(s1: LatticeOperator, s2: LatticeOperator) -> LatticeOperator:
    """The flux operator s1 s2 s1* s2*, diagonal with e^{iB(n)} on interior sites."""
    flux = (s1 @ s2 @ s1.adjoint() @ s2.adjoint()).pruned()
    if set(flux.hops) - {(0, 0)}:
        raise NumericalError("commutator_flux", "inputs are not single-hop magnetic translations")
    return flux


def harper_hamiltonian(potential: VectorPotential, domain: LatticeDomain) -> LatticeOperator:
    """h = s1 + s1* + s2 + s2*."""
    s1 = magnetic_translation(potential, 1, domain)
    s2 = magnetic_translation(potential, 2, domain)
    h = s1 + s1.adjoint() + s2 + s2.adjoint()
    residual = h.adjoint_residual()
    if residual > TOLERANCES.hermiticity:
        raise NumericalError("harper_hamiltonian", f"hermiticity residual {residual:.3e}")
    return replace(h, hermitian=True)


def column_projection(domain: LatticeDomain, j: int) -> LatticeOperator:
    """Projection p_j onto the column n1 = j."""
    n1, _ = domain.coords()
    return LatticeOperator.diagonal(domain, (n1 == j).astype(float))


def half_plane_projections(domain: LatticeDomain) -> tuple[LatticeOperator, LatticeOperator]:
    """Projections (p_-, p_+) onto the half-planes n1 < 0 and n1 > 0."""
    n1, _ = domain.coords()
    return (LatticeOperator.diagonal(domain, (n1 < 0).astype(float)),
            LatticeOperator.diagonal(domain, (n1 > 0).astype(float)))


# =============================================================================
# FOURIER ANALYSIS
# =============================================================================

def fourier_coefficients(a: LatticeOperator) -> dict[Hop, NDArray[np.complex128]]:
    """The hopping map of `a`, in sorted key order."""
    return {hop: a.hops[hop].copy() for hop in sorted(a.hops)}


def fejer_weight(hop: Hop, order: int) -> float:
    r, s = hop
    return (1.0 - abs(r) / (order + 1)) * (1.0 - abs(s) / (order + 1))


def partial_sum(a: LatticeOperator, order: int) -> LatticeOperator:
    """S_N(a): all hops with |r|, |s| <= N."""
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    hops = {h: v for h, v in a.hops.items() if abs(h[0]) <= order and abs(h[1]) <= order}
    return LatticeOperator(a.domain, hops, a.hermitian)


def cesaro_mean(a: LatticeOperator, order: int) -> LatticeOperator:
    """
    Cesaro mean sigma_N(a) with Fejer weights.

    sigma_N(a) = sum_{|r|,|s|<=N} (1 - |r|/(N+1)) (1 - |s|/(N+1)) c_rs (hop r,s)

    Examples:
        sigma_1 of a single e1 hop is half of it.
    """
    truncated = partial_sum(a, order)
    hops = {h: fejer_weight(h, order) * v for h, v in truncated.hops.items()}
    return LatticeOperator(a.domain, hops, a.hermitian)


# =============================================================================
# DERIVATIONS
# =============================================================================

def derivation(a: LatticeOperator, axis: int) -> LatticeOperator:
    """
    Spatial derivation as a hop multiplier: hop (r, s) times -ir (axis 1) or -is (axis 2).

    On open windows this equals i[a, n_j]; on a torus it is the generator of
    the dual action, which is the meaningful derivation there.
    """
    if axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    index = axis - 1
    hops = {h: (-1j * h[index]) * v for h, v in a.hops.items() if h[index] != 0}
    return LatticeOperator(a.domain, hops)


def commutator_derivation(a: LatticeOperator | NDArray[np.complex128], axis: int,
                          domain: LatticeDomain | None = None) -> NDArray[np.complex128]:
    """
    Dense i[a, n_j]; only defined where position operators exist.

    Raises:
        DomainError: On a magnetic torus.
    """
    if isinstance(a, LatticeOperator):
        domain = a.domain
        matrix = a.dense()
    else:
        matrix = np.asarray(a)
    if domain is None:
        raise ValueError("a domain is required for dense input")
    if domain.periodic:
        raise DomainError(domain.describe(),
                          "positions are undefined on a torus; use derivation() instead")
    position = domain.coords()[axis - 1].ravel().astype(float)
    return 1j * (matrix * position[None, :] - position[:, None] * matrix)


# =============================================================================
# TRACE PER UNIT VOLUME
# =============================================================================

@dataclass(frozen=True)
class BoxSequence:
    """Concentric boxes of strictly increasing size inside a window."""
    boxes: tuple[Window, ...]

    def __post_init__(self) -> None:
        sizes = [b.size for b in self.boxes]
        if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("box sizes must be strictly increasing")

    @classmethod
    def concentric(cls, window: Window, count: int = NUMERICS.box_count,
                   step: int = 1) -> BoxSequence:
        """Boxes of sides step, 2 step, ... centred in `window`, the last filling it."""
        n1, n2 = window.shape
        largest = min(n1, n2)
        sides = sorted({max(step, (largest * (i + 1) // count) // step * step)
                        for i in range(count)})
        c1 = window.n1_min + (n1 - 1) // 2
        c2 = window.n2_min + (n2 - 1) // 2
        boxes = []
        for side in sides:
            lo1 = max(window.n1_min, c1 - (side - 1) // 2)
            lo2 = max(window.n2_min, c2 - (side - 1) // 2)
            boxes.append(Window(lo1, min(window.n1_max, lo1 + side - 1),
                                lo2, min(window.n2_max, lo2 + side - 1)))
        return cls(tuple(boxes))

    @classmethod
    def central(cls, window: Window, side: int) -> BoxSequence:
        """A single central box of the given side."""
        n1, n2 = window.shape
        lo1 = window.n1_min + (n1 - side) // 2
        lo2 = window.n2_min + (n2 - side) // 2
        return cls((Window(lo1, lo1 + side - 1, lo2, lo2 + side - 1),))

    @property
    def last(self) -> Window:
        return self.boxes[-1]


@dataclass(frozen=True)
class TraceResult:
    """Trace per unit volume with its convergence table."""
    value: complex
    table: tuple[tuple[int, complex], ...]


def box_average(diagonal: NDArray[np.complex128], window: Window, box: Window) -> complex:
    s1, s2 = window.slices_of(box)
    return complex(np.mean(diagonal[s1, s2]))


def trace_per_unit_volume(a: LatticeOperator, boxes: BoxSequence | None = None) -> TraceResult:
    """
    Box-averaged diagonal (1/|Lambda_i|) sum_{n in Lambda_i} <n|a|n>.

    Args:
        a: Operator.
        boxes: Concentric boxes; defaults to `BoxSequence.concentric` on the
            domain window.

    Returns:
        The value on the largest box together with the whole sequence.
    """
    boxes = boxes or BoxSequence.concentric(a.domain.window)
    diagonal = a.diagonal_values()
    table = tuple((box.size, box_average(diagonal, a.domain.window, box)) for box in boxes.boxes)
    logger.debug("Trace table: %s", table)
    return TraceResult(table[-1][1], table)


def dense_trace(matrix: NDArray[np.complex128], domain: LatticeDomain, box: Window) -> complex:
    """Box-averaged diagonal of a dense matrix over `domain`."""
    diagonal = np.diag(matrix).reshape(domain.shape)
    return box_average(diagonal, domain.window, box)


# =============================================================================
# REGULARITY NORMS
# =============================================================================

@dataclass(frozen=True)
class RegularityNorms:
    decay_norm: float
    sobolev_norm: float


def decay_norm(a: LatticeOperator, k: int) -> float:
    """r_k = max over hops of (1 + r^2 + s^2)^{k/2} max|c_rs|."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    return max((float((1 + r * r + s * s) ** (k / 2) * np.max(np.abs(v), initial=0.0))
                for (r, s), v in a.hops.items()), default=0.0)


def lp_norm(a: LatticeOperator, p: int, boxes: BoxSequence | None = None) -> float:
    """
    ||a||_{L^p} = T(|a|^p)^{1/p} with |a| = (a* a)^{1/2}.

    p = 2 stays in the hopping algebra; other p use the dense spectral
    decomposition of a* a.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    boxes = boxes or BoxSequence.concentric(a.domain.window)
    if p == 2:
        value = trace_per_unit_volume(a.adjoint() @ a, boxes).value.real
        return float(np.sqrt(max(value, 0.0)))
    gram = a.dense()
    gram = gram.conj().T @ gram
    evals, evecs = scipy.linalg.eigh(gram)
    powered = (evecs * np.clip(evals, 0.0, None) ** (p / 2)) @ evecs.conj().T
    value = dense_trace(powered, a.domain, boxes.last).real
    return float(max(value, 0.0) ** (1.0 / p))


def regularity_norms(a: LatticeOperator, k: int, p: int,
                     boxes: BoxSequence | None = None) -> RegularityNorms:
    """
    Decay norm r_k and Sobolev norm ||a||_{k,Lp}.

    The Sobolev norm sums ||grad_1^i grad_2^j a||_{Lp} over all i + j <= k.
    """
    total = 0.0
    for order in range(k + 1):
        for i in range(order + 1):
            term = a
            for _ in range(i):
                term = derivation(term, 1)
            for _ in range(order - i):
                term = derivation(term, 2)
            total += lp_norm(term, p, boxes)
    return RegularityNorms(decay_norm(a, k), total)


# =============================================================================
# BULK EVALUATION
# =============================================================================

@dataclass(frozen=True)
class BulkPair:
    """The asymptotic constant-field operators (n1 -> -inf, n1 -> +inf)."""
    minus: LatticeOperator
    plus: LatticeOperator


def evaluate_bulk(a: LatticeOperator, tol: float = TOLERANCES.stabilization,
                  margin: int | None = None) -> BulkPair:
    """
    Evaluate the left and right asymptotic limits of an Iwatsuka-type operator.

    Each coefficient must be independent of n1 (at fixed n2) over the outer
    quarter of the window on either side, skipping `margin` columns at the
    open boundary (default: band radius + 1).

    Raises:
        NumericalError: If some coefficient does not stabilize.
    """
    n1, _ = a.domain.shape
    margin = a.band_radius + 1 if margin is None else margin
    quarter = max(n1 // 4, 2)
    if 2 * (margin + quarter) > n1:
        raise NumericalError("evaluate_bulk", f"window of width {n1} too small for margin {margin}")
    left = slice(margin, margin + quarter)
    right = slice(n1 - margin - quarter, n1 - margin)
    minus: HoppingMap = {}
    plus: HoppingMap = {}
    for hop in sorted(a.hops):
        values = a.hops[hop]
        for slab, ref, target in ((left, margin, minus), (right, n1 - margin - 1, plus)):
            block = values[slab]
            column = values[ref]
            scale = max(1.0, float(np.max(np.abs(block), initial=0.0)))
            if np.max(np.abs(block - column[None, :]), initial=0.0) > tol * scale:
                raise NumericalError(
                    "evaluate_bulk",
                    f"hop {hop} does not stabilize: not in the Iwatsuka-type algebra at this window size")
            target[hop] = np.broadcast_to(column[None, :], values.shape)
    return BulkPair(LatticeOperator.from_hops(a.domain, minus, a.hermitian),
                    LatticeOperator.from_hops(a.domain, plus, a.hermitian))
