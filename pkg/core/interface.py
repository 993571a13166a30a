"""
MagLat - Interface
==================
Bloch-Floquet strip reduction of vertically invariant fields, interface
spectra, the gap unitary, winding numbers, spectral flow and the
bulk-interface duality check for Iwatsuka fields.

Strip sites are m = -M..M (array index m + M). Fibers are real symmetric
tridiagonal (Jacobi) matrices, so their spectra are simple and branches can be
followed by sorted index.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Iterator, Sequence

import numpy as np
import scipy.linalg

if TYPE_CHECKING:
    from numpy.typing import NDArray

from config import NUMERICS, TOLERANCES, setup_logging, worker_count
from .exceptions import FieldError, GapError, NumericalError
from .fields import FieldKind, MagneticField
from .nctorus import BlochFamily, bulk_gaps, chern_fhs, fermi_projection, harper_bloch_family

# Module logger
logger = setup_logging()

TWO_PI = 2.0 * np.pi


# =============================================================================
# BLOCH-FLOQUET PHASE AND FIBERS
# =============================================================================

@dataclass(frozen=True)
class BFPhase:
    """f on [-M, M] with f(0) = 0 and f(m) - f(m-1) = B(m, 0)."""
    half_width: int
    values: NDArray[np.float64] = field(repr=False)

    @property
    def sites(self) -> NDArray[np.int64]:
        return np.arange(-self.half_width, self.half_width + 1)

    def __call__(self, m: int) -> float:
        return float(self.values[m + self.half_width])


def bf_phase(field_: MagneticField, M: int) -> BFPhase:
    """
    Solve f(m) - f(m-1) = B(m) with f(0) = 0 by cumulative sums.

    Raises:
        FieldError: If the field is not invariant along e2.

    Examples:
        >>> bf_phase(MagneticField.constant(0.5), 2).values.tolist()
        [-1.0, -0.5, 0.0, 0.5, 1.0]
    """
    if M < 1:
        raise ValueError(f"strip half-width must be >= 1, got {M}")
    if not field_.is_vertically_invariant:
        raise FieldError(field_.kind.value, "Bloch-Floquet reduction needs a field invariant along e2")
    right = np.cumsum(field_.column_strength(np.arange(1, M + 1)))
    # f(m) = -(B(m+1) + ... + B(0)) for m < 0
    left = -np.cumsum(field_.column_strength(np.arange(0, -M, -1)))[::-1]
    return BFPhase(M, np.concatenate([left, [0.0], right]))


@dataclass(frozen=True)
class FiberOperator:
    """Harper fiber at momentum k: unit hops along the strip, diagonal 2cos(k - f(m))."""
    k: float
    phase: BFPhase

    @property
    def half_width(self) -> int:
        return self.phase.half_width

    @property
    def size(self) -> int:
        return 2 * self.half_width + 1

    @property
    def diagonal(self) -> NDArray[np.float64]:
        return 2.0 * np.cos(self.k - self.phase.values)

    @property
    def off_diagonal(self) -> NDArray[np.float64]:
        return np.ones(self.size - 1)

    @property
    def matrix(self) -> NDArray[np.complex128]:
        return (np.diag(self.diagonal) + np.diag(self.off_diagonal, 1)
                + np.diag(self.off_diagonal, -1)).astype(complex)

    def eigh(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Ascending eigenvalues and real orthonormal eigenvectors."""
        # stemr loses orthogonality on the nearly degenerate strip-end pairs
        return scipy.linalg.eigh_tridiagonal(self.diagonal, self.off_diagonal, lapack_driver="stev")

    def momentum_derivative(self) -> NDArray[np.float64]:
        """Diagonal of dh/dk (the hops do not depend on k)."""
        return -2.0 * np.sin(self.k - self.phase.values)


def fiber_hamiltonian(field_: MagneticField | BFPhase, k: float, M: int | None = None) -> FiberOperator:
    """
    Fiber h(k) of the Harper operator on the strip [-M, M] with open ends.

    Args:
        field_: Vertically invariant field, or a precomputed phase.
        k: Momentum conjugate to n2 (2pi-periodic).
        M: Strip half-width (required with a field).
    """
    if isinstance(field_, BFPhase):
        phase = field_
    else:
        if M is None:
            raise ValueError("strip half-width M is required")
        phase = bf_phase(field_, M)
    return FiberOperator(float(k), phase)


def k_grid(points: int) -> NDArray[np.float64]:
    """Uniform closed grid 2 pi j / N, j = 0..N-1."""
    if points < 3:
        raise ValueError(f"k grid needs at least 3 points, got {points}")
    return TWO_PI * np.arange(points) / points


def _map(func: Any, items: Sequence[Any]) -> list[Any]:
    """Apply `func` over a thread pool, keeping submission order."""
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(func, items))


# =============================================================================
# INTERFACE SPECTRUM
# =============================================================================

@dataclass(frozen=True)
class SpectrumTable:
    """Eigenvalues and interface weights over a k grid, shapes (Nk, 2M+1)."""
    k: NDArray[np.float64] = field(repr=False)
    energies: NDArray[np.float64] = field(repr=False)
    weights: NDArray[np.float64] = field(repr=False)

    def rows(self) -> Iterator[tuple[float, int, float, float]]:
        """(k, index, energy, interface_weight) in k-major order."""
        for i, k in enumerate(self.k):
            for j in range(self.energies.shape[1]):
                yield (float(k), j, float(self.energies[i, j]), float(self.weights[i, j]))


def interface_weights(vectors: NDArray[np.float64], M: int, radius: int | None = None) -> NDArray[np.float64]:
    """Weight of each eigenvector on the central sites |m| <= radius (default M/2)."""
    radius = M // 2 if radius is None else radius
    central = slice(M - radius, M + radius + 1)
    return np.sum(np.abs(vectors[central, :]) ** 2, axis=0)


def interface_spectrum(field_: MagneticField, k_points: int | NDArray[np.float64],
                       M: int = NUMERICS.strip_half_width) -> SpectrumTable:
    """
    All strip eigenvalues per momentum with their interface weight.

    Args:
        field_: Vertically invariant field.
        k_points: Number of grid points or explicit momenta.
        M: Strip half-width.
    """
    phase = bf_phase(field_, M)
    ks = k_grid(k_points) if np.isscalar(k_points) else np.asarray(k_points, dtype=float)

    def solve(k: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        evals, evecs = fiber_hamiltonian(phase, k).eigh()
        return evals, interface_weights(evecs, M)

    results = _map(solve, list(ks))
    energies = np.array([r[0] for r in results])
    weights = np.array([r[1] for r in results])
    logger.debug("Interface spectrum: %d momenta, strip size %d", len(ks), 2 * M + 1)
    return SpectrumTable(ks, energies, weights)


# =============================================================================
# SWITCH FUNCTIONS AND THE GAP UNITARY
# =============================================================================

@dataclass(frozen=True)
class SwitchFunction:
    """Non-decreasing ramp from 0 (E <= delta_min) to 1 (E >= delta_max)."""
    delta_min: float
    delta_max: float
    profile: str = "cosine"

    def __post_init__(self) -> None:
        if not self.delta_min < self.delta_max:
            raise ValueError(f"need delta_min < delta_max, got [{self.delta_min}, {self.delta_max}]")
        if self.profile not in ("cosine", "quintic"):
            raise ValueError(f"unknown ramp profile '{self.profile}'")

    @property
    def width(self) -> float:
        return self.delta_max - self.delta_min

    def _t(self, energy: NDArray[np.float64] | float) -> NDArray[np.float64]:
        return np.clip((np.asarray(energy, dtype=float) - self.delta_min) / self.width, 0.0, 1.0)

    def __call__(self, energy: NDArray[np.float64] | float) -> NDArray[np.float64]:
        t = self._t(energy)
        if self.profile == "cosine":
            return 0.5 * (1.0 - np.cos(np.pi * t))
        return t ** 3 * (10.0 - 15.0 * t + 6.0 * t ** 2)

    def derivative(self, energy: NDArray[np.float64] | float) -> NDArray[np.float64]:
        t = self._t(energy)
        if self.profile == "cosine":
            return 0.5 * np.pi * np.sin(np.pi * t) / self.width
        return 30.0 * t ** 2 * (1.0 - t) ** 2 / self.width

    def shrunk(self) -> SwitchFunction:
        """The same profile on the middle half of the window."""
        quarter = 0.25 * self.width
        return SwitchFunction(self.delta_min + quarter, self.delta_max - quarter, self.profile)


@dataclass(frozen=True)
class UnitaryFamily:
    """Unitaries u(k) on the strip over a uniform closed k grid, shape (Nk, 2M+1, 2M+1)."""
    k: NDArray[np.float64] = field(repr=False)
    matrices: NDArray[np.complex128] = field(repr=False)

    @property
    def half_width(self) -> int:
        return (self.matrices.shape[-1] - 1) // 2

    def unitarity_residual(self) -> float:
        n = self.matrices.shape[-1]
        gram = np.conj(np.swapaxes(self.matrices, -1, -2)) @ self.matrices
        return float(np.max(np.abs(gram - np.eye(n))))

    def adjoint(self) -> UnitaryFamily:
        return UnitaryFamily(self.k, np.conj(np.swapaxes(self.matrices, -1, -2)))


def _exponential(evals: NDArray[np.float64], evecs: NDArray[np.float64],
                 g: SwitchFunction) -> NDArray[np.complex128]:
    return (evecs * np.exp(2j * np.pi * g(evals))) @ evecs.T


def u_delta(fibers: Sequence[FiberOperator], g: SwitchFunction) -> UnitaryFamily:
    """
    u(k) = exp(i 2 pi g(h(k))) by eigendecomposition of each fiber.

    Raises:
        NumericalError: If the result is not unitary to 1e-10.
    """
    def build(fiber: FiberOperator) -> NDArray[np.complex128]:
        evals, evecs = fiber.eigh()
        return _exponential(evals, evecs, g)

    family = UnitaryFamily(np.array([f.k for f in fibers]), np.array(_map(build, list(fibers))))
    residual = family.unitarity_residual()
    if residual > TOLERANCES.projection:
        raise NumericalError("u_delta", f"unitarity residual {residual:.3e}")
    return family


def calibration_family(M: int, k_points: int = NUMERICS.k_points, direction: int = 1) -> UnitaryFamily:
    """
    u(k) = 1 + pi_0 (e^{i direction k} - 1) with pi_0 the projection onto m = 0.

    direction=+1 is the interface generator (winding 1), -1 its conjugate.
    """
    if direction not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction}")
    ks = k_grid(k_points)
    n = 2 * M + 1
    matrices = np.broadcast_to(np.eye(n, dtype=complex), (len(ks), n, n)).copy()
    matrices[:, M, M] = np.exp(1j * direction * ks)
    return UnitaryFamily(ks, matrices)


# =============================================================================
# INTERFACE PAIRINGS
# =============================================================================

@dataclass(frozen=True)
class WindingEstimate:
    """Winding number with its raw value and distance from the nearest integer."""
    raw: float
    value: int
    residual: float
    imaginary: float

    @property
    def converged(self) -> bool:
        return self.residual <= TOLERANCES.integer_residual


def k_derivative(values: NDArray[np.complex128], ks: NDArray[np.float64],
                 method: str = "spectral") -> NDArray[np.complex128]:
    """
    d/dk along axis 0 of a 2pi-periodic family sampled on a uniform closed grid.

    "spectral" differentiates the Fourier series, "central" uses symmetric
    differences.
    """
    n = len(ks)
    if method == "central":
        step = TWO_PI / n
        return (np.roll(values, -1, axis=0) - np.roll(values, 1, axis=0)) / (2.0 * step)
    if method != "spectral":
        raise ValueError(f"unknown derivative method '{method}'")
    freqs = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        freqs[n // 2] = 0.0
    shape = (n,) + (1,) * (values.ndim - 1)
    return np.fft.ifft(1j * freqs.reshape(shape) * np.fft.fft(values, axis=0), axis=0)


def _filter(M: int, filter_half_width: float) -> NDArray[np.int64]:
    if not 0 < filter_half_width <= M:
        raise ValueError(f"filter half-width must be in (0, {M}], got {filter_half_width}")
    sites = np.arange(-M, M + 1)
    return np.nonzero(np.abs(sites) <= filter_half_width)[0]


def eta_pairing(b0: UnitaryFamily, b1: UnitaryFamily, filter_half_width: float,
                method: str = "spectral") -> complex:
    """
    eta(b0, b1) = i T_I(b0 grad_I b1), with grad_I acting as -d/dk and T_I the
    k-average of the filtered trace over |m| <= W_f.
    """
    chi = _filter(b1.half_width, filter_half_width)
    db1 = k_derivative(b1.matrices[:, :, chi], b1.k, method)
    integrand = np.einsum("kml,klm->k", b0.matrices[:, chi, :], db1)
    step = TWO_PI / len(b1.k)
    return complex(-1j * step * np.sum(integrand) / TWO_PI)


def winding_number(family: UnitaryFamily, filter_half_width: float,
                   method: str = "spectral") -> WindingEstimate:
    """
    W = -(i / 2 pi) sum_j dk tr(chi u(k_j)^* du/dk(k_j)).

    Oriented so that the interface generator 1 + pi_0 (e^{ik} - 1) has W = 1.

    Args:
        family: Unitary family on a uniform closed k grid.
        filter_half_width: W_f; the trace runs over |m| <= W_f.
        method: "spectral" (default) or "central" k-derivative.
    """
    chi = _filter(family.half_width, filter_half_width)
    columns = family.matrices[:, :, chi]
    derivative = k_derivative(columns, family.k, method)
    integrand = np.sum(np.conj(columns) * derivative, axis=(1, 2))
    step = TWO_PI / len(family.k)
    value = -1j * step * np.sum(integrand) / TWO_PI
    raw = float(value.real)
    nearest = int(round(raw))
    estimate = WindingEstimate(raw, nearest, abs(raw - nearest), float(value.imag))
    logger.debug("Winding %.12f (imag %.2e)", raw, value.imag)
    return estimate


def interface_current(fibers: Sequence[FiberOperator], g: SwitchFunction,
                      filter_half_width: float) -> float:
    """
    T_I(g'(h) grad_I h) with grad_I acting as -d/dk.

    The k-derivative of a Harper fiber is diagonal, so the filtered trace is
    sum_{|m| <= W_f} g'(h)[m, m] * (-dh/dk)[m]. On a gapped configuration the
    result is -W / 2pi.
    """
    chi = _filter(fibers[0].half_width, filter_half_width)

    def density(fiber: FiberOperator) -> float:
        evals, evecs = fiber.eigh()
        local = np.sum(g.derivative(evals)[None, :] * evecs[chi, :] ** 2, axis=1)
        return float(-np.sum(local * fiber.momentum_derivative()[chi]))

    return float(np.mean(_map(density, list(fibers))))


# =============================================================================
# SPECTRAL FLOW
# =============================================================================

@dataclass(frozen=True)
class SpectralFlow:
    """Signed count of interface branches crossing mu, with the crossings found."""
    value: int
    crossings: tuple[tuple[float, int, int], ...]   # (k, branch index, sign)
    ambiguous: bool


def spectral_flow(table: SpectrumTable, mu: float,
                  threshold: float = NUMERICS.weight_threshold) -> SpectralFlow:
    """
    Count interface-weighted branches crossing mu as k sweeps the circle.

    Branches are followed by sorted index; the step from the last momentum
    closes onto the first. A crossing counts when the mean interface weight
    at its two endpoints reaches `threshold`, with the sign of dE/dk.

    Args:
        table: Spectrum over a uniform closed k grid.
        mu: Chemical potential inside the common bulk gap.
        threshold: Weight threshold in (0, 1).
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    energies = table.energies
    following = np.roll(energies, -1, axis=0)
    weight = 0.5 * (table.weights + np.roll(table.weights, -1, axis=0))
    crossed = (energies - mu) * (following - mu) < 0.0
    counted = crossed & (weight >= threshold)

    crossings: list[tuple[float, int, int]] = []
    ambiguous = False
    for i, j in zip(*np.nonzero(counted)):
        sign = 1 if following[i, j] > energies[i, j] else -1
        crossings.append((float(table.k[i]), int(j), sign))
        for neighbour in (j - 1, j + 1):
            if 0 <= neighbour < energies.shape[1] and weight[i, neighbour] >= threshold:
                gap = abs(energies[i, neighbour] - energies[i, j])
                if gap < TOLERANCES.branch_ambiguity:
                    ambiguous = True
    value = sum(c[2] for c in crossings)
    if ambiguous:
        logger.warning("Spectral flow at mu=%.6g involves nearly degenerate branches", mu)
    logger.debug("Spectral flow %d from %d crossings", value, len(crossings))
    return SpectralFlow(value, tuple(crossings), ambiguous)


# =============================================================================
# BULK GAPS
# =============================================================================

def _resolvent_intervals(family: BlochFamily, lo: float, hi: float) -> list[tuple[float, float]]:
    spectrum = bulk_gaps(family)
    edges = [(lo, spectrum.bands[0][0])] + list(spectrum.gaps) + [(spectrum.bands[-1][1], hi)]
    return [(a, b) for a, b in edges if b > a]


def find_common_gap(family_minus: BlochFamily, family_plus: BlochFamily) -> tuple[float, float]:
    """
    Widest common gap of two bulk families inside their joint spectrum,
    shrunk to its middle half.

    Raises:
        GapError: If the two resolvent sets share no interval.
    """
    bands = bulk_gaps(family_minus).bands + bulk_gaps(family_plus).bands
    lo = min(b[0] for b in bands)
    hi = max(b[1] for b in bands)
    best: tuple[float, float] | None = None
    for a_lo, a_hi in _resolvent_intervals(family_minus, lo, hi):
        for b_lo, b_hi in _resolvent_intervals(family_plus, lo, hi):
            left, right = max(a_lo, b_lo), min(a_hi, b_hi)
            if right > left and (best is None or right - left > best[1] - best[0]):
                best = (left, right)
    if best is None:
        raise GapError((lo, hi), "the two bulk spectra share no gap")
    quarter = 0.25 * (best[1] - best[0])
    gap = (best[0] + quarter, best[1] - quarter)
    logger.info("Common bulk gap [%.6f, %.6f]", gap[0], gap[1])
    return gap


def check_gap(family: BlochFamily, delta: tuple[float, float]) -> None:
    """
    Raises:
        GapError: If some sampled eigenvalue of the family lies in delta.
    """
    evals = family.eigenvalues()
    inside = (evals >= delta[0] - TOLERANCES.gap_margin) & (evals <= delta[1] + TOLERANCES.gap_margin)
    if np.any(inside):
        raise GapError(delta, f"flux {family.p}/{family.q} has spectrum in the window")


def rational_flux(b: float) -> tuple[int, int]:
    """
    (p, q) with b = 2 pi p / q, 0 <= p < q.

    Raises:
        FieldError: If b is not a rational multiple of 2 pi with small denominator.
    """
    ratio = b / TWO_PI
    fraction = Fraction(ratio).limit_denominator(NUMERICS.max_flux_denominator)
    if abs(float(fraction) - ratio) > TOLERANCES.rational_flux:
        raise FieldError(FieldKind.IWATSUKA.value,
                         f"strength {b!r} is not 2*pi*p/q with q <= {NUMERICS.max_flux_denominator}")
    return fraction.numerator % fraction.denominator, fraction.denominator


# =============================================================================
# BULK-INTERFACE DUALITY
# =============================================================================

DUALITY_IDENTITY = "W = N_minus - N_plus"


@dataclass(frozen=True)
class DualityReport:
    """
    Outcome of one bulk-interface duality check.

    Winding numbers are oriented by the interface generator (W = 1) and Chern
    numbers by the lowest Hofstadter band at flux +2pi/q (N = 1). With these
    orientations the identity checked is W = N_minus - N_plus.
    """
    N_minus: int
    N_plus: int
    winding_raw: float
    winding: int
    spectral_flow: int
    conductance: float
    expected_winding: int
    duality_holds: bool
    converged: bool
    mu: float
    delta: tuple[float, float]
    residuals: dict[str, float]
    parameters: dict[str, Any]
    identity: str = DUALITY_IDENTITY

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["delta"] = list(self.delta)
        return data


def verify_duality(field_: MagneticField, delta: tuple[float, float] | None = None,
                   M: int = NUMERICS.strip_half_width, k_points: int = NUMERICS.k_points,
                   filter_half_width: float | None = None,
                   bz_grid: tuple[int, int] = NUMERICS.bz_grid,
                   profile: str = "cosine",
                   threshold: float = NUMERICS.weight_threshold) -> DualityReport:
    """
    Check that the interface winding equals the difference of bulk Chern numbers.

    Args:
        field_: Iwatsuka field with b_minus, b_plus rational multiples of 2pi.
        delta: Energy window inside a common bulk gap; found automatically
            when omitted.
        M: Strip half-width.
        k_points: Uniform k grid size.
        filter_half_width: W_f (defaults to M/2).
        bz_grid: Brillouin-zone grid for the bulk Chern numbers.
        profile: Switch-function profile ("cosine" or "quintic").
        threshold: Interface weight threshold for the spectral flow.

    Returns:
        The report; `converged` is False when the winding is not close to
        an integer.

    Raises:
        FieldError: For non-Iwatsuka or irrational-flux fields.
        GapError: If delta is not inside a common bulk gap.
    """
    if field_.kind != FieldKind.IWATSUKA:
        raise FieldError(field_.kind.value, "duality checks need an Iwatsuka field")
    filter_half_width = M / 2 if filter_half_width is None else filter_half_width
    p_minus, q_minus = rational_flux(field_.b_minus)
    p_plus, q_plus = rational_flux(field_.b_plus)
    if (p_minus, q_minus) == (p_plus, q_plus):
        logger.warning("b_minus and b_plus coincide: no interface, winding must vanish")

    family_minus = harper_bloch_family(p_minus, q_minus, bz_grid)
    family_plus = harper_bloch_family(p_plus, q_plus, bz_grid)
    auto_delta = delta is None
    if delta is None:
        delta = find_common_gap(family_minus, family_plus)
    delta = (float(delta[0]), float(delta[1]))
    if not delta[0] < delta[1]:
        raise GapError(delta, "empty energy window")
    check_gap(family_minus, delta)
    check_gap(family_plus, delta)
    mu = 0.5 * (delta[0] + delta[1])

    n_minus = chern_fhs(fermi_projection(family_minus, mu))
    n_plus = chern_fhs(fermi_projection(family_plus, mu))
    logger.info("Bulk Chern numbers: N_minus=%d, N_plus=%d at mu=%.6f", n_minus, n_plus, mu)
    if auto_delta and n_minus == n_plus and (p_minus, q_minus) != (p_plus, q_plus):
        logger.warning("Selected common gap has N_minus = N_plus = %d: the check is trivial (W = 0); "
                       "pass delta to test another gap", n_minus)

    phase = bf_phase(field_, M)
    ks = k_grid(k_points)
    fibers = [fiber_hamiltonian(phase, k) for k in ks]
    g = SwitchFunction(delta[0], delta[1], profile)

    decompositions = _map(lambda fiber: fiber.eigh(), fibers)
    energies = np.array([d[0] for d in decompositions])
    weights = np.array([interface_weights(d[1], M) for d in decompositions])
    unitaries = UnitaryFamily(ks, np.array([_exponential(e, v, g) for e, v in decompositions]))
    unitarity = unitaries.unitarity_residual()
    if unitarity > TOLERANCES.projection:
        raise NumericalError("u_delta", f"unitarity residual {unitarity:.3e}")

    winding = winding_number(unitaries, filter_half_width)
    flow = spectral_flow(SpectrumTable(ks, energies, weights), mu, threshold)
    current = interface_current(fibers, g, filter_half_width)

    expected = n_minus - n_plus
    holds = winding.converged and winding.value == expected and flow.value == winding.value
    if not winding.converged:
        logger.warning("Winding %.6f is not close to an integer", winding.raw)
    logger.info("Winding %d (raw %.8f), spectral flow %d, expected %d",
                winding.value, winding.raw, flow.value, expected)

    return DualityReport(
        N_minus=n_minus,
        N_plus=n_plus,
        winding_raw=winding.raw,
        winding=winding.value,
        spectral_flow=flow.value,
        conductance=float(winding.value),
        expected_winding=expected,
        duality_holds=bool(holds),
        converged=winding.converged,
        mu=mu,
        delta=delta,
        residuals={
            "winding": winding.residual,
            "winding_imaginary": abs(winding.imaginary),
            "unitarity": unitarity,
            "current": abs(current + winding.raw / TWO_PI),
        },
        parameters={
            "b_minus": field_.b_minus,
            "b_zero": field_.b_zero,
            "b_plus": field_.b_plus,
            "flux_minus": [p_minus, q_minus],
            "flux_plus": [p_plus, q_plus],
            "M": M,
            "k_points": k_points,
            "filter_half_width": filter_half_width,
            "bz_grid": list(bz_grid),
            "profile": profile,
            "weight_threshold": threshold,
            "spectral_flow_ambiguous": flow.ambiguous,
            "auto_delta": auto_delta,
        },
    )
