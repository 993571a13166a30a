"""
MagLat - Magnetic Fields and Vector Potentials
==============================================
Closed-form magnetic fields on Z^2, their tight-binding vector potentials
in the Landau, symmetric and half-line gauges, gauge transformations,
circulation checks and the asymptotic classification of interfaces.

Sign and indexing conventions:
    * Fields are fluxes per unit cell, in radians; B(n) is attached to the
      plaquette whose upper-right corner is n.
    * A potential stores, for every site n of its window, the two edge values
      a1(n) = A(n, n - e1) and a2(n) = A(n, n - e2). All other edge values
      follow from antisymmetry, and non-neighbour edges are zero.
    * Arrays over a window are indexed [n1 - n1_min, n2 - n2_min].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Callable, Iterable, Mapping

import numpy as np

if TYPE_CHECKING:
    from numpy.typing import NDArray

from config import setup_logging
from .exceptions import FieldError

# Module logger
logger = setup_logging()

TWO_PI = 2.0 * np.pi
_PHASE_TOL = 1e-12


# =============================================================================
# TYPE ALIASES
# =============================================================================

Site = tuple[int, int]


# =============================================================================
# WINDOWS
# =============================================================================

@dataclass(frozen=True)
class Window:
    """Inclusive rectangle [n1_min, n1_max] x [n2_min, n2_max] of Z^2."""
    n1_min: int
    n1_max: int
    n2_min: int
    n2_max: int

    def __post_init__(self) -> None:
        if self.n1_max < self.n1_min or self.n2_max < self.n2_min:
            raise ValueError(f"Empty window: {self}")

    @classmethod
    def square(cls, half_width: int) -> Window:
        """The square [-L, L]^2."""
        return cls(-half_width, half_width, -half_width, half_width)

    @classmethod
    def centered(cls, side: int) -> Window:
        """A side x side square whose lower corner is -(side // 2)."""
        lo = -(side // 2)
        return cls(lo, lo + side - 1, lo, lo + side - 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1_max - self.n1_min + 1, self.n2_max - self.n2_min + 1)

    @property
    def size(self) -> int:
        return self.shape[0] * self.shape[1]

    def coords(self) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
        """Site coordinate arrays (n1, n2), each of shape `self.shape`."""
        n1 = np.arange(self.n1_min, self.n1_max + 1)
        n2 = np.arange(self.n2_min, self.n2_max + 1)
        return np.meshgrid(n1, n2, indexing="ij")

    def contains(self, other: Window) -> bool:
        return (self.n1_min <= other.n1_min and other.n1_max <= self.n1_max
                and self.n2_min <= other.n2_min and other.n2_max <= self.n2_max)

    def extended_low(self) -> Window:
        """The window grown by one site towards -e1 and -e2."""
        return Window(self.n1_min - 1, self.n1_max, self.n2_min - 1, self.n2_max)

    def interior(self) -> Window:
        """Sites n whose cell corners n - e1, n - e2 lie in the window."""
        return Window(self.n1_min + 1, self.n1_max, self.n2_min + 1, self.n2_max)

    def slices_of(self, inner: Window) -> tuple[slice, slice]:
        """Array slices selecting `inner` inside arrays over this window."""
        return (slice(inner.n1_min - self.n1_min, inner.n1_max - self.n1_min + 1),
                slice(inner.n2_min - self.n2_min, inner.n2_max - self.n2_min + 1))


# =============================================================================
# MAGNETIC FIELDS
# =============================================================================

class FieldKind(str, Enum):
    """Closed-form field families."""
    CONSTANT = "constant"
    IWATSUKA = "iwatsuka"
    LOCALIZED = "localized"
    CUSTOM_GRID = "custom_grid"


@dataclass(frozen=True)
class MagneticField:
    """
    A real magnetic field on Z^2 given in closed form.

    Strengths are kept unreduced (raw radians) for Hamiltonian construction;
    principal arguments are only taken by `classify_asymptotics`.
    """
    kind: FieldKind
    b: float = 0.0
    b_minus: float = 0.0
    b_zero: float = 0.0
    b_plus: float = 0.0
    sites: tuple[Site, ...] = ()
    grid: NDArray[np.float64] | None = field(default=None, compare=False, repr=False)
    grid_window: Window | None = None

    # -- constructors ---------------------------------------------------------

    @classmethod
    def constant(cls, b: float) -> MagneticField:
        return cls(FieldKind.CONSTANT, b=float(b))

    @classmethod
    def iwatsuka(cls, b_minus: float, b_zero: float, b_plus: float) -> MagneticField:
        return cls(FieldKind.IWATSUKA, b_minus=float(b_minus),
                   b_zero=float(b_zero), b_plus=float(b_plus))

    @classmethod
    def localized(cls, sites: Iterable[Site], b: float) -> MagneticField:
        site_tuple = tuple(sorted({(int(s[0]), int(s[1])) for s in sites}))
        if not site_tuple:
            raise FieldError(FieldKind.LOCALIZED.value,
                             "empty site set (use a constant field of strength 0)")
        return cls(FieldKind.LOCALIZED, b=float(b), sites=site_tuple)

    @classmethod
    def custom_grid(cls, values: NDArray[np.float64], window: Window) -> MagneticField:
        values = np.asarray(values, dtype=float)
        if values.shape != window.shape:
            raise FieldError(FieldKind.CUSTOM_GRID.value,
                             f"grid shape {values.shape} does not match window {window.shape}")
        values = values.copy()
        values.setflags(write=False)
        return cls(FieldKind.CUSTOM_GRID, grid=values, grid_window=window)

    # -- evaluation -------------------------------------------------------------

    @property
    def is_vertically_invariant(self) -> bool:
        return self.kind in (FieldKind.CONSTANT, FieldKind.IWATSUKA)

    def column_strength(self, n1: NDArray[np.int64] | int) -> NDArray[np.float64]:
        """B(n1, .) for vertically invariant fields."""
        n1 = np.asarray(n1)
        if self.kind == FieldKind.CONSTANT:
            return np.full(n1.shape, self.b, dtype=float)
        if self.kind == FieldKind.IWATSUKA:
            return np.where(n1 < 0, self.b_minus,
                            np.where(n1 == 0, self.b_zero, self.b_plus)).astype(float)
        raise FieldError(self.kind.value, "field is not invariant along e2")

    def evaluate(self, n1: NDArray[np.int64] | int,
                 n2: NDArray[np.int64] | int) -> NDArray[np.float64]:
        """Evaluate B(n) elementwise; defined on all of Z^2."""
        n1, n2 = np.broadcast_arrays(np.asarray(n1), np.asarray(n2))
        if self.is_vertically_invariant:
            return self.column_strength(n1)
        if self.kind == FieldKind.LOCALIZED:
            out = np.zeros(n1.shape, dtype=float)
            for s1, s2 in self.sites:
                out += np.where((n1 == s1) & (n2 == s2), self.b, 0.0)
            return out
        # custom grid, extended by zero
        assert self.grid is not None and self.grid_window is not None
        w = self.grid_window
        inside = (n1 >= w.n1_min) & (n1 <= w.n1_max) & (n2 >= w.n2_min) & (n2 <= w.n2_max)
        i1 = np.clip(n1 - w.n1_min, 0, w.shape[0] - 1)
        i2 = np.clip(n2 - w.n2_min, 0, w.shape[1] - 1)
        return np.where(inside, self.grid[i1, i2], 0.0)

    def __call__(self, n1: int, n2: int) -> float:
        return float(self.evaluate(n1, n2))

    def on_window(self, window: Window) -> NDArray[np.float64]:
        n1, n2 = window.coords()
        return self.evaluate(n1, n2)


def build_field(spec: Mapping[str, object]) -> MagneticField:
    """
    Build a field from a JSON-style mapping.

    Args:
        spec: Mapping with key "type" in {"constant", "iwatsuka", "localized"}
            and numeric strengths ("b"; "b_minus", "b_zero", "b_plus";
            "sites" and "b").

    Returns:
        The closed-form field.

    Raises:
        FieldError: For unknown kinds, non-finite strengths or an empty
            localized site set.

    Examples:
        >>> build_field({"type": "iwatsuka", "b_minus": 1, "b_zero": 2, "b_plus": 3})(-5, 7)
        1.0
    """
    kind = str(spec.get("type", "")).lower()

    def strength(key: str) -> float:
        if key not in spec:
            raise FieldError(kind, f"missing strength '{key}'")
        value = float(spec[key])  # type: ignore[arg-type]
        if not np.isfinite(value):
            raise FieldError(kind, f"strength '{key}' is not finite")
        return value

    if kind == FieldKind.CONSTANT.value:
        return MagneticField.constant(strength("b"))
    if kind == FieldKind.IWATSUKA.value:
        return MagneticField.iwatsuka(strength("b_minus"), strength("b_zero"), strength("b_plus"))
    if kind == FieldKind.LOCALIZED.value:
        raw_sites = spec.get("sites") or []
        sites = [(int(s[0]), int(s[1])) for s in raw_sites]  # type: ignore[union-attr,index]
        return MagneticField.localized(sites, strength("b"))
    raise FieldError(kind or "<missing>", "unknown field type")


# =============================================================================
# VECTOR POTENTIALS AND GAUGES
# =============================================================================

class Gauge(str, Enum):
    LANDAU = "landau"
    SYMMETRIC = "symmetric"
    HALF_LINE = "half_line"


@dataclass(frozen=True)
class VectorPotential:
    """
    Antisymmetric nearest-neighbour edge values on a window.

    Only a1(n) = A(n, n - e1) and a2(n) = A(n, n - e2) are stored, so
    antisymmetry and the nearest-neighbour support hold by construction.
    """
    window: Window
    a1: NDArray[np.float64] = field(repr=False)
    a2: NDArray[np.float64] = field(repr=False)

    def edge(self, n: Site, m: Site) -> float:
        """A(n, m) for any pair of sites with n or m in the window."""
        d = (n[0] - m[0], n[1] - m[1])
        if d == (1, 0):
            return self._stored(self.a1, n)
        if d == (0, 1):
            return self._stored(self.a2, n)
        if d == (-1, 0):
            return -self._stored(self.a1, m)
        if d == (0, -1):
            return -self._stored(self.a2, m)
        return 0.0

    def _stored(self, values: NDArray[np.float64], n: Site) -> float:
        w = self.window
        if not (w.n1_min <= n[0] <= w.n1_max and w.n2_min <= n[1] <= w.n2_max):
            raise KeyError(f"edge at {n} outside potential window")
        return float(values[n[0] - w.n1_min, n[1] - w.n2_min])


@dataclass(frozen=True)
class GaugeFunction:
    """Real site values G(n) on a window."""
    window: Window
    values: NDArray[np.float64] = field(repr=False)

    @classmethod
    def from_function(cls, func: Callable[[NDArray[np.int64], NDArray[np.int64]], NDArray[np.float64]],
                      window: Window) -> GaugeFunction:
        """Sample `func` on `window` grown by one site, as `apply_gauge` needs."""
        grown = window.extended_low()
        n1, n2 = grown.coords()
        return cls(grown, np.asarray(func(n1, n2), dtype=float) + np.zeros(grown.shape))

    @classmethod
    def zero(cls, window: Window) -> GaugeFunction:
        grown = window.extended_low()
        return cls(grown, np.zeros(grown.shape))


def random_gauge(window: Window, seed: int = 0, scale: float = np.pi) -> GaugeFunction:
    """Uniformly random gauge function, for invariance checks."""
    rng = np.random.default_rng(seed)
    grown = window.extended_low()
    return GaugeFunction(grown, rng.uniform(-scale, scale, size=grown.shape))


def symmetric_gauge_function(field_: MagneticField, window: Window) -> GaugeFunction:
    """
    G(n) = -n1 n2 B(n1) / 2, mapping the Landau potential to the symmetric one.

    Raises:
        FieldError: If the field is not vertically invariant.
    """
    if not field_.is_vertically_invariant:
        raise FieldError(field_.kind.value, "symmetric gauge needs a field invariant along e2")
    return GaugeFunction.from_function(
        lambda n1, n2: -0.5 * n1 * n2 * field_.column_strength(n1), window)


def build_potential(field_: MagneticField, gauge: Gauge | str, window: Window) -> VectorPotential:
    """
    Materialize a vector potential for `field_` on `window`.

    Args:
        field_: The magnetic field.
        gauge: Landau (vertically invariant fields), Symmetric (constant and
            Iwatsuka fields) or HalfLine (localized fields).
        window: Rectangle carrying the edge values.

    Returns:
        Potential whose circulation reproduces the field on the window interior.

    Raises:
        FieldError: On a gauge/field mismatch.
    """
    gauge = Gauge(gauge)
    n1, n2 = window.coords()
    zeros = np.zeros(window.shape)

    if gauge == Gauge.LANDAU:
        if not field_.is_vertically_invariant:
            raise FieldError(f"{field_.kind.value}/{gauge.value}",
                             "Landau gauge needs a field invariant along e2")
        a1 = n2 * field_.column_strength(n1)
        return VectorPotential(window, a1.astype(float), zeros)

    if gauge == Gauge.SYMMETRIC:
        if not field_.is_vertically_invariant:
            raise FieldError(f"{field_.kind.value}/{gauge.value}",
                             "symmetric gauge is defined for constant and Iwatsuka fields")
        column = field_.column_strength(n1)
        a1 = 0.5 * n2 * column
        if field_.kind == FieldKind.IWATSUKA:
            # correction column carrying the jump b_zero - b_minus
            a1 = a1 + np.where(n1 == 0, 0.5 * (field_.b_zero - field_.b_minus) * n2, 0.0)
        a2 = -0.5 * n1 * column
        return VectorPotential(window, a1.astype(float), a2.astype(float))

    if field_.kind != FieldKind.LOCALIZED:
        raise FieldError(f"{field_.kind.value}/{gauge.value}",
                         "half-line gauge is defined for localized fields only")
    a1 = zeros.copy()
    for s1, s2 in field_.sites:
        a1 += np.where((n1 == s1) & (n2 >= s2), field_.b, 0.0)
    logger.debug("Half-line potential with %d strings", len(field_.sites))
    return VectorPotential(window, a1, zeros)


def circulation(potential: VectorPotential) -> MagneticField:
    """
    Counterclockwise circulation C[A](n) on the interior cells of the window.

    C[A](n) = A(n, n-e1) + A(n-e1, n-e1-e2) + A(n-e1-e2, n-e2) + A(n-e2, n)
            = a1(n) + a2(n-e1) - a1(n-e2) - a2(n).
    """
    w = potential.window
    if w.shape[0] < 2 or w.shape[1] < 2:
        raise ValueError(f"Circulation needs a window of at least 2x2, got {w.shape}")
    a1, a2 = potential.a1, potential.a2
    values = a1[1:, 1:] + a2[:-1, 1:] - a1[1:, :-1] - a2[1:, 1:]
    return MagneticField.custom_grid(values, w.interior())


def apply_gauge(potential: VectorPotential, gauge: GaugeFunction) -> VectorPotential:
    """
    Gauge transform A'(n, m) = A(n, m) + G(n) - G(m).

    Raises:
        FieldError: If the gauge window does not cover the potential window
            grown by one site towards -e1 and -e2.
    """
    w = potential.window
    need = w.extended_low()
    if not gauge.window.contains(need):
        raise FieldError("gauge", f"gauge window {gauge.window} does not cover {need}")
    s1, s2 = gauge.window.slices_of(need)
    g = gauge.values[s1, s2]
    here = g[1:, 1:]
    a1 = potential.a1 + here - g[:-1, 1:]
    a2 = potential.a2 + here - g[1:, :-1]
    return VectorPotential(w, a1, a2)


# =============================================================================
# ASYMPTOTIC CLASSIFICATION
# =============================================================================

@dataclass(frozen=True)
class InterfaceStructure:
    """Asymptotic structure of a field: order None means uniform."""
    order: int | None
    bulk_strengths: tuple[float, ...]
    boundary_point_count: int

    @property
    def uniform(self) -> bool:
        return self.order is None


def principal_strength(b: float) -> float:
    """Arg(e^{ib}) in [0, 2pi)."""
    value = float(np.mod(np.angle(np.exp(1j * b)), TWO_PI))
    if value >= TWO_PI - _PHASE_TOL:
        value = 0.0
    return value


def _same_phase(x: float, y: float) -> bool:
    return abs(np.exp(1j * x) - np.exp(1j * y)) <= _PHASE_TOL


def classify_asymptotics(field_: MagneticField) -> InterfaceStructure:
    """
    Classify the hull of a field by its asymptotic regions.

    Constant fields have a one-point hull (uniform). An Iwatsuka field with
    distinct asymptotic phases is a 1-interface system with two boundary
    points; localized fields (and Iwatsuka fields whose only defect is the
    central column) are 0-interface systems with one boundary point.

    Raises:
        FieldError: For custom grids, which declare no asymptotics.
    """
    if field_.kind == FieldKind.CUSTOM_GRID:
        raise FieldError(field_.kind.value, "custom grids declare no asymptotic behaviour")

    if field_.kind == FieldKind.CONSTANT:
        return InterfaceStructure(None, (principal_strength(field_.b),), 0)

    if field_.kind == FieldKind.LOCALIZED:
        return InterfaceStructure(0, (0.0,), 1)

    if not _same_phase(field_.b_minus, field_.b_plus):
        structure = InterfaceStructure(
            1, (principal_strength(field_.b_minus), principal_strength(field_.b_plus)), 2)
    elif not _same_phase(field_.b_zero, field_.b_plus):
        structure = InterfaceStructure(0, (principal_strength(field_.b_plus),), 1)
    else:
        structure = InterfaceStructure(None, (principal_strength(field_.b_plus),), 0)
    logger.debug("Iwatsuka field classified as %s", structure)
    return structure
