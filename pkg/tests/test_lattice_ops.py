"""
Tests for lattice operators, magnetic translations, derivations and traces.
"""

import pytest
import numpy as np

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core import (
    Window,
    MagneticField,
    Gauge,
    build_potential,
    circulation,
    apply_gauge,
    random_gauge,
    LatticeDomain,
    LatticeOperator,
    BoxSequence,
    magnetic_translation,
    commutator_flux,
    harper_hamiltonian,
    column_projection,
    half_plane_projections,
    fourier_coefficients,
    cesaro_mean,
    partial_sum,
    derivation,
    trace_per_unit_volume,
    lp_norm,
    regularity_norms,
    evaluate_bulk,
    DomainError,
    NumericalError,
)
from core.fields import FieldKind
from core.lattice_ops import (
    commutator_derivation,
    decay_norm,
    dense_trace,
    fejer_weight,
    operator_norm,
    random_banded_operator,
)


# =============================================================================
# TEST FIXTURES
# =============================================================================

@pytest.fixture
def small_open():
    """Open 9x9 window, small enough for dense checks."""
    return LatticeDomain.open(4)


@pytest.fixture
def torus():
    """24x24 magnetic torus at flux 1/3."""
    return LatticeDomain.torus(24, 1, 3)


@pytest.fixture
def iwatsuka():
    """Iwatsuka field with a genuine interface."""
    return MagneticField.iwatsuka(np.pi / 3, 1.0, 2 * np.pi / 3)


def translations(field, gauge, domain):
    """(s1, s2) for a field in the given gauge on the domain window."""
    pot = build_potential(field, gauge, domain.window)
    return (magnetic_translation(pot, 1, domain), magnetic_translation(pot, 2, domain))


def landau_harper(b, domain):
    pot = build_potential(MagneticField.constant(b), Gauge.LANDAU, domain.window)
    return harper_hamiltonian(pot, domain)


# =============================================================================
# TEST LatticeDomain
# =============================================================================

class TestLatticeDomain:
    """Tests for open windows and magnetic tori."""

    def test_open_shape(self):
        """open(L) should be the (2L+1)^2 window."""
        domain = LatticeDomain.open(3)
        assert domain.shape == (7, 7)
        assert domain.size == 49
        assert not domain.periodic

    def test_torus_side_not_divisible(self):
        """Torus sides must be multiples of q."""
        with pytest.raises(DomainError):
            LatticeDomain.torus(10, 1, 3)

    def test_torus_flux_not_reduced(self):
        """Torus flux must be in lowest terms."""
        with pytest.raises(DomainError):
            LatticeDomain.torus(12, 2, 4)

    def test_torus_zero_flux(self):
        """0/1 is an admissible torus flux."""
        assert LatticeDomain.torus(6, 0, 1).periodic


# =============================================================================
# TEST LatticeOperator algebra
# =============================================================================

class TestOperatorAlgebra:
    """Tests for the hopping-map algebra against dense matrices."""

    def test_boundary_hops_masked(self, small_open):
        """Hops leaving an open window should be zeroed."""
        a = LatticeOperator.monomial(small_open, (1, 0))
        assert np.all(a.coefficient((1, 0))[0] == 0.0)
        assert np.all(a.coefficient((1, 0))[1:] == 1.0)

    def test_product_matches_dense(self, small_open):
        """a @ b should realize the matrix product."""
        a = random_banded_operator(small_open, 1, seed=1)
        b = random_banded_operator(small_open, 2, seed=2)
        assert np.allclose((a @ b).dense(), a.dense() @ b.dense(), atol=1e-12)

    def test_product_matches_dense_on_torus(self):
        """Torus products should wrap around."""
        domain = LatticeDomain.torus(6, 1, 2)
        a = random_banded_operator(domain, 1, seed=3)
        b = random_banded_operator(domain, 1, seed=4)
        assert np.allclose((a @ b).dense(), a.dense() @ b.dense(), atol=1e-12)

    def test_adjoint_matches_dense(self, small_open):
        """adjoint() should be the conjugate transpose."""
        a = random_banded_operator(small_open, 2, seed=5)
        assert np.allclose(a.adjoint().dense(), a.dense().conj().T)

    def test_sum_and_scalar(self, small_open):
        """Linear combinations should act entrywise."""
        a = random_banded_operator(small_open, 1, seed=6)
        b = random_banded_operator(small_open, 1, seed=7)
        assert np.allclose((a + 2j * b - a).dense(), 2j * b.dense())

    def test_hermitian_random(self, small_open):
        """Hermitian random operators should be self-adjoint."""
        a = random_banded_operator(small_open, 2, seed=8, hermitian=True)
        assert a.hermitian
        assert a.hermiticity_residual() <= 1e-14

    def test_domain_mismatch(self, small_open, torus):
        """Operators on different domains cannot be combined."""
        with pytest.raises(DomainError):
            LatticeOperator.identity(small_open) + LatticeOperator.identity(torus)
        with pytest.raises(DomainError):
            LatticeOperator.identity(small_open) @ LatticeOperator.identity(torus)


# =============================================================================
# TEST magnetic_translation
# =============================================================================

class TestMagneticTranslation:
    """Tests for twisted shifts."""

    def test_landau_coefficient(self, small_open):
        """Landau s1 should carry e^{i n2 b} on sites with a left neighbour."""
        b = 0.7
        s1, s2 = translations(MagneticField.constant(b), Gauge.LANDAU, small_open)
        _, n2 = small_open.coords()
        assert np.allclose(s1.coefficient((1, 0))[1:], np.exp(1j * n2 * b)[1:])
        assert np.allclose(s2.coefficient((0, 1))[:, 1:], 1.0)

    def test_zero_field_plain_shift(self, small_open):
        """b = 0 should give untwisted shifts."""
        s1, _ = translations(MagneticField.constant(0.0), Gauge.LANDAU, small_open)
        assert np.allclose(s1.dense(), LatticeOperator.monomial(small_open, (1, 0)).dense())

    def test_iwatsuka_coefficient(self, iwatsuka):
        """Landau-Iwatsuka s1 should carry e^{i n2 B_I(n1)}."""
        domain = LatticeDomain.open(6)
        s1, _ = translations(iwatsuka, Gauge.LANDAU, domain)
        n1, n2 = domain.coords()
        expected = np.exp(1j * n2 * iwatsuka.evaluate(n1, n2))
        assert np.allclose(s1.coefficient((1, 0))[1:], expected[1:])

    def test_torus_unitary(self, torus):
        """Translations should be unitary on a magnetic torus."""
        s1, s2 = translations(MagneticField.constant(2 * np.pi / 3), Gauge.LANDAU, torus)
        for s in (s1, s2):
            m = s.dense()
            assert np.allclose(m @ m.conj().T, np.eye(torus.size), atol=1e-12)

    def test_torus_wrong_flux(self):
        """A potential with the wrong flux cannot live on the torus."""
        domain = LatticeDomain.torus(6, 1, 3)
        pot = build_potential(MagneticField.constant(2 * np.pi / 5), Gauge.LANDAU, domain.window)
        with pytest.raises(DomainError):
            magnetic_translation(pot, 1, domain)

    def test_potential_must_cover(self):
        """The potential window must contain the domain window."""
        domain = LatticeDomain.open(5)
        pot = build_potential(MagneticField.constant(1.0), Gauge.LANDAU, Window.square(3))
        with pytest.raises(DomainError):
            magnetic_translation(pot, 1, domain)

    def test_bad_axis(self, small_open):
        """Only axes 1 and 2 exist."""
        pot = build_potential(MagneticField.constant(1.0), Gauge.LANDAU, small_open.window)
        with pytest.raises(ValueError):
            magnetic_translation(pot, 3, small_open)


# =============================================================================
# TEST commutator_flux
# =============================================================================

class TestCommutatorFlux:
    """Tests for the flux operator s1 s2 s1* s2*."""

    @pytest.mark.parametrize("field", [
        MagneticField.constant(0.9),
        MagneticField.iwatsuka(0.2, 1.4, 2.6),
        MagneticField.localized([(0, 0), (2, -1)], 1.2),
        MagneticField.constant(0.0),
    ])
    def test_interior_flux(self, field):
        """The flux should be e^{iB(n)} on interior sites."""
        domain = LatticeDomain.open(5)
        gauge = Gauge.HALF_LINE if field.kind == FieldKind.LOCALIZED else Gauge.LANDAU
        s1, s2 = translations(field, gauge, domain)
        flux = commutator_flux(s1, s2)
        inner = domain.window.interior()
        r1, r2 = domain.window.slices_of(inner)
        expected = np.exp(1j * field.on_window(inner))
        assert set(flux.hops) <= {(0, 0)}
        assert np.allclose(flux.coefficient((0, 0))[r1, r2], expected, atol=1e-14)

    def test_flux_is_circulation(self, iwatsuka):
        """The flux phase should equal the potential's circulation, in any gauge."""
        domain = LatticeDomain.open(5)
        pot = apply_gauge(build_potential(iwatsuka, Gauge.LANDAU, domain.window),
                          random_gauge(domain.window, seed=4))
        flux = commutator_flux(magnetic_translation(pot, 1, domain),
                               magnetic_translation(pot, 2, domain))
        r1, r2 = domain.window.slices_of(domain.window.interior())
        assert np.allclose(flux.coefficient((0, 0))[r1, r2], np.exp(1j * circulation(pot).grid))

    def test_commutation_relation_on_torus(self, torus):
        """s1 s2 = f s2 s1 with f = e^{2 pi i p/q} everywhere on the torus."""
        s1, s2 = translations(MagneticField.constant(2 * np.pi / 3), Gauge.LANDAU, torus)
        flux = commutator_flux(s1, s2)
        assert np.allclose(flux.coefficient((0, 0)), np.exp(2j * np.pi / 3), atol=1e-12)
        residual = (s1 @ s2) - (flux @ s2 @ s1)
        assert np.max(np.abs(residual.dense())) <= 1e-13

    def test_commutation_relation_interior(self, iwatsuka):
        """s1 s2 - f s2 s1 should vanish on interior rows of an open window."""
        domain = LatticeDomain.open(5)
        s1, s2 = translations(iwatsuka, Gauge.LANDAU, domain)
        residual = (s1 @ s2) - (commutator_flux(s1, s2) @ s2 @ s1)
        r1, r2 = domain.window.slices_of(domain.window.interior())
        for values in residual.hops.values():
            assert np.max(np.abs(values[r1, r2]), initial=0.0) <= 1e-14

    def test_rejects_non_translations(self, small_open):
        """Multi-hop inputs do not produce a diagonal flux."""
        a = random_banded_operator(small_open, 1, seed=0)
        with pytest.raises(NumericalError):
            commutator_flux(a, a)


# =============================================================================
# TEST harper_hamiltonian
# =============================================================================

class TestHarper:
    """Tests for the magnetic Laplacian."""

    def test_free_spectrum(self):
        """b = 0 on a 6x6 torus gives 2cos(k1) + 2cos(k2)."""
        domain = LatticeDomain.torus(6, 0, 1)
        evals = np.linalg.eigvalsh(landau_harper(0.0, domain).dense())
        k = 2 * np.pi * np.arange(6) / 6
        expected = np.sort((2 * np.cos(k)[:, None] + 2 * np.cos(k)[None, :]).ravel())
        assert np.allclose(evals, expected, atol=1e-12)

    def test_hermitian(self, iwatsuka):
        """Harper operators should be self-adjoint."""
        domain = LatticeDomain.open(5)
        pot = build_potential(iwatsuka, Gauge.SYMMETRIC, domain.window)
        h = harper_hamiltonian(pot, domain)
        assert h.hermitian
        assert h.hermiticity_residual() <= 1e-14
        assert h.adjoint_residual() == 0.0

    def test_adjoint_residual_detects_asymmetry(self, small_open):
        """A bare shift is not self-adjoint; its symmetrization is."""
        s1 = LatticeOperator.monomial(small_open, (1, 0))
        assert s1.adjoint_residual() == 1.0
        assert (s1 + s1.adjoint()).adjoint_residual() == 0.0

    def test_half_flux_spectrum(self):
        """At flux 1/2 the spectrum is symmetric and inside [-2 sqrt 2, 2 sqrt 2]."""
        domain = LatticeDomain.torus(8, 1, 2)
        evals = np.linalg.eigvalsh(landau_harper(np.pi, domain).dense())
        assert np.max(np.abs(evals)) <= 2 * np.sqrt(2) + 1e-12
        assert np.allclose(np.sort(evals), np.sort(-evals), atol=1e-12)

    def test_gauge_independent_spectrum_on_torus(self, torus):
        """Landau and symmetric gauges give the same torus spectrum."""
        field = MagneticField.constant(2 * np.pi / 3)
        spectra = []
        for gauge in (Gauge.LANDAU, Gauge.SYMMETRIC):
            pot = build_potential(field, gauge, torus.window)
            spectra.append(np.linalg.eigvalsh(harper_hamiltonian(pot, torus).dense()))
        assert np.max(np.abs(spectra[0] - spectra[1])) <= 1e-10

    def test_random_gauge_unitary_equivalence(self, iwatsuka):
        """A random gauge should not move the open-window spectrum."""
        domain = LatticeDomain.open(4)
        pot = build_potential(iwatsuka, Gauge.LANDAU, domain.window)
        moved = apply_gauge(pot, random_gauge(domain.window, seed=9))
        e0 = np.linalg.eigvalsh(harper_hamiltonian(pot, domain).dense())
        e1 = np.linalg.eigvalsh(harper_hamiltonian(moved, domain).dense())
        assert np.allclose(e0, e1, atol=1e-10)

    def test_norm_bound(self, iwatsuka):
        """||h|| <= 4."""
        domain = LatticeDomain.open(4)
        pot = build_potential(iwatsuka, Gauge.LANDAU, domain.window)
        assert operator_norm(harper_hamiltonian(pot, domain)) <= 4.0 + 1e-12


# =============================================================================
# TEST projections
# =============================================================================

class TestProjections:
    """Tests for column and half-plane projections."""

    def test_column_projection(self, small_open):
        """p_j should be an idempotent diagonal supported on column j."""
        p = column_projection(small_open, 2)
        m = p.dense()
        assert np.allclose(m @ m, m)
        assert np.trace(m).real == small_open.shape[1]

    def test_half_planes_disjoint(self, small_open):
        """p_- and p_+ are orthogonal and miss the column n1 = 0."""
        minus, plus = half_plane_projections(small_open)
        assert np.allclose((minus @ plus).dense(), 0.0)
        total = (minus + plus + column_projection(small_open, 0)).dense()
        assert np.allclose(total, np.eye(small_open.size))


# =============================================================================
# TEST Fourier analysis
# =============================================================================

class TestFourier:
    """Tests for Fourier coefficient extraction."""

    def test_monomial(self, torus):
        """A monomial has a single coefficient."""
        a = LatticeOperator.monomial(torus, (2, -1), 0.5j)
        coeffs = fourier_coefficients(a)
        assert list(coeffs) == [(2, -1)]
        assert np.allclose(coeffs[(2, -1)], 0.5j)

    def test_identity(self, small_open):
        """The identity is the (0, 0) coefficient 1."""
        coeffs = fourier_coefficients(LatticeOperator.identity(small_open))
        assert list(coeffs) == [(0, 0)]
        assert np.all(coeffs[(0, 0)] == 1.0)

    def test_dense_round_trip(self, iwatsuka):
        """Reading hops back from a dense Harper matrix recovers them."""
        domain = LatticeDomain.open(4)
        h = harper_hamiltonian(build_potential(iwatsuka, Gauge.LANDAU, domain.window), domain)
        back = LatticeOperator.from_dense(h.dense(), domain, band=1)
        assert set(back.hops) == set(h.hops)
        for hop in h.hops:
            assert np.allclose(back.coefficient(hop), h.coefficient(hop))

    def test_zero_operator(self, small_open):
        """The zero operator has no coefficients."""
        a = LatticeOperator.from_hops(small_open, {})
        assert fourier_coefficients(a) == {}
        assert a.band_radius == 0


# =============================================================================
# TEST Cesaro means
# =============================================================================

class TestCesaro:
    """Tests for Fejer-weighted Cesaro means."""

    def test_first_mean_of_shift(self, small_open):
        """sigma_1(s1) = s1 / 2."""
        s1 = LatticeOperator.monomial(small_open, (1, 0))
        sigma = cesaro_mean(s1, 1)
        assert np.allclose(sigma.dense(), 0.5 * s1.dense())
        assert np.isclose(operator_norm(sigma), 0.5)

    def test_partial_sum_exact(self, iwatsuka):
        """S_N reproduces a band-R operator exactly once N >= R."""
        domain = LatticeDomain.open(4)
        h = harper_hamiltonian(build_potential(iwatsuka, Gauge.LANDAU, domain.window), domain)
        assert np.array_equal(partial_sum(h, 1).dense(), h.dense())
        assert partial_sum(h, 0).hops == {}

    @pytest.mark.parametrize("band, seed", [(1 + i % 3, 100 + i) for i in range(20)])
    def test_partial_sum_reconstructs_random(self, small_open, band, seed):
        """S_R(a) = a entrywise for random band-R operators."""
        a = random_banded_operator(small_open, band, seed=seed)
        assert a.band_radius == band
        assert np.max(np.abs(partial_sum(a, band).dense() - a.dense())) <= 1e-14
        assert set(partial_sum(a, band - 1).hops) < set(a.hops)

    def test_weights(self):
        """Fejer weights at the origin and the edge."""
        assert fejer_weight((0, 0), 5) == 1.0
        assert fejer_weight((6, 0), 5) == 0.0

    def test_convergence_with_bound(self, small_open):
        """||a - sigma_N(a)|| decays and obeys the Fejer bound."""
        a = random_banded_operator(small_open, 2, seed=11)
        errors = []
        for order in (2, 4, 8, 16):
            sigma = cesaro_mean(a, order)
            error = operator_norm(a.dense() - sigma.dense())
            bound = sum((1.0 - fejer_weight(h, order)) * np.max(np.abs(v))
                        for h, v in a.hops.items())
            assert error <= bound + 1e-12
            errors.append(error)
        assert all(later < earlier for earlier, later in zip(errors, errors[1:]))

    def test_negative_order(self, small_open):
        """Negative orders are rejected."""
        with pytest.raises(ValueError):
            partial_sum(LatticeOperator.identity(small_open), -1)


# =============================================================================
# TEST derivations
# =============================================================================

class TestDerivation:
    """Tests for the spatial derivations."""

    def test_monomial(self, torus):
        """grad_1 of the (2, -1) hop multiplies by -2i, grad_2 by +i."""
        a = LatticeOperator.monomial(torus, (2, -1))
        assert np.allclose(derivation(a, 1).coefficient((2, -1)), -2j)
        assert np.allclose(derivation(a, 2).coefficient((2, -1)), 1j)

    def test_diagonal_killed(self, small_open):
        """Diagonal operators commute with positions."""
        n1, _ = small_open.coords()
        d = LatticeOperator.diagonal(small_open, n1 ** 2)
        assert derivation(d, 1).hops == {}

    def test_leibniz(self, small_open):
        """grad(ab) = grad(a) b + a grad(b)."""
        a = random_banded_operator(small_open, 1, seed=1)
        b = random_banded_operator(small_open, 2, seed=2)
        for axis in (1, 2):
            lhs = derivation(a @ b, axis).dense()
            rhs = (derivation(a, axis) @ b + a @ derivation(b, axis)).dense()
            assert np.allclose(lhs, rhs, atol=1e-12)

    def test_matches_commutator(self, small_open):
        """On open windows the hop form equals i[a, n_j]."""
        a = random_banded_operator(small_open, 2, seed=3)
        for axis in (1, 2):
            assert np.allclose(derivation(a, axis).dense(),
                               commutator_derivation(a, axis), atol=1e-12)

    def test_commutator_rejected_on_torus(self, torus):
        """Positions do not exist on a torus."""
        with pytest.raises(DomainError):
            commutator_derivation(LatticeOperator.identity(torus), 1)


# =============================================================================
# TEST trace per unit volume
# =============================================================================

class TestTrace:
    """Tests for the box-averaged trace."""

    def test_identity(self, small_open):
        """T(1) = 1."""
        assert trace_per_unit_volume(LatticeOperator.identity(small_open)).value == 1.0

    def test_off_diagonal(self, small_open):
        """Pure hops have zero trace."""
        s1 = LatticeOperator.monomial(small_open, (1, 0))
        assert trace_per_unit_volume(s1).value == 0.0

    def test_table_sizes_increase(self, small_open):
        """The convergence table is indexed by increasing box size."""
        table = trace_per_unit_volume(LatticeOperator.identity(small_open)).table
        sizes = [size for size, _ in table]
        assert sizes == sorted(sizes)
        assert sizes[-1] == small_open.size

    @pytest.mark.parametrize("seed", range(50))
    def test_cyclicity_on_torus(self, torus, seed):
        """T(ab) = T(ba) on a torus."""
        a = random_banded_operator(torus, 2, seed=seed)
        b = random_banded_operator(torus, 2, seed=seed + 10)
        diff = trace_per_unit_volume(a @ b).value - trace_per_unit_volume(b @ a).value
        assert abs(diff) <= 1e-12

    @pytest.mark.parametrize("seed", range(50))
    def test_invariance_on_torus(self, torus, seed):
        """T(grad a) = 0 and T(a grad b) = -T(grad(a) b)."""
        a = random_banded_operator(torus, 2, seed=seed)
        b = random_banded_operator(torus, 2, seed=seed + 20)
        for axis in (1, 2):
            assert abs(trace_per_unit_volume(derivation(a, axis)).value) <= 1e-12
            lhs = trace_per_unit_volume(a @ derivation(b, axis)).value
            rhs = -trace_per_unit_volume(derivation(a, axis) @ b).value
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))

    def test_dense_trace_agrees(self, small_open):
        """Dense and hopping-map traces agree."""
        a = random_banded_operator(small_open, 1, seed=5)
        box = BoxSequence.central(small_open.window, 5).last
        dense = dense_trace(a.dense(), small_open, box)
        sparse = trace_per_unit_volume(a, BoxSequence((box,))).value
        assert np.isclose(dense, sparse)

    def test_box_sequence_must_grow(self):
        """Boxes of non-increasing size are rejected."""
        box = Window.square(2)
        with pytest.raises(ValueError):
            BoxSequence((box, box))


# =============================================================================
# TEST regularity norms
# =============================================================================

class TestRegularityNorms:
    """Tests for decay and Sobolev norms."""

    def test_monomial_decay(self, torus):
        """r_k of a monomial is (1 + r^2 + s^2)^{k/2} |c|."""
        a = LatticeOperator.monomial(torus, (2, 1), 3.0)
        assert np.isclose(decay_norm(a, 2), 6 * 3.0)
        assert np.isclose(decay_norm(a, 0), 3.0)

    def test_identity(self, small_open):
        """The identity has unit norms."""
        one = LatticeOperator.identity(small_open)
        norms = regularity_norms(one, 2, 2)
        assert np.isclose(norms.decay_norm, 1.0)
        assert np.isclose(norms.sobolev_norm, 1.0)

    def test_harper_finite(self, iwatsuka):
        """Harper operators have finite norms of every order."""
        domain = LatticeDomain.open(4)
        h = harper_hamiltonian(build_potential(iwatsuka, Gauge.LANDAU, domain.window), domain)
        norms = regularity_norms(h, 3, 2)
        assert np.isfinite(norms.decay_norm)
        assert np.isfinite(norms.sobolev_norm)
        assert norms.sobolev_norm > 0

    def test_l2_matches_dense(self, small_open):
        """The hop-algebra L^2 norm equals the dense one."""
        a = random_banded_operator(small_open, 2, seed=7)
        boxes = BoxSequence.concentric(small_open.window)
        m = a.dense()
        dense = np.sqrt(dense_trace(m.conj().T @ m, small_open, boxes.last).real)
        assert abs(lp_norm(a, 2, boxes) - dense) <= 1e-10

    def test_l1_of_unitary(self, torus):
        """|u| = 1 for a unitary, so every L^p norm is 1."""
        s1 = LatticeOperator.monomial(torus, (1, 0), np.exp(0.3j))
        assert np.isclose(lp_norm(s1, 1), 1.0)
        assert np.isclose(lp_norm(s1, 3), 1.0)

    def test_invalid_orders(self, small_open):
        """k < 0 and p < 1 are rejected."""
        one = LatticeOperator.identity(small_open)
        with pytest.raises(ValueError):
            decay_norm(one, -1)
        with pytest.raises(ValueError):
            lp_norm(one, 0)


# =============================================================================
# TEST evaluate_bulk
# =============================================================================

class TestEvaluateBulk:
    """Tests for the asymptotic constant-field limits."""

    @pytest.fixture
    def domain(self):
        return LatticeDomain.open(48)

    def test_flux_limits(self, domain, iwatsuka):
        """f_I tends to e^{i b_-} and e^{i b_+}."""
        s1, s2 = translations(iwatsuka, Gauge.LANDAU, domain)
        bulk = evaluate_bulk(commutator_flux(s1, s2))
        assert np.allclose(bulk.minus.coefficient((0, 0))[1:, 1:], np.exp(1j * iwatsuka.b_minus))
        assert np.allclose(bulk.plus.coefficient((0, 0))[1:, 1:], np.exp(1j * iwatsuka.b_plus))

    def test_translation_limits(self, domain, iwatsuka):
        """s_{I,1} tends to the Landau translations of the bulk fields."""
        s1, _ = translations(iwatsuka, Gauge.LANDAU, domain)
        bulk = evaluate_bulk(s1)
        for strength, side in ((iwatsuka.b_minus, bulk.minus), (iwatsuka.b_plus, bulk.plus)):
            reference, _ = translations(MagneticField.constant(strength), Gauge.LANDAU, domain)
            assert np.allclose(side.coefficient((1, 0)), reference.coefficient((1, 0)))

    def test_harper_limits(self, domain, iwatsuka):
        """h_I tends to the constant-field Harper operators."""
        h = harper_hamiltonian(build_potential(iwatsuka, Gauge.LANDAU, domain.window), domain)
        bulk = evaluate_bulk(h)
        for strength, side in ((iwatsuka.b_minus, bulk.minus), (iwatsuka.b_plus, bulk.plus)):
            reference = landau_harper(strength, domain)
            for hop in reference.hops:
                assert np.allclose(side.coefficient(hop), reference.coefficient(hop))

    def test_column_projection_vanishes(self, domain):
        """p_0 is compactly supported in n1, so both limits are zero."""
        bulk = evaluate_bulk(column_projection(domain, 0))
        assert np.all(bulk.minus.coefficient((0, 0)) == 0.0)
        assert np.all(bulk.plus.coefficient((0, 0)) == 0.0)

    def test_random_rejected(self, domain):
        """Random coefficients do not stabilize."""
        with pytest.raises(NumericalError):
            evaluate_bulk(random_banded_operator(domain, 1, seed=0))

    def test_window_too_small(self):
        """Tiny windows leave no room for the comparison slabs."""
        domain = LatticeDomain.open(1)
        with pytest.raises(NumericalError):
            evaluate_bulk(LatticeOperator.identity(domain), margin=2)


# =============================================================================
# INTEGRATION TESTS
# =============================================================================

class TestIntegration:
    """End-to-end checks across fields, gauges and operators."""

    def test_localized_string_support(self):
        """A single localized site twists s1 along its half-line only."""
        half_width = 10
        domain = LatticeDomain.open(half_width)
        field = MagneticField.localized([(0, 0)], 1.3)
        s1, _ = translations(field, Gauge.HALF_LINE, domain)
        twisted = np.abs(s1.coefficient((1, 0))[1:] - 1.0) > 1e-12
        assert int(np.count_nonzero(twisted)) == half_width + 1

    def test_localized_flux_compact(self):
        """The flux of a localized field differs from 1 only at its sites."""
        domain = LatticeDomain.open(6)
        field = MagneticField.localized([(1, 1), (-2, 3)], 0.8)
        s1, s2 = translations(field, Gauge.HALF_LINE, domain)
        flux = commutator_flux(s1, s2).coefficient((0, 0))
        r1, r2 = domain.window.slices_of(domain.window.interior())
        moved = np.argwhere(np.abs(flux[r1, r2] - 1.0) > 1e-12)
        assert len(moved) == 2

    def test_half_plane_traces(self):
        """Half-plane projections of an open window have traces by column count."""
        domain = LatticeDomain.open(4)
        minus, plus = half_plane_projections(domain)
        box = BoxSequence((domain.window,))
        assert np.isclose(trace_per_unit_volume(minus, box).value, 4 / 9)
        assert np.isclose(trace_per_unit_volume(plus, box).value, 4 / 9)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
