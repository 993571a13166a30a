"""
MagLat - Tasks
==============
Dispatch a validated run configuration to the core modules and collect the
results into a bundle. `run` maps failures onto the exit-code contract:
0 success, 1 I/O failure, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import time
from dataclasses import asdict
from typing import Any, Callable

import numpy as np

from config import OUTPUT, setup_logging
from .exceptions import ConfigError, MagLatError, NumericalError, OutputError
from .fields import build_potential, classify_asymptotics
from .interface import (
    SwitchFunction,
    bf_phase,
    fiber_hamiltonian,
    find_common_gap,
    interface_spectrum,
    k_grid,
    rational_flux,
    spectral_flow,
    u_delta,
    verify_duality,
    winding_number,
)
from .lattice_ops import (
    BoxSequence,
    LatticeDomain,
    LatticeOperator,
    cesaro_mean,
    harper_hamiltonian,
    operator_norm,
    partial_sum,
    regularity_norms,
)
from .nctorus import (
    band_chern_numbers,
    bulk_gaps,
    chern_fhs,
    chern_power_rieffel,
    fermi_projection,
    gap_label,
    harper_bloch_family,
    hofstadter_butterfly,
    power_rieffel,
    projection_trace,
)
from .results import ResultBundle, Table, write_bundle
from .runconfig import RunConfig

# Module logger
logger = setup_logging()

# Dense operator norms are skipped above this many sites
DENSE_SITE_LIMIT = 2500


# =============================================================================
# TASKS
# =============================================================================

def _spectrum(config: RunConfig) -> ResultBundle:
    assert config.model is not None
    table = interface_spectrum(config.model.field, config.numerics.k_points, config.numerics.strip)
    rows = list(table.rows())
    report = {
        "k_points": len(table.k),
        "strip_size": table.energies.shape[1],
        "energy_min": float(table.energies.min()),
        "energy_max": float(table.energies.max()),
        "max_interface_weight": float(table.weights.max()),
    }
    return ResultBundle(report, {"spectrum_table": Table(("k", "index", "energy", "interface_weight"), rows)})


def _butterfly(config: RunConfig) -> ResultBundle:
    rows = hofstadter_butterfly(config.options.q_max, config.options.butterfly_k_grid)
    report = {"q_max": config.options.q_max, "k_grid": config.options.butterfly_k_grid,
              "fluxes": len({(p, q) for p, q, _ in rows}), "rows": len(rows)}
    return ResultBundle(report, {"butterfly_table": Table(("p", "q", "energy"), rows)})


def _chern(config: RunConfig) -> ResultBundle:
    assert config.model is not None
    p, q = rational_flux(config.model.field.b)
    family = harper_bloch_family(p, q, config.numerics.bz_grid)
    mu = config.mu if config.mu is not None else 0.5 * sum(config.delta)  # type: ignore[arg-type]
    projection = fermi_projection(family, mu)
    chern = chern_fhs(projection)
    trace = projection_trace(projection)
    label = gap_label(trace, chern, p / q)
    groups = band_chern_numbers(family)
    spectrum = bulk_gaps(family)
    report = {
        "flux": [p, q],
        "mu": mu,
        "rank": projection.rank,
        "chern": chern,
        "trace": trace,
        "gap_label": {"M": label.m, "N": label.n, "residual": label.residual},
        "band_chern_numbers": [g.chern for g in groups],
        "gaps": [list(g) for g in spectrum.gaps],
    }
    rows = [(g.first, g.last, g.energy_min, g.energy_max, g.chern) for g in groups]
    return ResultBundle(report, {"chern_bands": Table(("first", "last", "energy_min", "energy_max", "chern"), rows)})


def _energy_window(config: RunConfig) -> tuple[float, float] | None:
    return None if config.auto_delta else config.delta


def _winding(config: RunConfig) -> ResultBundle:
    assert config.model is not None
    field_ = config.model.field
    numerics = config.numerics
    delta = _energy_window(config)
    if delta is None:
        minus = harper_bloch_family(*rational_flux(field_.b_minus), numerics.bz_grid)
        plus = harper_bloch_family(*rational_flux(field_.b_plus), numerics.bz_grid)
        delta = find_common_gap(minus, plus)
    phase = bf_phase(field_, numerics.strip)
    fibers = [fiber_hamiltonian(phase, k) for k in k_grid(numerics.k_points)]
    family = u_delta(fibers, SwitchFunction(delta[0], delta[1], numerics.profile))
    winding = winding_number(family, numerics.filter_half_width, numerics.derivative)
    table = interface_spectrum(field_, numerics.k_points, numerics.strip)
    flow = spectral_flow(table, 0.5 * (delta[0] + delta[1]), numerics.weight_threshold)
    if not winding.converged:
        raise NumericalError("winding", f"winding {winding.raw:.6f} is not close to an integer")
    report = {
        "delta": list(delta),
        "winding_raw": winding.raw,
        "winding": winding.value,
        "residual": winding.residual,
        "imaginary": winding.imaginary,
        "spectral_flow": flow.value,
        "spectral_flow_ambiguous": flow.ambiguous,
    }
    return ResultBundle(report)


def _duality(config: RunConfig) -> ResultBundle:
    assert config.model is not None
    numerics = config.numerics
    report = verify_duality(
        config.model.field,
        delta=_energy_window(config),
        M=numerics.strip,
        k_points=numerics.k_points,
        filter_half_width=numerics.filter_half_width,
        bz_grid=numerics.bz_grid,
        profile=numerics.profile,
        threshold=numerics.weight_threshold,
    )
    if not report.converged:
        raise NumericalError("duality", f"winding {report.winding_raw:.6f} is not close to an integer")
    return ResultBundle(report.to_dict())


def _power_rieffel(config: RunConfig) -> ResultBundle:
    options = config.options
    assert options.theta is not None and options.pr_delta is not None
    try:
        rep = power_rieffel(options.theta, options.pr_delta, options.circle_points)
    except ValueError as e:
        raise ConfigError("power_rieffel.K", str(e)) from e
    idempotency, selfadjointness = rep.projection_residuals()
    chern = chern_power_rieffel(rep, options.dual_grid)
    if not chern.converged:
        raise NumericalError("power-rieffel", f"Chern estimate {chern.raw:.6f} is not close to an integer")
    trace = rep.trace()
    label = gap_label(trace, chern.value, rep.theta)
    report = {
        "theta": rep.theta,
        "delta": rep.delta,
        "K": rep.K,
        "trace": trace,
        "chern": chern.value,
        "chern_raw": chern.raw,
        "chern_residual": chern.residual,
        "gap_label": {"M": label.m, "N": label.n, "residual": label.residual},
        "residuals": {"idempotency": idempotency, "self_adjointness": selfadjointness,
                      **rep.structure_residuals()},
    }
    rows = [(j / rep.K, float(rep.d0[j]), float(rep.d1[j])) for j in range(rep.K)]
    return ResultBundle(report, {"power_rieffel_profiles": Table(("x", "f", "g"), rows)})


def _lattice_hamiltonian(config: RunConfig) -> tuple[LatticeDomain, LatticeOperator]:
    assert config.model is not None
    domain = LatticeDomain.open(config.numerics.window)
    potential = build_potential(config.model.field, config.model.gauge, domain.window)
    return domain, harper_hamiltonian(potential, domain)


def _fourier(config: RunConfig) -> ResultBundle:
    domain, h = _lattice_hamiltonian(config)
    rows = [(r, s, float(np.max(np.abs(c)))) for (r, s), c in sorted(h.hops.items())]
    dense = domain.size <= DENSE_SITE_LIMIT
    exact = partial_sum(h, h.band_radius)
    cesaro = []
    for order in range(config.options.order + 1):
        mean = cesaro_mean(h, order)
        coefficient_error = max(float(np.max(np.abs(mean.coefficient(k) - h.coefficient(k))))
                                for k in h.hops)
        norm_error = operator_norm(mean - h) if dense else None
        cesaro.append((order, coefficient_error, norm_error if norm_error is not None else float("nan")))
    report = {
        "window": config.numerics.window,
        "band_radius": h.band_radius,
        "hops": [list(k) for k in sorted(h.hops)],
        "partial_sum_exact": all(np.array_equal(exact.coefficient(k), h.coefficient(k)) for k in h.hops),
        "operator_norms": dense,
    }
    return ResultBundle(report, {
        "fourier_coefficients": Table(("r", "s", "max_abs"), rows),
        "fourier_cesaro": Table(("order", "coefficient_error", "operator_norm_error"), cesaro),
    })


def _norms(config: RunConfig) -> ResultBundle:
    domain, h = _lattice_hamiltonian(config)
    options = config.options
    if options.norm_p != 2 and domain.size > DENSE_SITE_LIMIT:
        raise ConfigError("numerics.window", f"p={options.norm_p} needs a dense window of at most "
                                             f"{DENSE_SITE_LIMIT} sites")
    boxes = BoxSequence.concentric(domain.window, config.numerics.boxes)
    norms = regularity_norms(h, options.norm_k, options.norm_p, boxes)
    report = {"k": options.norm_k, "p": options.norm_p,
              "decay_norm": norms.decay_norm, "sobolev_norm": norms.sobolev_norm}
    return ResultBundle(report)


def _classify(config: RunConfig) -> ResultBundle:
    assert config.model is not None
    structure = classify_asymptotics(config.model.field)
    report = {"order": structure.order, "uniform": structure.uniform,
              "bulk_strengths": list(structure.bulk_strengths),
              "boundary_point_count": structure.boundary_point_count}
    return ResultBundle(report)


TASK_HANDLERS: dict[str, Callable[[RunConfig], ResultBundle]] = {
    "spectrum": _spectrum,
    "butterfly": _butterfly,
    "chern": _chern,
    "winding": _winding,
    "duality": _duality,
    "power-rieffel": _power_rieffel,
    "fourier": _fourier,
    "norms": _norms,
    "classify": _classify,
}


# =============================================================================
# ENTRY POINT
# =============================================================================

def _echo(config: RunConfig) -> dict[str, Any]:
    echo: dict[str, Any] = {"task": config.task, "numerics": asdict(config.numerics)}
    if config.model is not None:
        echo["model"] = {"field": dict(config.model.field_spec), "gauge": config.model.gauge.value,
                         "hamiltonian": config.model.hamiltonian}
    if config.delta is not None:
        echo["delta"] = list(config.delta)
    if config.auto_delta:
        echo["delta"] = "auto"
    if config.mu is not None:
        echo["mu"] = config.mu
    return echo


def run(config: RunConfig, write: bool = True) -> tuple[int, ResultBundle]:
    """
    Run one task and write its results.

    Args:
        config: Validated configuration.
        write: Write report.json and CSV tables to the output directory.

    Returns:
        (exit code, bundle). On failure the bundle carries a diagnostic
        report with status "error", and it is still written when possible.
    """
    started = time.perf_counter()
    code = 0
    try:
        bundle = TASK_HANDLERS[config.task](config)
        bundle.report = {"status": "ok", "result": bundle.report}
    except MagLatError as e:
        logger.error("Task %s failed: %s", config.task, e)
        code = e.exit_code
        bundle = ResultBundle({"status": "error", "error": {
            "type": type(e).__name__, "message": e.message, "details": e.details}})
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
        # failures inside numpy/scipy are numerical, never I/O
        logger.exception("Task %s failed inside the numerics", config.task)
        code = NumericalError.exit_code
        bundle = ResultBundle({"status": "error", "error": {
            "type": type(e).__name__, "message": f"Numerical failure during {config.task}",
            "details": str(e)}})

    bundle.report["config"] = _echo(config)
    bundle.report["tool_version"] = OUTPUT.tool_version
    bundle.report["wall_time"] = time.perf_counter() - started

    if write:
        try:
            write_bundle(bundle, config.output.directory, config.output.formats)
        except OutputError as e:
            logger.error("%s", e)
            return e.exit_code, bundle
    return code, bundle
