"""
MagLat - Run Configuration
==========================
Parse and validate JSON run configurations.

Strength values may be numbers or strings with rational-pi sugar:
"2pi*1/3", "2pi/3", "-pi/3", "pi", "0.25", "1/3".
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from config import NUMERICS, OUTPUT, POWER_RIEFFEL, setup_logging
from .exceptions import ConfigError, FieldError
from .fields import FieldKind, Gauge, MagneticField, build_field

# Module logger
logger = setup_logging()


TASKS = ("spectrum", "butterfly", "chern", "winding", "duality",
         "power-rieffel", "fourier", "norms", "classify")

_PI_PATTERN = re.compile(
    r"^(?P<sign>[+-])?(?P<coef>\d+(?:\.\d*)?)?\*?pi"
    r"(?:\*(?P<num>\d+)/(?P<den>\d+)|/(?P<div>\d+)|\*(?P<mul>\d+(?:\.\d*)?))?$"
)
_FRACTION_PATTERN = re.compile(r"^(?P<num>[+-]?\d+)/(?P<den>\d+)$")


# =============================================================================
# STRENGTH SUGAR
# =============================================================================

def parse_strength(value: Any, path: str = "") -> float:
    """
    Parse a real value with rational-pi sugar.

    Examples:
        >>> round(parse_strength("2pi*1/3"), 12) == round(2 * 3.141592653589793 / 3, 12)
        True
        >>> parse_strength("1/4")
        0.25
    """
    if isinstance(value, bool):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        result = float(value)
    elif isinstance(value, str):
        text = value.replace(" ", "").lower()
        match = _PI_PATTERN.match(text)
        fraction = _FRACTION_PATTERN.match(text)
        if match:
            result = float(match.group("coef") or 1.0) * np.pi
            if match.group("num"):
                if int(match.group("den")) == 0:
                    raise ConfigError(path, f"zero denominator in {value!r}")
                result *= int(match.group("num")) / int(match.group("den"))
            elif match.group("div"):
                if int(match.group("div")) == 0:
                    raise ConfigError(path, f"zero denominator in {value!r}")
                result /= int(match.group("div"))
            elif match.group("mul"):
                result *= float(match.group("mul"))
            if match.group("sign") == "-":
                result = -result
        elif fraction:
            if int(fraction.group("den")) == 0:
                raise ConfigError(path, f"zero denominator in {value!r}")
            result = float(Fraction(int(fraction.group("num")), int(fraction.group("den"))))
        else:
            try:
                result = float(text)
            except ValueError:
                raise ConfigError(path, f"cannot parse {value!r} as a strength") from None
    else:
        raise ConfigError(path, f"expected a number or string, got {type(value).__name__}")
    if not np.isfinite(result):
        raise ConfigError(path, f"value {value!r} is not finite")
    return result


# =============================================================================
# CONFIG TYPES
# =============================================================================

@dataclass(frozen=True)
class ModelConfig:
    field_spec: Mapping[str, Any]
    field: MagneticField
    gauge: Gauge
    hamiltonian: str = "harper"


@dataclass(frozen=True)
class NumericsConfig:
    window: int = NUMERICS.window_half_width
    strip: int = NUMERICS.strip_half_width
    k_points: int = NUMERICS.k_points
    filter_half_width: float = NUMERICS.filter_fraction * NUMERICS.strip_half_width
    bz_grid: tuple[int, int] = NUMERICS.bz_grid
    boxes: int = NUMERICS.box_count
    weight_threshold: float = NUMERICS.weight_threshold
    profile: str = "cosine"
    derivative: str = "spectral"


@dataclass(frozen=True)
class OutputConfig:
    directory: str = OUTPUT.default_directory
    formats: tuple[str, ...] = ("json", "csv")


@dataclass(frozen=True)
class TaskOptions:
    """Task-specific parameters with defaults."""
    theta: float | None = None
    pr_delta: float | None = None
    circle_points: int = POWER_RIEFFEL.circle_points
    dual_grid: tuple[int, int] = POWER_RIEFFEL.dual_grid
    q_max: int = NUMERICS.butterfly_q_max
    butterfly_k_grid: int = NUMERICS.butterfly_k_grid
    order: int = 10
    norm_k: int = 2
    norm_p: int = 2


@dataclass(frozen=True)
class RunConfig:
    task: str
    model: ModelConfig | None
    numerics: NumericsConfig
    delta: tuple[float, float] | None
    auto_delta: bool
    mu: float | None
    output: OutputConfig
    options: TaskOptions = field(default_factory=TaskOptions)
    source: Mapping[str, Any] = field(default_factory=dict, repr=False, compare=False)


# =============================================================================
# OVERRIDES
# =============================================================================

def apply_overrides(tree: dict[str, Any], overrides: Sequence[str]) -> dict[str, Any]:
    """
    Apply "key.path=value" overrides; values are read as JSON when possible.

    Raises:
        ConfigError: For malformed override strings.
    """
    for item in overrides:
        if "=" not in item:
            raise ConfigError(item, "override must look like key.path=value")
        key, raw = item.split("=", 1)
        parts = [p for p in key.strip().split(".") if p]
        if not parts:
            raise ConfigError(item, "empty override key")
        try:
            value: Any = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = tree
        for i, part in enumerate(parts[:-1]):
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            if not isinstance(child, dict):
                raise ConfigError(".".join(parts[: i + 1]), "cannot override inside a non-object")
            node = child
        node[parts[-1]] = value
        logger.debug("Override %s = %r", key, value)
    return tree


# =============================================================================
# VALIDATION HELPERS
# =============================================================================

def _section(tree: Mapping[str, Any], key: str) -> Mapping[str, Any]:
    value = tree.get(key, {})
    if not isinstance(value, Mapping):
        raise ConfigError(key, "expected an object")
    return value


def _positive_int(section: Mapping[str, Any], key: str, default: int, path: str) -> int:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"{path}.{key}", f"expected an integer, got {value!r}")
    if value <= 0:
        raise ConfigError(f"{path}.{key}", f"must be positive, got {value}")
    return int(value)


def _pair(value: Any, path: str) -> tuple[int, int]:
    if (not isinstance(value, Sequence) or isinstance(value, str) or len(value) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) and v > 0 for v in value)):
        raise ConfigError(path, f"expected two positive integers, got {value!r}")
    return (int(value[0]), int(value[1]))


def _parse_field(spec: Any) -> tuple[dict[str, Any], MagneticField]:
    if not isinstance(spec, Mapping):
        raise ConfigError("model.field", "expected an object")
    kind = str(spec.get("type", "")).lower()
    parsed: dict[str, Any] = {"type": kind}
    for key, value in spec.items():
        if key in ("b", "b_minus", "b_zero", "b_plus"):
            parsed[key] = parse_strength(value, f"model.field.{key}")
        elif key == "sites":
            if not isinstance(value, Sequence) or not all(
                    isinstance(s, Sequence) and len(s) == 2 for s in value):
                raise ConfigError("model.field.sites", "expected a list of [n1, n2] pairs")
            parsed[key] = [[int(s[0]), int(s[1])] for s in value]
        elif key != "type":
            raise ConfigError(f"model.field.{key}", "unknown field key")
    try:
        return parsed, build_field(parsed)
    except FieldError as e:
        raise ConfigError("model.field", e.message) from e


def _default_gauge(field_: MagneticField) -> Gauge:
    return Gauge.HALF_LINE if field_.kind == FieldKind.LOCALIZED else Gauge.LANDAU


def _parse_delta(tree: Mapping[str, Any]) -> tuple[tuple[float, float] | None, bool]:
    raw = tree.get("delta")
    if raw is None:
        return None, False
    if isinstance(raw, str) and raw.lower() == "auto":
        return None, True
    if not isinstance(raw, Sequence) or isinstance(raw, str) or len(raw) != 2:
        raise ConfigError("delta", f"expected [min, max] or \"auto\", got {raw!r}")
    lo = parse_strength(raw[0], "delta[0]")
    hi = parse_strength(raw[1], "delta[1]")
    if not lo < hi:
        raise ConfigError("delta", f"need min < max, got [{lo}, {hi}]")
    return (lo, hi), False


# =============================================================================
# PARSING
# =============================================================================

def load_tree(source: str | Path) -> dict[str, Any]:
    """
    Read a JSON document from a path or from literal text.

    Raises:
        ConfigError: If the file cannot be read or the JSON is malformed.
    """
    if isinstance(source, Path) or not source.lstrip().startswith("{"):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise ConfigError("", f"cannot read {path}: {e}") from e
    else:
        text = source
    try:
        tree = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("", f"malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(tree, dict):
        raise ConfigError("", "top level must be an object")
    return tree


def parse_config(source: str | Path | Mapping[str, Any], overrides: Sequence[str] = (),
                 task: str | None = None) -> RunConfig:
    """
    Parse, override and validate a run configuration.

    Args:
        source: Path to a JSON file, JSON text, or an already-loaded mapping.
        overrides: "key.path=value" strings applied before validation.
        task: Task name taking precedence over the document's "task".

    Returns:
        Frozen, validated configuration with defaults filled in.

    Raises:
        ConfigError: For malformed JSON or any schema violation; the field
            path is carried in the error details.
    """
    tree = dict(source) if isinstance(source, Mapping) else load_tree(source)
    tree = apply_overrides(tree, overrides)
    if task is not None:
        tree["task"] = task

    task_name = tree.get("task")
    if task_name not in TASKS:
        raise ConfigError("task", f"expected one of {', '.join(TASKS)}, got {task_name!r}")

    # -- model ----------------------------------------------------------------
    model: ModelConfig | None = None
    model_tree = _section(tree, "model")
    if "field" in model_tree:
        spec, field_ = _parse_field(model_tree["field"])
        gauge_name = model_tree.get("gauge")
        try:
            gauge = Gauge(gauge_name) if gauge_name is not None else _default_gauge(field_)
        except ValueError:
            raise ConfigError("model.gauge", f"unknown gauge {gauge_name!r}") from None
        hamiltonian = model_tree.get("hamiltonian", "harper")
        if hamiltonian != "harper":
            raise ConfigError("model.hamiltonian", f"only 'harper' is supported, got {hamiltonian!r}")
        model = ModelConfig(spec, field_, gauge, hamiltonian)
    elif task_name not in ("butterfly", "power-rieffel"):
        raise ConfigError("model.field", f"task '{task_name}' needs a field")

    # -- numerics -------------------------------------------------------------
    section = _section(tree, "numerics")
    strip = _positive_int(section, "strip", NUMERICS.strip_half_width, "numerics")
    filter_raw = section.get("filter", NUMERICS.filter_fraction * strip)
    filter_half_width = parse_strength(filter_raw, "numerics.filter")
    if not 0 < filter_half_width <= strip:
        raise ConfigError("numerics.filter", f"must lie in (0, {strip}], got {filter_half_width}")
    threshold = parse_strength(section.get("weight_threshold", NUMERICS.weight_threshold),
                               "numerics.weight_threshold")
    if not 0 < threshold < 1:
        raise ConfigError("numerics.weight_threshold", f"must lie in (0, 1), got {threshold}")
    profile = section.get("profile", "cosine")
    if profile not in ("cosine", "quintic"):
        raise ConfigError("numerics.profile", f"expected 'cosine' or 'quintic', got {profile!r}")
    derivative = section.get("derivative", "spectral")
    if derivative not in ("spectral", "central"):
        raise ConfigError("numerics.derivative", f"expected 'spectral' or 'central', got {derivative!r}")
    k_points = _positive_int(section, "k_points", NUMERICS.k_points, "numerics")
    if k_points < 3:
        raise ConfigError("numerics.k_points", "need at least 3 momenta")
    bz_grid = _pair(section.get("bz_grid", list(NUMERICS.bz_grid)), "numerics.bz_grid")
    if min(bz_grid) < 3:
        raise ConfigError("numerics.bz_grid", "need at least 3x3 momenta")
    numerics = NumericsConfig(
        window=_positive_int(section, "window", NUMERICS.window_half_width, "numerics"),
        strip=strip,
        k_points=k_points,
        filter_half_width=filter_half_width,
        bz_grid=bz_grid,
        boxes=_positive_int(section, "boxes", NUMERICS.box_count, "numerics"),
        weight_threshold=threshold,
        profile=profile,
        derivative=derivative,
    )

    # -- energies -------------------------------------------------------------
    delta, auto_delta = (None, False)
    mu = None
    if task_name != "power-rieffel":
        delta, auto_delta = _parse_delta(tree)
    if "mu" in tree and tree["mu"] is not None:
        mu = parse_strength(tree["mu"], "mu")

    # -- task options ---------------------------------------------------------
    options = _parse_options(tree, task_name)

    # -- output ---------------------------------------------------------------
    out = _section(tree, "output")
    formats = out.get("formats", ["json", "csv"])
    if not isinstance(formats, Sequence) or isinstance(formats, str) or \
            not set(formats) <= {"json", "csv"} or "json" not in formats:
        raise ConfigError("output.formats", "expected a list containing 'json' and optionally 'csv'")
    directory = out.get("directory", OUTPUT.default_directory)
    if not isinstance(directory, str) or not directory:
        raise ConfigError("output.directory", "expected a non-empty string")
    output = OutputConfig(directory, tuple(formats))

    config = RunConfig(task_name, model, numerics, delta, auto_delta, mu, output, options, tree)
    _check_requirements(config)
    logger.debug("Parsed configuration for task %s", task_name)
    return config


def _parse_options(tree: Mapping[str, Any], task: str) -> TaskOptions:
    section = _section(tree, "options")
    values: dict[str, Any] = {}
    if task == "power-rieffel":
        pr = _section(tree, "power_rieffel")
        theta = pr.get("theta", tree.get("theta"))
        delta = pr.get("delta", tree.get("delta"))
        if theta is None:
            raise ConfigError("theta", "task 'power-rieffel' needs theta")
        if delta is None or isinstance(delta, (list, tuple)):
            raise ConfigError("delta", "task 'power-rieffel' needs a scalar ramp width delta")
        values["theta"] = parse_strength(theta, "theta")
        values["pr_delta"] = parse_strength(delta, "delta")
        if not (0 < values["pr_delta"] < values["theta"] and values["theta"] + values["pr_delta"] < 1):
            raise ConfigError("delta", "need 0 < delta < theta and theta + delta < 1")
        values["circle_points"] = _positive_int(pr, "K", POWER_RIEFFEL.circle_points, "power_rieffel")
        values["dual_grid"] = _pair(pr.get("dual_grid", list(POWER_RIEFFEL.dual_grid)),
                                    "power_rieffel.dual_grid")
    for key, default in (("q_max", NUMERICS.butterfly_q_max),
                         ("butterfly_k_grid", NUMERICS.butterfly_k_grid),
                         ("order", 10), ("norm_k", 2), ("norm_p", 2)):
        if key in section:
            values[key] = _positive_int(section, key, default, "options")
    if values.get("norm_p", 2) not in (1, 2):
        raise ConfigError("options.norm_p", "p must be 1 or 2")
    return TaskOptions(**values)


def _check_requirements(config: RunConfig) -> None:
    field_ = config.model.field if config.model else None
    if config.task in ("duality", "winding"):
        if config.delta is None and not config.auto_delta:
            raise ConfigError("delta", f"task '{config.task}' needs delta ([min, max] or \"auto\")")
        if field_ is None or field_.kind != FieldKind.IWATSUKA:
            raise ConfigError("model.field.type", f"task '{config.task}' needs an Iwatsuka field")
    if config.task == "spectrum" and field_ is not None and not field_.is_vertically_invariant:
        raise ConfigError("model.field.type", "task 'spectrum' needs a constant or Iwatsuka field")
    if config.task == "chern":
        if field_ is None or field_.kind != FieldKind.CONSTANT:
            raise ConfigError("model.field.type", "task 'chern' needs a constant field")
        if config.mu is None and config.delta is None:
            raise ConfigError("mu", "task 'chern' needs mu or delta")
    if config.task == "classify" and field_ is not None and field_.kind == FieldKind.CUSTOM_GRID:
        raise ConfigError("model.field.type", "custom grids cannot be classified")
