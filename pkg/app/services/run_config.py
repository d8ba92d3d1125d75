"""`key = value` run configuration: parsing, validation and rendering."""

import logging
import math
from typing import Any, Callable, Optional

from pydantic import ValidationError

from app.core.errors import ConfigParseError, ConfigValidationError
from app.models.gmmb import GmmbParams, McConfig, ScrPrinciple
from app.models.run_config import RunConfig

logger = logging.getLogger(__name__)

GRID_TOL = 1e-12


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_grid(text: str) -> tuple[float, ...]:
    """`a:step:b` (inclusive of b within GRID_TOL) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("grid must read start:step:stop")
        start, step, stop = (float(part) for part in parts)
        if step == 0 or not all(math.isfinite(x) for x in (start, step, stop)):
            raise ValueError("grid step must be finite and non-zero")
        steps = (stop - start) / step
        if steps < -GRID_TOL:
            raise ValueError("grid step points away from the stop value")
        count = math.floor(steps + GRID_TOL * max(1.0, abs(steps))) + 1
        return tuple(round(start + k * step, 12) for k in range(count))
    return tuple(float(item) for item in text.split(",") if item.strip())


def _format_float(x: float) -> str:
    return repr(float(x))


# config key -> (section, field, parser, renderer)
_KEYS: dict[str, tuple[str, str, Callable[[str], Any], Callable[[Any], str]]] = {
    "c": ("model", "c", float, _format_float),
    "xi": ("model", "xi", float, _format_float),
    "lambda0": ("model", "lambda0", float, _format_float),
    "r": ("model", "r", float, _format_float),
    "sigma": ("model", "sigma", float, _format_float),
    "rho": ("model", "rho", float, _format_float),
    "T": ("model", "T", float, _format_float),
    "K": ("model", "K", float, _format_float),
    "y0": ("model", "y0", float, _format_float),
    "mu": ("model", "mu", float, _format_float),
    "n_paths": ("mc", "n_paths", int, str),
    "seed": ("mc", "seed", int, str),
    "n_threads": ("mc", "n_threads_hint", int, str),
    "antithetic": ("mc", "antithetic", _parse_bool, lambda v: "true" if v else "false"),
    "scr_principle": ("scr_principle", "kind", str, str),
    "beta": ("scr_principle", "beta", float, _format_float),
    "tvar_level": ("scr_principle", "level", float, _format_float),
    "coc_rate": ("run", "coc_rate", float, _format_float),
    "rho_grid": ("run", "rho_grid", parse_grid, lambda grid: ", ".join(_format_float(x) for x in grid)),
    "output_path": ("run", "output_path", str, str),
}

_SECTIONS = {"model": GmmbParams, "mc": McConfig, "scr_principle": ScrPrinciple}


def _key_for(section: str, field: str) -> str:
    for key, (sec, name, _, _) in _KEYS.items():
        if sec == section and name == field:
            return key
    return field


def _build(section: str, values: dict[str, Any]) -> Any:
    model = _SECTIONS.get(section, RunConfig)
    try:
        return model(**values)
    except ValidationError as exc:
        error = exc.errors()[0]
        field = str(error["loc"][0]) if error["loc"] else section
        raise ConfigValidationError(error["msg"], _key_for(section, field)) from exc


def build_config(values: dict[str, Any]) -> RunConfig:
    """Validate config-key values (already typed) into a RunConfig."""
    sections: dict[str, dict[str, Any]] = {"model": {}, "mc": {}, "scr_principle": {}, "run": {}}
    for key, raw in values.items():
        section, field, _, _ = _KEYS[key]
        sections[section][field] = raw
    run = dict(sections.pop("run"))
    for section, fields in sections.items():
        run[section] = _build(section, fields)
    return _build("run", run)


def parse_config(text: str) -> RunConfig:
    values: dict[str, Any] = {}
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw_value = line.partition("=")
        key, raw_value = key.strip(), raw_value.strip()
        if not sep or not key or not raw_value:
            raise ConfigParseError(f"expected 'key = value', got {raw_line.strip()!r}", line_number)
        if key not in _KEYS:
            raise ConfigParseError(f"unknown key {key!r}", line_number)
        if key in values:
            raise ConfigParseError(f"duplicate key {key!r}", line_number)
        try:
            values[key] = _KEYS[key][2](raw_value)
        except ValueError as exc:
            raise ConfigParseError(f"bad value for {key!r}: {exc}", line_number) from exc
    logger.debug("parsed %d config keys", len(values))
    return build_config(values)


def render_config(config: RunConfig) -> str:
    sections = {
        "model": config.model,
        "mc": config.mc,
        "scr_principle": config.scr_principle,
        "run": config,
    }
    lines = []
    for key, (section, field, _, render) in _KEYS.items():
        current: Optional[Any] = getattr(sections[section], field)
        if current is None:
            continue
        lines.append(f"{key} = {render(current)}")
    return "\n".join(lines) + "\n"


def with_overrides(
    config: RunConfig,
    *,
    seed: Optional[int] = None,
    rho: Optional[float] = None,
    output_path: Optional[str] = None,
) -> RunConfig:
    """Apply command-line flags on top of a parsed configuration."""
    values: dict[str, Any] = {}
    for key, (section, field, _, _) in _KEYS.items():
        owner = config if section == "run" else getattr(config, section)
        current = getattr(owner, field)
        if current is not None:
            values[key] = current
    if seed is not None:
        values["seed"] = seed
    if rho is not None:
        values["rho_grid"] = (rho,)
    if output_path is not None:
        values["output_path"] = output_path
    return build_config(values)
