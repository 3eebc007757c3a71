"""Seeded Monte Carlo sweeps over power, user count and aperture size.

Every trial draws its users from ``default_rng([seed, trial_index])``, and
the same drop is reused for every swept value (common random numbers).  For
the user-count sweep the first ``K`` users of a trial are the same for every
``K``.  Per-trial results are reduced in trial order, so the output does not
depend on the number of worker threads.
"""

import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .beamforming import SCHEMES
from .exceptions import ConfigError
from .geometry import (
    FREE_SPACE_IMPEDANCE,
    SPEED_OF_LIGHT,
    Aperture,
    UserLayout,
    UserRegion,
    WaveParams,
    sample_user_positions,
)
from .metrics import sinr_report
from .quadrature import correlation_matrix, sample_channels, tensor_grid
from .scenario import DEFAULT_NOISE_VARIANCE, DEFAULT_POWER
from .spda import discretize, spda_channels

__all__ = [
    "SWEEP_KINDS",
    "ARRAYS",
    "CSV_HEADER",
    "THREADS_ENV",
    "ExperimentConfig",
    "ResultRow",
    "default_values",
    "load_config",
    "run_sweep",
    "emit_csv",
    "format_csv",
]

SWEEP_KINDS = ("power", "users", "aperture")
ARRAYS = ("capa", "spda")
CSV_HEADER = (
    "sweep",
    "value",
    "array",
    "scheme",
    "mean_sum_rate",
    "mean_sum_mse",
    "mean_per_user_rate",
    "mean_eff_gain",
    "trials",
    "seed",
)
THREADS_ENV = "CAPA_THREADS"

_POWER_MULTIPLIERS = (0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)


def default_values(kind, power=DEFAULT_POWER):
    """Default sweep grid for each kind."""
    if kind == "power":
        return tuple(power * m for m in _POWER_MULTIPLIERS)
    if kind == "users":
        return tuple(float(k) for k in range(2, 17))
    if kind == "aperture":
        return tuple(round(0.05 * i, 10) for i in range(1, 11))
    raise ConfigError(f"sweep.kind must be one of {SWEEP_KINDS}, got {kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """All inputs of a sweep.  Field names double as flat config keys.

    Powers are absolute transmit powers; the aperture sweep uses square
    apertures of the listed areas (m^2).  ``spda_spacing`` is in wavelengths
    and ``spda_element_area`` defaults to the isotropic ``lambda^2 / (4 pi)``.
    """

    seed: int = 1
    trials: int = 50
    sweep_kind: str = "power"
    sweep_values: tuple = None
    aperture_Lx: float = 0.5
    aperture_Ly: float = 0.5
    region_Ux: float = 5.0
    region_Uy: float = 5.0
    region_Uz_min: float = 15.0
    region_Uz_max: float = 30.0
    wave_frequency: float = 2.4e9
    wave_speed_of_light: float = SPEED_OF_LIGHT
    wave_impedance: float = FREE_SPACE_IMPEDANCE
    users_K: int = 8
    users_power: float = DEFAULT_POWER
    users_noise_variance: float = DEFAULT_NOISE_VARIANCE
    quad_order: int = 30
    spda_spacing: float = 0.5
    spda_element_area: float = None
    schemes: tuple = SCHEMES
    arrays: tuple = ARRAYS

    def __post_init__(self):
        set_ = lambda name, value: object.__setattr__(self, name, value)  # noqa: E731
        if self.sweep_kind not in SWEEP_KINDS:
            raise ConfigError(f"sweep.kind must be one of {SWEEP_KINDS}, got {self.sweep_kind!r}")
        if self.sweep_values is None:
            set_("sweep_values", default_values(self.sweep_kind, self.users_power))
        values = tuple(float(v) for v in self.sweep_values)
        if not values or any(not (v > 0 and np.isfinite(v)) for v in values):
            raise ConfigError("sweep.values must be a nonempty list of positive numbers")
        if self.sweep_kind == "users" and any(v != int(v) for v in values):
            raise ConfigError("sweep.values for a users sweep must be integers")
        set_("sweep_values", values)
        for name in ("trials", "users_K", "quad_order"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ConfigError(f"{_key(name)} must be a positive integer, got {value!r}")
            set_(name, int(value))
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError(f"seed must be a nonnegative integer, got {self.seed!r}")
        set_("seed", int(self.seed))
        schemes = tuple(s.upper() for s in _as_list(self.schemes))
        if not schemes or any(s not in SCHEMES for s in schemes):
            raise ConfigError(f"schemes must be a nonempty subset of {SCHEMES}, got {self.schemes!r}")
        set_("schemes", schemes)
        arrays = tuple(a.lower() for a in _as_list(self.arrays))
        if not arrays or any(a not in ARRAYS for a in arrays):
            raise ConfigError(f"arrays must be a nonempty subset of {ARRAYS}, got {self.arrays!r}")
        set_("arrays", arrays)
        if not self.spda_spacing > 0:
            raise ConfigError("spda.spacing must be positive")
        if self.spda_element_area is not None and not self.spda_element_area > 0:
            raise ConfigError("spda.element_area must be positive")
        # construct once so that geometry errors surface at load time
        self.aperture(), self.region(), self.wave()
        if not (self.users_power > 0 and self.users_noise_variance > 0):
            raise ConfigError("users.power and users.noise_variance must be positive")

    def aperture(self, value=None):
        if self.sweep_kind == "aperture" and value is not None:
            return Aperture.square(value)
        return Aperture(self.aperture_Lx, self.aperture_Ly)

    def region(self):
        return UserRegion(self.region_Ux, self.region_Uy, self.region_Uz_min, self.region_Uz_max)

    def wave(self):
        return WaveParams(self.wave_frequency, self.wave_speed_of_light, self.wave_impedance)

    def users(self, value=None):
        return int(value) if self.sweep_kind == "users" and value is not None else self.users_K

    def power(self, value=None):
        return value if self.sweep_kind == "power" and value is not None else self.users_power

    def max_users(self):
        if self.sweep_kind == "users":
            return int(max(self.sweep_values))
        return self.users_K

    def override(self, **changes):
        """Copy with the given fields replaced (``None`` values are ignored)."""
        changes = {k: v for k, v in changes.items() if v is not None}
        if "sweep_kind" in changes and changes["sweep_kind"] != self.sweep_kind and "sweep_values" not in changes:
            changes["sweep_values"] = None
        return replace(self, **changes)


def _as_list(value):
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return list(value)


def _key(name):
    """Dotted config key of a field: ``users_K`` -> ``users.K``."""
    head, _, tail = name.partition("_")
    if head in ("sweep", "aperture", "region", "wave", "users", "spda") and tail:
        return f"{head}.{tail}"
    if name == "quad_order":
        return "quadrature.order"
    return name


_FIELDS_BY_KEY = {_key(f.name): f.name for f in fields(ExperimentConfig)}


def _flatten(obj, prefix=""):
    out = {}
    for k, v in obj.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def load_config(path=None, **overrides):
    """Build a config from an optional JSON file plus field overrides.

    The file holds flat dotted keys (``"users.K": 8``); nested objects are
    flattened to the same keys.  Unknown keys are rejected.
    """
    values = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in _flatten(raw).items():
            if key not in _FIELDS_BY_KEY:
                raise ConfigError(f"unknown config key {key!r}; known keys: {sorted(_FIELDS_BY_KEY)}")
            values[_FIELDS_BY_KEY[key]] = value
    try:
        config = ExperimentConfig(**values)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    return config.override(**overrides)


@dataclass(frozen=True)
class ResultRow:
    """Trial-averaged performance of one (value, array, scheme) combination."""

    sweep: str
    value: float
    array: str
    scheme: str
    mean_sum_rate: float
    mean_sum_mse: float
    mean_per_user_rate: float
    mean_eff_gain: float
    trials: int
    seed: int

    def sort_key(self):
        return (self.value, self.array, self.scheme)


def _spda_array(config, aperture, wave):
    area = config.spda_element_area or wave.isotropic_area
    return discretize(aperture, config.spda_spacing * wave.wavelength, area)


def _run_trial(config, trial_index):
    """Per-trial metrics: ``{(value, array, scheme): (sum_rate, sum_mse, mean_rate, mean_gain)}``."""
    wave = config.wave()
    positions = sample_user_positions(config.seed, trial_index, config.max_users(), config.region())
    out = {}
    cache = {}
    for value in config.sweep_values:
        K = config.users(value)
        aperture = config.aperture(value)
        layout = UserLayout.isotropic(positions[:K], wave, config.power(value), config.users_noise_variance)
        key = (K, aperture)
        if key not in cache:
            cache[key] = {}
            if "capa" in config.arrays:
                grid = tensor_grid(aperture, config.quad_order, config.quad_order)
                cache[key]["capa"] = correlation_matrix(sample_channels(layout, wave, grid))
            if "spda" in config.arrays:
                cache[key]["spda"] = spda_channels(layout, wave, _spda_array(config, aperture, wave)).Rhat
        ratios = layout.snr_ratios
        for array, R in cache[key].items():
            for scheme in config.schemes:
                rep = sinr_report(scheme, R, ratios)
                out[(value, array, scheme)] = (
                    rep.sum_rate,
                    rep.sum_mse,
                    float(np.mean(rep.rate)),
                    float(np.mean(rep.eff_gain)),
                )
    return out


def _thread_count():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def run_sweep(config, threads=None):
    """Run every trial and average per (value, array, scheme).

    Parameters
    ----------
    config : ExperimentConfig
    threads : int, optional
        Worker threads; defaults to the ``CAPA_THREADS`` environment
        variable (1 if unset).  The result does not depend on it.

    Returns
    -------
    list of ResultRow
        Sorted by (value, array, scheme).
    """
    threads = _thread_count() if threads is None else int(threads)
    trials = range(config.trials)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_trial = list(pool.map(lambda t: _run_trial(config, t), trials))
    else:
        per_trial = [_run_trial(config, t) for t in trials]
    rows = []
    for key in sorted(per_trial[0]):
        value, array, scheme = key
        # summed in trial order so rounding never depends on scheduling
        stacked = np.array([trial[key] for trial in per_trial])
        means = [float(sum(col) / config.trials) for col in stacked.T]
        rows.append(ResultRow(config.sweep_kind, value, array, scheme, *means, config.trials, config.seed))
    return sorted(rows, key=ResultRow.sort_key)


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.12g}"


def format_csv(rows):
    """CSV text with a fixed header and 12 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in sorted(rows, key=ResultRow.sort_key):
        writer.writerow([_fmt(getattr(row, name)) for name in CSV_HEADER])
    return buf.getvalue()


def emit_csv(rows, path=None):
    """Write rows as CSV to ``path`` (UTF-8) or to stdout when ``path`` is None."""
    text = format_csv(rows)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None
