"""Experiment configuration: strict JSON parsing, defaults, hashing."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .pointer import PixelGrid
from .polarization import AngleSet, DEFAULT_ANGLES, singlet, werner
from .weak import DEFAULT_ORDERING, MeasurementSettings

DEFAULT_STATE = "werner:0.986"


@dataclass
class ExperimentConfig:
    state: str = DEFAULT_STATE
    angles: AngleSet = DEFAULT_ANGLES
    g_over_sigma: float = 0.1
    sigma: float = 3.0
    grid: PixelGrid = field(default_factory=PixelGrid)
    clip_edges: bool = True
    ordering: tuple = DEFAULT_ORDERING
    n_events: int = 1_000_000
    seed: int = 7
    accidental_rate: float = 0.0
    hist_bin_width: float = 1.0
    hist_range: tuple = (-60.0, 60.0)
    tomo_shots: int = 100_000
    tomo_seed: int = 1

    def input_state(self):
        if self.state == "singlet":
            return singlet()
        if self.state.startswith("werner:"):
            try:
                v = float(self.state.split(":", 1)[1])
            except ValueError:
                raise ConfigError("bad werner visibility in %r" % self.state)
            try:
                return werner(v)
            except ValueError as exc:
                raise ConfigError(str(exc))
        raise ConfigError("unknown state spec %r" % self.state)

    def settings(self, g_over_sigma=None):
        r = self.g_over_sigma if g_over_sigma is None else g_over_sigma
        g = r * self.sigma
        return MeasurementSettings(
            angles=self.angles, g_xa=g, g_ya=g, g_xb=g, g_yb=g,
            sigma=self.sigma, ordering=self.ordering,
        )


def _expect_keys(obj, allowed, context):
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ConfigError("unknown %s key(s): %s" % (context, ", ".join(sorted(unknown))))


def _number(obj, key, default, context="config"):
    val = obj.get(key, default)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError("%s.%s must be a number" % (context, key))
    if not math.isfinite(val):
        raise ConfigError("%s.%s must be finite" % (context, key))
    return val


def parse_config(obj):
    """Build an ExperimentConfig from a dict, rejecting unknown keys."""
    if not isinstance(obj, dict):
        raise ConfigError("config root must be a JSON object")
    allowed = {
        "state", "angles", "g_over_sigma", "sigma", "grid", "clip_edges",
        "ordering", "n_events", "seed", "accidental_rate", "histogram",
        "tomography",
    }
    _expect_keys(obj, allowed, "config")

    angles = DEFAULT_ANGLES
    if "angles" in obj:
        a = obj["angles"]
        _expect_keys(a, {"alpha1", "alpha2", "beta1", "beta2"}, "angles")
        angles = AngleSet(
            _number(a, "alpha1", DEFAULT_ANGLES.alpha1, "angles"),
            _number(a, "alpha2", DEFAULT_ANGLES.alpha2, "angles"),
            _number(a, "beta1", DEFAULT_ANGLES.beta1, "angles"),
            _number(a, "beta2", DEFAULT_ANGLES.beta2, "angles"),
        )

    grid = PixelGrid()
    if "grid" in obj:
        g = obj["grid"]
        _expect_keys(g, {"n", "pitch", "centers"}, "grid")
        n = g.get("n", 24)
        if not isinstance(n, int) or isinstance(n, bool):
            raise ConfigError("grid.n must be an integer")
        centers = g.get("centers", [n / 2.0] * 4)
        if not isinstance(centers, (list, tuple)) or len(centers) != 4:
            raise ConfigError("grid.centers must list four values")
        try:
            grid = PixelGrid(n=n, pitch=_number(g, "pitch", 1.0, "grid"),
                             centers=tuple(float(c) for c in centers))
        except ValueError as exc:
            raise ConfigError(str(exc))

    ordering = DEFAULT_ORDERING
    if "ordering" in obj:
        o = obj["ordering"]
        if not isinstance(o, (list, tuple)):
            raise ConfigError("ordering must be a list of axis names")
        ordering = tuple(o)

    state = obj.get("state", DEFAULT_STATE)
    if not isinstance(state, str):
        raise ConfigError("state must be a string")

    n_events = obj.get("n_events", 1_000_000)
    if not isinstance(n_events, int) or isinstance(n_events, bool):
        raise ConfigError("n_events must be an integer")
    if n_events <= 0:
        raise ConfigError("n_events must be positive")

    seed = obj.get("seed", 7)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed must be a nonnegative integer")

    rate = _number(obj, "accidental_rate", 0.0)
    if not (0.0 <= rate < 1.0):
        raise ConfigError("accidental_rate must be in [0, 1)")

    hist_bin_width, hist_range = 1.0, (-60.0, 60.0)
    if "histogram" in obj:
        h = obj["histogram"]
        _expect_keys(h, {"bin_width", "range"}, "histogram")
        hist_bin_width = _number(h, "bin_width", 1.0, "histogram")
        if hist_bin_width <= 0:
            raise ConfigError("histogram.bin_width must be positive")
        rng = h.get("range", [-60.0, 60.0])
        if not isinstance(rng, (list, tuple)) or len(rng) != 2 or rng[0] >= rng[1]:
            raise ConfigError("histogram.range must be [lo, hi] with lo < hi")
        hist_range = (float(rng[0]), float(rng[1]))

    tomo_shots, tomo_seed = 100_000, 1
    if "tomography" in obj:
        t = obj["tomography"]
        _expect_keys(t, {"shots", "seed"}, "tomography")
        tomo_shots = t.get("shots", 100_000)
        tomo_seed = t.get("seed", 1)
        if not isinstance(tomo_shots, int) or tomo_shots <= 0:
            raise ConfigError("tomography.shots must be a positive integer")
        if not isinstance(tomo_seed, int) or tomo_seed < 0:
            raise ConfigError("tomography.seed must be a nonnegative integer")

    sigma = _number(obj, "sigma", 3.0)
    if sigma <= 0:
        raise ConfigError("sigma must be positive")
    g_over_sigma = _number(obj, "g_over_sigma", 0.1)
    if g_over_sigma < 0:
        raise ConfigError("g_over_sigma must be nonnegative")

    clip_edges = obj.get("clip_edges", True)
    if not isinstance(clip_edges, bool):
        raise ConfigError("clip_edges must be a boolean")

    cfg = ExperimentConfig(
        state=state, angles=angles, g_over_sigma=g_over_sigma, sigma=sigma,
        grid=grid, clip_edges=clip_edges, ordering=ordering, n_events=n_events,
        seed=seed, accidental_rate=rate, hist_bin_width=hist_bin_width,
        hist_range=hist_range, tomo_shots=tomo_shots, tomo_seed=tomo_seed,
    )
    cfg.input_state()  # fail fast on a bad state spec
    try:
        cfg.settings()
    except ValueError as exc:
        raise ConfigError(str(exc))
    return cfg


def config_to_dict(cfg):
    """Serializable dict; parse(serialize(cfg)) round-trips."""
    return {
        "state": cfg.state,
        "angles": {
            "alpha1": cfg.angles.alpha1, "alpha2": cfg.angles.alpha2,
            "beta1": cfg.angles.beta1, "beta2": cfg.angles.beta2,
        },
        "g_over_sigma": cfg.g_over_sigma,
        "sigma": cfg.sigma,
        "grid": {"n": cfg.grid.n, "pitch": cfg.grid.pitch,
                 "centers": list(cfg.grid.centers)},
        "clip_edges": cfg.clip_edges,
        "ordering": list(cfg.ordering),
        "n_events": cfg.n_events,
        "seed": cfg.seed,
        "accidental_rate": cfg.accidental_rate,
        "histogram": {"bin_width": cfg.hist_bin_width, "range": list(cfg.hist_range)},
        "tomography": {"shots": cfg.tomo_shots, "seed": cfg.tomo_seed},
    }


def config_hash(cfg):
    """SHA-256 of the canonical JSON form, embedded in every artifact."""
    payload = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("invalid JSON in %s: %s" % (path, exc))
    return parse_config(obj)
