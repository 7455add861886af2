"""Run configuration: one JSON file, dotted-path command-line overrides, and
a stable hash of the physics-relevant subset.

The hash covers the network, sources and grid blocks (not sampler seeds or
noise), so an event file and a theory grid produced from the same physics
carry the same hash and can be cross-checked at analysis time.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math

import numpy as np

from tribeat.grids import GridSpec
from tribeat.network import NetworkConfigError, load_family, load_matrix, reference_network
from tribeat.sampler import NoiseModel
from tribeat.wavepacket import (
    REFERENCE_DETUNINGS_MHZ,
    SourceSet,
    Wavepacket,
)

SCHEMA_VERSION = 1

DEFAULT_CONFIG: dict = {
    "schema_version": SCHEMA_VERSION,
    "network": {"kind": "reference", "phi": 0.0, "path": None},
    "sources": {
        "detunings_mhz": list(REFERENCE_DETUNINGS_MHZ),
        "t0_ns": [0.0, 0.0, 0.0],
        "envelope": {"shape": "double_exponential", "rise_ns": 5.0, "fall_ns": 25.0},
        "efficiency": 1.0,
        "contamination": 0.0,
    },
    "noise": {"eta": 1.0, "jitter_ns": 0.0, "q": 0.0},
    "sampler": {"n_events": 10000, "seed": None, "post_select": True,
                "distinguishable": False},
    "grid": {"x_min": -100.0, "x_max": 100.0, "y_min": -100.0, "y_max": 100.0,
             "step": 1.0},
    "analysis": {"r0_ns": 3.0},
    "output_dir": ".",
}


class ConfigError(ValueError):
    pass


def load_config(path: str | None, overrides: list[str] | None = None) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                user = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(user, dict):
            raise ConfigError(f"{path}: top level must be an object")
        version = user.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version} (expected {SCHEMA_VERSION})")
        _merge(cfg, user)
    for item in overrides or []:
        apply_override(cfg, item)
    return cfg


def _merge(base: dict, update: dict) -> None:
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value


def apply_override(cfg: dict, item: str) -> None:
    """Apply one 'a.b.c=value' override; values parse as JSON, else strings."""
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form path=value")
    path, _, raw = item.partition("=")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    keys = path.split(".")
    for key in keys[:-1]:
        if key not in node or not isinstance(node[key], dict):
            raise ConfigError(f"unknown config section {key!r} in override {item!r}")
        node = node[key]
    if keys[-1] not in node:
        raise ConfigError(f"unknown config key {keys[-1]!r} in override {item!r}")
    node[keys[-1]] = value


def _canonical(obj):
    """Normalise numbers to float so 0 and 0.0 hash identically."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (int, float)):
        return float(obj)
    if isinstance(obj, dict):
        return {k: _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    return obj


def config_hash(cfg: dict) -> str:
    """Short stable hash of the physics subset (network and sources).

    Event files and theory grids produced from the same physics carry the
    same hash whatever the sampler, noise or grid settings, so they can be
    cross-checked at analysis time.
    """
    subset = _canonical({
        "schema_version": cfg.get("schema_version", SCHEMA_VERSION),
        "network": cfg["network"],
        "sources": cfg["sources"],
    })
    canon = json.dumps(subset, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def build_unitary(cfg: dict) -> np.ndarray:
    net = cfg["network"]
    kind = net.get("kind", "reference")
    phi = float(net.get("phi", 0.0))
    if not math.isfinite(phi):
        raise ConfigError("network.phi must be finite")
    if kind == "reference":
        return reference_network(phi)
    if kind == "circuit_file":
        fam = load_family(net["path"])
        return fam.unitary(phi)
    if kind == "matrix_file":
        u = load_matrix(net["path"])
        defect = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
        if defect > 1e-10:
            raise NetworkConfigError(
                f"matrix file {net['path']} is not unitary (defect {defect:.2e})")
        return u
    raise ConfigError(f"unknown network.kind {kind!r}")


def build_sources(cfg: dict) -> SourceSet:
    src = cfg["sources"]
    detunings = [float(v) for v in src["detunings_mhz"]]
    t0s = [float(v) for v in src.get("t0_ns", [0.0] * len(detunings))]
    if len(t0s) != len(detunings):
        raise ConfigError("sources.t0_ns must match sources.detunings_mhz in length")
    env = src.get("envelope", DEFAULT_CONFIG["sources"]["envelope"])
    packets = []
    for nu, t0 in zip(detunings, t0s):
        packets.append(_make_packet(env, t0, nu))
    return SourceSet(wavepackets=tuple(packets),
                     efficiency=float(src.get("efficiency", 1.0)),
                     contamination=float(src.get("contamination", 0.0)))


def _make_packet(env: dict, t0: float, nu: float) -> Wavepacket:
    shape = env.get("shape", "double_exponential")
    if shape == "double_exponential":
        return Wavepacket.double_exponential(rise_ns=float(env.get("rise_ns", 5.0)),
                                             fall_ns=float(env.get("fall_ns", 25.0)),
                                             t0_ns=t0, detuning_mhz=nu)
    if shape == "one_sided_exponential":
        return Wavepacket.one_sided_exponential(gamma_per_ns=float(env["gamma_per_ns"]),
                                                t0_ns=t0, detuning_mhz=nu)
    if shape == "gaussian":
        return Wavepacket.gaussian(sigma_ns=float(env["sigma_ns"]), t0_ns=t0, detuning_mhz=nu)
    if shape == "tabulated":
        path = env["path"]
        data = np.loadtxt(path)
        if data.ndim != 2 or data.shape[1] != 2:
            raise ConfigError(f"tabulated envelope {path} must have two columns (t_ns, amplitude)")
        return Wavepacket.tabulated(data[:, 0], data[:, 1], t0_ns=t0, detuning_mhz=nu)
    raise ConfigError(f"unknown envelope shape {shape!r}")


def build_noise(cfg: dict) -> NoiseModel:
    noise = cfg["noise"]
    return NoiseModel(eta=float(noise.get("eta", 1.0)),
                      jitter_ns=float(noise.get("jitter_ns", 0.0)),
                      q=float(noise.get("q", 0.0)))


def build_grid_spec(cfg: dict) -> GridSpec:
    g = cfg["grid"]
    return GridSpec(x_min=float(g["x_min"]), x_max=float(g["x_max"]),
                    y_min=float(g["y_min"]), y_max=float(g["y_max"]),
                    step=float(g["step"]))
