"""Linear-optical unitaries: generic beamsplitter/phase circuits and the
phase-tunable three-mode interferometer used throughout the package.

Landscapes are invariant under per-mode input/output phases, so matrices are
compared with `gauge_distance`, which quotients out diagonal phase matrices
on both sides.  The tunable family `reference_network(phi)` is a fixed circuit
(two beamsplitters + fixed phases + tunable phase + final 50:50 splitter)
whose fixed phases were fitted offline against two anchors: the phi=0 matrix
`u_zero()` and the phi=pi/2 symmetric tritter.  The fitted parameters ship as
a packaged config file and are not recomputed at call time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

UNITARITY_TOL = 1e-12
ANCHOR_TOL = 1e-6

_SQ3 = math.sqrt(3.0)


class NetworkConfigError(ValueError):
    """Raised when a circuit/matrix description fails validation."""


@dataclass(frozen=True)
class CircuitElement:
    """One circuit element: a two-mode beamsplitter or a one-mode phase shifter.

    Beamsplitters use the symmetric convention (factor i on reflection);
    `phase` may be a float (radians) or the name of the tunable parameter.
    Modes are 1-based, matching port labels everywhere in the interfaces.
    """

    kind: str  # "beamsplitter" | "phase_shifter"
    modes: tuple[int, ...]
    reflectivity: float | None = None
    phase: float | str | None = None

    def __post_init__(self):
        if self.kind == "beamsplitter":
            if len(self.modes) != 2 or self.modes[0] == self.modes[1]:
                raise NetworkConfigError("beamsplitter needs two distinct modes")
            if self.reflectivity is None or not 0.0 < self.reflectivity < 1.0:
                raise NetworkConfigError("beamsplitter reflectivity must lie strictly in (0, 1)")
        elif self.kind == "phase_shifter":
            if len(self.modes) != 1:
                raise NetworkConfigError("phase shifter acts on exactly one mode")
            if self.phase is None:
                raise NetworkConfigError("phase shifter needs a phase value or parameter name")
        else:
            raise NetworkConfigError(f"unknown element kind {self.kind!r}")

    @staticmethod
    def beamsplitter(a: int, b: int, reflectivity: float) -> "CircuitElement":
        return CircuitElement("beamsplitter", (a, b), reflectivity=reflectivity)

    @staticmethod
    def phase_shifter(mode: int, phase: float | str) -> "CircuitElement":
        return CircuitElement("phase_shifter", (mode,), phase=phase)


def circuit_to_unitary(elements, n_modes: int, phases: dict | None = None) -> np.ndarray:
    """Multiply the elements in order (first element acts first on the input).

    `phases` supplies values for named (tunable) phase shifters.
    """
    if n_modes < 1:
        raise NetworkConfigError("n_modes must be >= 1")
    phases = phases or {}
    u = np.eye(n_modes, dtype=complex)
    for el in elements:
        for m in el.modes:
            if not 1 <= m <= n_modes:
                raise NetworkConfigError(f"mode {m} outside [1, {n_modes}]")
        if el.kind == "beamsplitter":
            a, b = el.modes[0] - 1, el.modes[1] - 1
            t = math.sqrt(1.0 - el.reflectivity)
            r = 1j * math.sqrt(el.reflectivity)
            block = np.eye(n_modes, dtype=complex)
            block[a, a] = block[b, b] = t
            block[a, b] = block[b, a] = r
        else:
            value = el.phase
            if isinstance(value, str):
                if value not in phases:
                    raise NetworkConfigError(f"no value supplied for tunable phase {value!r}")
                value = phases[value]
            block = np.eye(n_modes, dtype=complex)
            block[el.modes[0] - 1, el.modes[0] - 1] = np.exp(1j * float(value))
        u = block @ u
    return u


def tritter() -> np.ndarray:
    """Symmetric three-mode multiport, entries exp(i 2 pi d s / 3) / sqrt(3)."""
    d = np.arange(1, 4)[:, None]
    s = np.arange(1, 4)[None, :]
    return np.exp(2j * np.pi * d * s / 3.0) / _SQ3


def u_zero() -> np.ndarray:
    """The phi = 0 anchor unitary (permanent-zero three-mode network)."""
    return np.array(
        [
            [-1.0, (_SQ3 - 1) / 2, 1j * (_SQ3 + 1) / 2],
            [1j, 1j * (_SQ3 + 1) / 2, (1 - _SQ3) / 2],
            [1.0, -1.0, 1j],
        ],
        dtype=complex,
    ) / _SQ3


def unitarity_defect(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def gauge_distance(u, v) -> float:
    """Max-norm distance between u and v modulo per-mode phases on both sides.

    Diagonal phase matrices are chosen by aligning the phases of the first
    row and first column of u onto v; the residual max|D_L u D_R - v| is
    returned.  Zero (up to round-off) iff the matrices are gauge-equivalent.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"gauge_distance needs equal square shapes, got {u.shape} vs {v.shape}")
    right = np.exp(1j * (np.angle(v[0, :]) - np.angle(u[0, :])))
    w = u * right[None, :]
    left = np.exp(1j * (np.angle(v[:, 0]) - np.angle(w[:, 0])))
    w = left[:, None] * w
    return float(np.max(np.abs(w - v)))


@dataclass(frozen=True)
class NetworkFamily:
    """A circuit with one named tunable phase."""

    n_modes: int
    elements: tuple[CircuitElement, ...]
    tunable: str

    def unitary(self, phi: float) -> np.ndarray:
        u = circuit_to_unitary(self.elements, self.n_modes, {self.tunable: phi})
        defect = unitarity_defect(u)
        if defect > UNITARITY_TOL:
            raise NetworkConfigError(f"constructed matrix is not unitary (defect {defect:.2e})")
        return u


def _element_from_dict(d: dict) -> CircuitElement:
    try:
        kind = d["kind"]
        if kind == "beamsplitter":
            return CircuitElement.beamsplitter(int(d["modes"][0]), int(d["modes"][1]),
                                               float(d["reflectivity"]))
        if kind == "phase_shifter":
            phase = d["phase"]
            if not isinstance(phase, str):
                phase = float(phase)
            return CircuitElement.phase_shifter(int(d["mode"]), phase)
        raise NetworkConfigError(f"unknown element kind {kind!r}")
    except (KeyError, TypeError, IndexError) as exc:
        raise NetworkConfigError(f"malformed circuit element {d!r}: {exc}") from exc


def _element_to_dict(el: CircuitElement) -> dict:
    if el.kind == "beamsplitter":
        return {"kind": "beamsplitter", "modes": list(el.modes),
                "reflectivity": el.reflectivity}
    return {"kind": "phase_shifter", "mode": el.modes[0], "phase": el.phase}


def family_from_dict(doc: dict) -> NetworkFamily:
    try:
        n_modes = int(doc["n_modes"])
        elements = tuple(_element_from_dict(e) for e in doc["elements"])
        tunable = doc["tunable"]
    except (KeyError, TypeError) as exc:
        raise NetworkConfigError(f"malformed network config: {exc}") from exc
    return NetworkFamily(n_modes=n_modes, elements=elements, tunable=tunable)


def family_to_dict(fam: NetworkFamily) -> dict:
    return {"n_modes": fam.n_modes,
            "elements": [_element_to_dict(e) for e in fam.elements],
            "tunable": fam.tunable}


def load_family(path) -> NetworkFamily:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise NetworkConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return family_from_dict(doc)


def load_matrix(path) -> np.ndarray:
    """Read a literal complex matrix: one row per line, entries as "re,im" pairs."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            entries = []
            for token in text.split():
                parts = token.split(",")
                if len(parts) != 2:
                    raise NetworkConfigError(
                        f"{path}: line {lineno}: expected 're,im' pair, got {token!r}")
                try:
                    entries.append(complex(float(parts[0]), float(parts[1])))
                except ValueError as exc:
                    raise NetworkConfigError(f"{path}: line {lineno}: {exc}") from exc
            rows.append(entries)
    if not rows:
        raise NetworkConfigError(f"{path}: no matrix rows found")
    width = len(rows[0])
    for i, r in enumerate(rows, start=1):
        if len(r) != width:
            raise NetworkConfigError(f"{path}: line {i}: ragged row ({len(r)} != {width})")
    return np.array(rows, dtype=complex)


@lru_cache(maxsize=1)
def _default_family() -> NetworkFamily:
    with resources.files("tribeat").joinpath("data/reference_network.json").open("r") as fh:
        fam = family_from_dict(json.load(fh))
    _verify_anchors(fam)
    return fam


def _swap12(u: np.ndarray) -> np.ndarray:
    return u[[1, 0, 2], :]


def _verify_anchors(fam: NetworkFamily) -> None:
    d0 = gauge_distance(fam.unitary(0.0), u_zero())
    dt = gauge_distance(fam.unitary(np.pi / 2), tritter())
    if d0 > ANCHOR_TOL or dt > ANCHOR_TOL:
        raise NetworkConfigError(
            f"shipped network misses its anchors (phi=0: {d0:.2e}, phi=pi/2: {dt:.2e})")
    for phi in (0.0, np.pi / 4, np.pi / 2):
        ds = gauge_distance(fam.unitary(phi + np.pi), _swap12(fam.unitary(phi)))
        if ds > ANCHOR_TOL:
            raise NetworkConfigError(
                f"shipped network misses the row-swap anchor at phi={phi} ({ds:.2e})")


def reference_family() -> NetworkFamily:
    """The fitted tunable interferometer (shipped circuit parameters)."""
    return _default_family()


def reference_network(phi: float) -> np.ndarray:
    """Unitary U(phi) of the fitted interferometer family.

    Satisfies, up to per-mode phases: U(0) = u_zero(), U(pi/2) = tritter(),
    and U(phi + pi) = swap of output modes 1 and 2 applied to U(phi).
    """
    if not np.isfinite(phi):
        raise ValueError("phi must be finite")
    return _default_family().unitary(float(phi))
