"""Device noise models built from published calibration snapshots.

The default recipe converts each reported gate error into a single
depolarizing channel via the average-gate-fidelity relation
p = (1 - F) * d / (d - 1) with d = 2 (one qubit) or 4 (two qubits);
the thermal recipe adds amplitude damping and pure dephasing from
(T1, T2, duration).  Channels attach to post-transpilation native
gates, so a scheme that needs fewer native gates accumulates less
noise; RZ is a frame change and carries none.

Readout error is a per-qubit classical confusion matrix
[[1-P10, P01], [P10, 1-P01]] applied analytically to the measured
ancilla probabilities.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .circuit import Gate, GateInstance


class MissingPairError(Exception):
    """No two-qubit error entry covers a coupling the circuit uses."""


@dataclass(frozen=True)
class QubitCalibration:
    t1: float          # microseconds
    t2: float
    p01: float         # probability of reading 0 given prepared 1
    p10: float
    err_1q: float      # average 1q gate error


@dataclass(frozen=True)
class DeviceCalibration:
    name: str
    qubits: tuple[QubitCalibration, ...]
    pair_errors: dict = field(default_factory=dict)
    all_to_all: bool = False
    default_2q_error: float | None = None
    extra_pair_errors: dict = field(default_factory=dict)  # alternate 2q gate

    def __post_init__(self):
        for q in self.qubits:
            for p in (q.p01, q.p10):
                if not 0.0 <= p <= 1.0:
                    raise ValueError(f"readout probability out of range: {p}")

    def qubit(self, q: int) -> QubitCalibration:
        if not 0 <= q < len(self.qubits):
            raise MissingPairError(f"{self.name} has no calibration for qubit {q}")
        return self.qubits[q]

    def two_qubit_error(self, a: int, b: int) -> float:
        for key in ((a, b), (b, a)):
            if key in self.pair_errors:
                return self.pair_errors[key]
        if self.default_2q_error is not None:
            return self.default_2q_error
        raise MissingPairError(f"{self.name} has no 2q error for pair ({a}, {b})")

    def t2_flags(self) -> list[int]:
        """Qubits whose reported T2 exceeds the physical 2*T1 bound."""
        return [i for i, q in enumerate(self.qubits) if q.t2 > 2 * q.t1]

    def scaled(self, alpha: float) -> "DeviceCalibration":
        """All gate errors multiplied by alpha (readout untouched)."""
        qubits = tuple(replace(q, err_1q=min(1.0, q.err_1q * alpha))
                       for q in self.qubits)
        pairs = {k: min(1.0, v * alpha) for k, v in self.pair_errors.items()}
        d2 = None if self.default_2q_error is None else min(
            1.0, self.default_2q_error * alpha)
        return replace(self, qubits=qubits, pair_errors=pairs, default_2q_error=d2)


# ---------------------------------------------------------------------------
# Channels
# ---------------------------------------------------------------------------

class DepolarizingChannel:
    """rho -> (1-p) rho + p * Tr_q(rho) (x) I/2^k over the touched qubits."""

    def __init__(self, qubits: tuple[int, ...], p: float):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"depolarizing p out of range: {p}")
        self.qubits = tuple(qubits)
        self.p = p

    def apply(self, tensor: np.ndarray, n: int) -> np.ndarray:
        if self.p == 0.0:
            return tensor
        if len(self.qubits) == 1 and tensor.flags.c_contiguous:
            # in-place fast path: mix the qubit's 2x2 block toward I/2
            q = self.qubits[0]
            left = 1 << q
            mid = 1 << (n - 1)
            right = 1 << (n - q - 1)
            v = tensor.reshape(left, 2, mid, 2, right)
            s = (0.5 * self.p) * (v[:, 0, :, 0, :] + v[:, 1, :, 1, :])
            v *= 1.0 - self.p
            v[:, 0, :, 0, :] += s
            v[:, 1, :, 1, :] += s
            return tensor
        traced = tensor
        for q in sorted(self.qubits, reverse=True):
            traced = np.trace(traced, axis1=q, axis2=n + q - ( # column axes shift
                sum(1 for r in self.qubits if r > q)))
        # rebuild: identity insertion on the traced-out axes
        out = (1.0 - self.p) * tensor
        k = len(self.qubits)
        weight = self.p / (1 << k)
        idx_base = [slice(None)] * tensor.ndim
        for bits in range(1 << k):
            idx = list(idx_base)
            for j, q in enumerate(sorted(self.qubits)):
                b = (bits >> j) & 1
                idx[q] = b
                idx[n + q] = b
            out[tuple(idx)] += weight * traced
        return out

    def kraus(self) -> list[np.ndarray]:
        """Explicit Kraus family (for trace-preservation checks)."""
        paulis = [np.eye(2, dtype=complex),
                  np.array([[0, 1], [1, 0]], dtype=complex),
                  np.array([[0, -1j], [1j, 0]]),
                  np.diag([1, -1]).astype(complex)]
        k = len(self.qubits)
        dim = 1 << k
        ops = []
        for combo in range(4 ** k):
            m = np.eye(1, dtype=complex)
            c = combo
            for _ in range(k):
                m = np.kron(m, paulis[c % 4])
                c //= 4
            coeff = math.sqrt(1 - self.p + self.p / (dim * dim)) \
                if combo == 0 else math.sqrt(self.p) / dim
            ops.append(coeff * m)
        return ops


class KrausChannel:
    """Generic channel from an explicit operator list on one qubit."""

    def __init__(self, qubit: int, operators: list[np.ndarray]):
        self.qubit = qubit
        self.operators = [np.asarray(k, dtype=complex) for k in operators]
        total = sum(k.conj().T @ k for k in self.operators)
        if not np.allclose(total, np.eye(2), atol=1e-12):
            raise ValueError("Kraus operators are not trace preserving")

    def apply(self, tensor: np.ndarray, n: int) -> np.ndarray:
        q = self.qubit
        out = np.zeros_like(tensor)
        for k in self.operators:
            t = np.moveaxis(np.tensordot(k, tensor, axes=([1], [q])), 0, q)
            t = np.moveaxis(np.tensordot(k.conj(), t, axes=([1], [n + q])), 0, n + q)
            out += t
        return out

    def kraus(self) -> list[np.ndarray]:
        return list(self.operators)


def amplitude_damping(qubit: int, gamma: float) -> KrausChannel:
    k0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]])
    k1 = np.array([[0, math.sqrt(gamma)], [0, 0]])
    return KrausChannel(qubit, [k0, k1])


def dephasing(qubit: int, p: float) -> KrausChannel:
    k0 = math.sqrt(1 - p) * np.eye(2)
    k1 = math.sqrt(p) * np.diag([1.0, -1.0])
    return KrausChannel(qubit, [k0, k1])


# ---------------------------------------------------------------------------
# Model assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GateDurations:
    """Seconds; only the thermal recipe reads these."""

    sc_1q: float = 60e-9
    sc_2q: float = 660e-9
    ion_1q: float = 15e-6
    ion_2q: float = 200e-6


_NOISELESS = (Gate.RZ,)
_ONE_QUBIT_NATIVE = (Gate.X, Gate.SX, Gate.R)
_TWO_QUBIT_NATIVE = (Gate.ECR, Gate.RXX, Gate.RZZ, Gate.CZ)


class NoiseModel:
    def __init__(self, cal: DeviceCalibration, recipe: str = "depol_only",
                 durations: GateDurations | None = None):
        if recipe not in ("depol_only", "depol_plus_thermal"):
            raise ValueError(f"unknown recipe {recipe!r}")
        self.cal = cal
        self.recipe = recipe
        self.durations = durations or GateDurations()

    def channels_for(self, inst: GateInstance) -> list:
        g = inst.gate
        if g in _NOISELESS:
            return []
        channels: list = []
        if g in _ONE_QUBIT_NATIVE and not inst.controls:
            q = inst.targets[0]
            err = self.cal.qubit(q).err_1q
            p = err * 2.0  # (1-F) d/(d-1), d=2
            channels.append(DepolarizingChannel((q,), min(1.0, p)))
            if self.recipe == "depol_plus_thermal":
                dur = self.durations.ion_1q if g is Gate.R else self.durations.sc_1q
                channels += self._thermal((q,), dur)
        elif g in _TWO_QUBIT_NATIVE and not inst.controls:
            a, b = inst.targets
            err = self.cal.two_qubit_error(a, b)
            p = err * 4.0 / 3.0  # d=4
            channels.append(DepolarizingChannel((a, b), min(1.0, p)))
            if self.recipe == "depol_plus_thermal":
                dur = (self.durations.ion_2q if g is Gate.RXX
                       else self.durations.sc_2q)
                channels += self._thermal((a, b), dur)
        else:
            raise ValueError(
                f"noise model only attaches to native gates, got {g.value}")
        return channels

    def _thermal(self, qubits: tuple[int, ...], duration: float) -> list:
        out = []
        for q in qubits:
            c = self.cal.qubit(q)
            t1 = c.t1 * 1e-6
            t2 = min(c.t2 * 1e-6, 2 * t1)
            gamma = 1.0 - math.exp(-duration / t1)
            out.append(amplitude_damping(q, gamma))
            rate_phi = max(0.0, 1.0 / t2 - 0.5 / t1)
            p_z = 0.5 * (1.0 - math.exp(-duration * rate_phi))
            if p_z > 0:
                out.append(dephasing(q, p_z))
        return out

    def readout_probs(self, q: int) -> tuple[float, float]:
        c = self.cal.qubit(q)
        return (c.p01, c.p10)

    def confusion_matrix(self, q: int) -> np.ndarray:
        p01, p10 = self.readout_probs(q)
        return np.array([[1 - p10, p01], [p10, 1 - p01]])


def model_from_calibration(cal: DeviceCalibration, recipe: str = "depol_only",
                           durations: GateDurations | None = None) -> NoiseModel:
    return NoiseModel(cal, recipe, durations)


# ---------------------------------------------------------------------------
# Built-in profiles
# ---------------------------------------------------------------------------

def _q(t1, t2, p01_pct, p10_pct, err1q_e4) -> QubitCalibration:
    return QubitCalibration(t1, t2, p01_pct / 100.0, p10_pct / 100.0,
                            err1q_e4 * 1e-4)


def builtin_profiles() -> dict[str, DeviceCalibration]:
    brisbane = DeviceCalibration(
        name="ibm-brisbane",
        qubits=(
            _q(230.13, 47.19, 1.07, 7.03, 1.98),
            _q(277.15, 216.71, 1.46, 1.95, 1.24),
            _q(187.00, 70.44, 1.27, 0.58, 2.06),
            _q(289.31, 316.62, 1.75, 3.71, 12.90),
            _q(327.73, 285.37, 1.22, 1.56, 1.90),
            _q(252.21, 216.01, 1.56, 2.00, 2.02),
            _q(286.37, 100.14, 0.78, 1.46, 1.37),
            _q(375.57, 319.88, 0.83, 0.92, 2.08),
        ),
        pair_errors={(4, 5): 4.30e-3, (1, 0): 3.57e-3, (2, 1): 4.39e-3,
                     (3, 2): 13.37e-3, (4, 3): 25.76e-3, (6, 7): 4.44e-3,
                     (6, 5): 5.89e-3, (7, 8): 3.21e-3},
    )
    sherbrook = DeviceCalibration(
        name="ibm-sherbrook",
        qubits=(
            _q(512.8, 304.55, 0.73, 0.92, 4.22),
            _q(281.82, 324.96, 10.54, 11.67, 12.8),
            _q(224.95, 194.79, 14.74, 15.82, 2.31),
            _q(178.94, 214.92, 3.36, 3.17, 2.04),
            _q(269.13, 500.95, 3.76, 2.05, 1.44),
            _q(296.69, 303.84, 3.22, 4.39, 1.96),
            _q(124.46, 123.99, 13.28, 8.88, 41.9),
            _q(282.8, 162.34, 10.54, 9.66, 2.88),
        ),
        pair_errors={(1, 0): 14.91e-3, (1, 2): 6.13e-3, (3, 2): 4.63e-3,
                     (4, 3): 4.79e-3, (5, 4): 3.88e-3, (6, 5): 71.81e-3,
                     (7, 6): 100.96e-3},
    )
    # The CZ column doubles as the generic entangler error; the RZZ
    # figures are kept alongside for completeness.
    kingston_cz = {(0, 1): 2.08e-3, (1, 2): 2.42e-3, (2, 3): 2.52e-3,
                   (3, 4): 2.13e-3, (4, 5): 1.48e-3, (5, 6): 1.46e-3,
                   (6, 7): 6.98e-3}
    kingston_rzz = {(0, 1): 2.09e-3, (1, 2): 3.62e-3, (2, 3): 4.07e-3,
                    (3, 4): 1.88e-3, (4, 5): 2.60e-3, (5, 6): 3.45e-3,
                    (6, 7): 8.57e-3}
    kingston = DeviceCalibration(
        name="ibm-kingston",
        qubits=(
            _q(381.83, 410.94, 2.19, 4.88, 2.93),
            _q(318.63, 502.68, 0.83, 0.73, 2.77),
            _q(303.25, 116.85, 0.43, 0.58, 1.07),
            _q(363.83, 469.64, 0.97, 0.58, 3.92),
            _q(210.52, 85.45, 1.12, 1.90, 1.77),
            _q(406.03, 248.17, 0.73, 0.34, 1.14),
            _q(227.77, 117.05, 0.92, 0.83, 3.58),
            _q(351.20, 194.05, 3.32, 2.34, 2.70),
        ),
        pair_errors=kingston_cz,
        extra_pair_errors=kingston_rzz,
    )
    ibex = DeviceCalibration(
        name="aqt-ibex",
        qubits=tuple(QubitCalibration(1e7, 1e6, 0.0, 0.0, 3e-4)
                     for _ in range(12)),
        all_to_all=True,
        default_2q_error=1.3e-2,
    )
    return {c.name: c for c in (brisbane, sherbrook, kingston, ibex)}


def load_calibration_csv(path: str, name: str | None = None,
                         all_to_all: bool = False) -> DeviceCalibration:
    """Table-shaped CSV: one row per qubit with columns qubit, t1, t2,
    p01, p10, err_1q, and optional pair_a, pair_b, err_2q columns adding
    one coupling per row."""
    qubits: dict[int, QubitCalibration] = {}
    pairs: dict[tuple[int, int], float] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            q = int(row["qubit"])
            qubits[q] = QubitCalibration(
                float(row["t1"]), float(row["t2"]),
                float(row["p01"]), float(row["p10"]), float(row["err_1q"]))
            if row.get("pair_a") not in (None, ""):
                pairs[(int(row["pair_a"]), int(row["pair_b"]))] = float(row["err_2q"])
    ordered = tuple(qubits[i] for i in sorted(qubits))
    return DeviceCalibration(name or path, ordered, pairs, all_to_all=all_to_all)
