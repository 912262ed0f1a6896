"""Exact statevector and density-matrix simulation.

Gates are applied with bit-masked tensor kernels (reshape to a rank-n
tensor, fix control axes at |1>, contract the target axes); no full 2^n
unitary is ever materialized.  Qubit 0 is the most significant bit of the
amplitude index, matching numpy's C-order axis layout.

Density evolution reuses the same kernels on row and column axes and
interleaves each gate's Kraus channels as supplied by a noise model.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, CircuitError, GateInstance, target_matrix

DENSITY_QUBIT_CAP = 12


@dataclass(frozen=True)
class ShotConfig:
    shots: int
    seed: int = 0

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")


@dataclass
class StateVector:
    n: int
    amps: np.ndarray

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        amps = np.zeros(1 << n, dtype=complex)
        amps[0] = 1.0
        return cls(n, amps)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


@dataclass
class DensityMatrix:
    n: int
    rho: np.ndarray

    @classmethod
    def zero(cls, n: int) -> "DensityMatrix":
        rho = np.zeros((1 << n, 1 << n), dtype=complex)
        rho[0, 0] = 1.0
        return cls(n, rho)

    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------

def _controlled_slice(tensor: np.ndarray, controls: tuple[int, ...]):
    idx = [slice(None)] * tensor.ndim
    for c in controls:
        idx[c] = 1
    return tuple(idx)


def _sub_axis(axis: int, fixed: tuple[int, ...]) -> int:
    """Axis index inside the subarray after the ``fixed`` axes are removed."""
    return axis - sum(1 for f in fixed if f < axis)


def apply_gate_tensor(tensor: np.ndarray, inst: GateInstance,
                      axis_offset: int = 0) -> np.ndarray:
    """Apply one gate to a rank-(2,...,2) tensor, in place where possible.

    ``axis_offset`` shifts qubit indices to axes (used for density column
    axes, where the conjugate matrix must be supplied by the caller).
    """
    mat = target_matrix(inst.gate, inst.params)
    return _apply_matrix_tensor(tensor, mat, inst.controls, inst.targets, axis_offset)


def _apply_single_uncontrolled(tensor, mat, axis):
    """Hot path: uncontrolled 1-qubit matrix via broadcast matmul."""
    left = 1 << axis
    right = tensor.size >> (axis + 1)
    view = tensor.reshape(left, 2, right)
    if mat[0, 1] == 0 and mat[1, 0] == 0:   # diagonal (RZ and friends)
        view *= mat.diagonal().reshape(1, 2, 1)
        return tensor
    if right >= left:
        view[:] = np.matmul(mat, view)
    else:
        # axis near the end: one big gemm beats many tiny batched ones
        moved = view.transpose(1, 0, 2).reshape(2, -1)
        view[:] = np.matmul(mat, moved).reshape(2, left, right).transpose(1, 0, 2)
    return tensor


_PAIR_SWAP = np.array([0, 2, 1, 3])


def _apply_pair_adjacent(tensor, mat, lo):
    """Uncontrolled 2-qubit matrix on adjacent axes (lo, lo + 1)."""
    left = 1 << lo
    right = tensor.size >> (lo + 2)
    view = tensor.reshape(left, 4, right)
    if right >= left:
        view[:] = np.matmul(mat, view)
    else:
        moved = view.transpose(1, 0, 2).reshape(4, -1)
        view[:] = np.matmul(mat, moved).reshape(4, left, right).transpose(1, 0, 2)
    return tensor


def _apply_matrix_tensor(tensor, mat, controls, targets, axis_offset=0):
    if not controls and len(targets) == 1:
        return _apply_single_uncontrolled(tensor, mat, targets[0] + axis_offset)
    if (not controls and len(targets) == 2 and tensor.flags.c_contiguous
            and abs(targets[0] - targets[1]) == 1):
        a = targets[0] + axis_offset
        b = targets[1] + axis_offset
        if b == a + 1:
            return _apply_pair_adjacent(tensor, mat, a)
        swapped = mat[np.ix_(_PAIR_SWAP, _PAIR_SWAP)]
        return _apply_pair_adjacent(tensor, swapped, b)
    controls = tuple(c + axis_offset for c in controls)
    targets = tuple(t + axis_offset for t in targets)
    idx = _controlled_slice(tensor, controls)
    sub = tensor[idx]
    axes = [_sub_axis(t, controls) for t in targets]
    if len(targets) == 1:
        out = np.tensordot(mat, sub, axes=([1], [axes[0]]))
        out = np.moveaxis(out, 0, axes[0])
    else:
        moved = np.moveaxis(sub, axes, (0, 1))
        shape = moved.shape
        flat = moved.reshape(4, -1)
        flat = mat @ flat
        out = np.moveaxis(flat.reshape(shape), (0, 1), axes)
    tensor[idx] = out
    return tensor


def run_statevector(c: Circuit, init: np.ndarray | None = None) -> StateVector:
    """State of applying the gate list in order to |0...0> (or ``init``)."""
    n = c.width
    if init is None:
        amps = np.zeros(1 << n, dtype=complex)
        amps[0] = 1.0
    else:
        amps = np.asarray(init, dtype=complex).copy()
        if amps.shape != (1 << n,):
            raise CircuitError(f"init has dimension {amps.shape}, expected {1 << n}")
    tensor = amps.reshape([2] * n)
    for inst in c.gates:
        tensor = apply_gate_tensor(tensor, inst)
    return StateVector(n, tensor.reshape(-1))


def ancilla_expectation_z(s: StateVector, ancilla: int) -> float:
    """<sigma_z> on one qubit: sum over bitstrings of (-1)^bit |amp|^2."""
    if not 0 <= ancilla < s.n:
        raise CircuitError(f"ancilla {ancilla} out of range for {s.n} qubits")
    probs = np.abs(s.amps.reshape([2] * s.n)) ** 2
    other = tuple(i for i in range(s.n) if i != ancilla)
    p = probs.sum(axis=other)
    return float(p[0] - p[1])


def sample_expectation_z(s: StateVector, ancilla: int, cfg: ShotConfig) -> float:
    """Binomial shot estimate of <sigma_z>, deterministic per seed."""
    return sample_from_expectation(ancilla_expectation_z(s, ancilla), cfg)


def sample_from_expectation(exact_z: float, cfg: ShotConfig,
                            rng: np.random.Generator | None = None) -> float:
    p0 = min(1.0, max(0.0, (1.0 + exact_z) / 2.0))
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    n0 = rng.binomial(cfg.shots, p0)
    return (2 * n0 - cfg.shots) / cfg.shots


# ---------------------------------------------------------------------------
# Density path
# ---------------------------------------------------------------------------

def run_density(c: Circuit, noise=None) -> DensityMatrix:
    """rho after interleaving each gate's unitary with its noise channels.

    ``noise`` follows the NoiseModel protocol (``channels_for(inst)``
    returning channel objects with ``apply(tensor, n)``); ``None`` or an
    empty model gives the pure-state projector.
    """
    n = c.width
    if n > DENSITY_QUBIT_CAP:
        raise CircuitError(
            f"density simulation capped at {DENSITY_QUBIT_CAP} qubits, got {n}")
    from .noise import DepolarizingChannel

    rho = np.zeros((1 << n, 1 << n), dtype=complex)
    rho[0, 0] = 1.0
    tensor = rho.reshape([2] * (2 * n))

    # Runs of uncontrolled 1-qubit gates are fused into one matrix per
    # qubit before application.  A 1-qubit depolarizing channel commutes
    # exactly with any later 1-qubit unitary on the same qubit, so the
    # run's channels collapse into a single channel whose survival factor
    # is the product of the individual ones.
    pending: dict[int, list] = {}

    def flush(q):
        nonlocal tensor
        entry = pending.pop(q, None)
        if entry is None:
            return
        mat, survival = entry
        tensor = _apply_matrix_tensor(tensor, mat, (), (q,), 0)
        tensor = _apply_matrix_tensor(tensor, mat.conj(), (), (q,), n)
        if survival < 1.0:
            tensor = DepolarizingChannel((q,), 1.0 - survival).apply(tensor, n)

    for inst in c.gates:
        mat = target_matrix(inst.gate, inst.params)
        channels = noise.channels_for(inst) if noise is not None else []
        if not inst.controls and len(inst.targets) == 1:
            survival = None
            if not channels:
                survival = 1.0
            elif (len(channels) == 1
                  and isinstance(channels[0], DepolarizingChannel)
                  and channels[0].qubits == tuple(inst.targets)):
                survival = 1.0 - channels[0].p
            if survival is not None:
                q = inst.targets[0]
                entry = pending.get(q)
                if entry is None:
                    pending[q] = [mat, survival]
                else:
                    entry[0] = mat @ entry[0]
                    entry[1] *= survival
                continue
        for q in (*inst.controls, *inst.targets):
            flush(q)
        tensor = _apply_matrix_tensor(tensor, mat, inst.controls, inst.targets, 0)
        tensor = _apply_matrix_tensor(tensor, mat.conj(), inst.controls,
                                      inst.targets, n)
        for channel in channels:
            tensor = channel.apply(tensor, n)
    for q in sorted(pending):
        flush(q)
    return DensityMatrix(n, tensor.reshape(1 << n, 1 << n))


def density_expectation_z(d: DensityMatrix, ancilla: int) -> float:
    probs = np.real(np.diagonal(d.rho)).reshape([2] * d.n)
    other = tuple(i for i in range(d.n) if i != ancilla)
    p = probs.sum(axis=other)
    return float(p[0] - p[1])
