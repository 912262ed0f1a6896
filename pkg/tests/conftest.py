"""Shared helpers: random circuit generation and an independent dense oracle.

The dense embedding here walks basis indices explicitly instead of using
the simulator's tensor kernel, so matches between the two are genuine
cross-checks rather than the same code talking to itself.
"""
import numpy as np
import pytest

from lowdepthqc.circuit import Circuit, Gate, GateInstance, gate_unitary

RANDOM_GATES = (Gate.H, Gate.X, Gate.SX, Gate.S_DAG, Gate.RX, Gate.RY,
                Gate.RZ, Gate.R, Gate.RXX, Gate.RZZ, Gate.CNOT, Gate.ECR,
                Gate.CZ, Gate.SWAP, Gate.MCX, Gate.CRY, Gate.CU_ALT)


def embed_gate(inst: GateInstance, width: int) -> np.ndarray:
    """Dense (2^width, 2^width) matrix of one gate, by index bookkeeping.

    Qubit 0 is the most significant bit of the basis index, matching the
    text format and the simulator's axis ordering.
    """
    qs = inst.controls + inst.targets
    m = gate_unitary(inst)
    k = len(qs)
    dim = 1 << width
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (width - 1 - q)) & 1 for q in range(width)]
        sub_col = 0
        for q in qs:
            sub_col = (sub_col << 1) | bits[q]
        for sub_row in range(1 << k):
            row_bits = list(bits)
            for a, q in enumerate(qs):
                row_bits[q] = (sub_row >> (k - 1 - a)) & 1
            row = 0
            for b in row_bits:
                row = (row << 1) | b
            full[row, col] += m[sub_row, sub_col]
    return full


def dense_unitary(c: Circuit) -> np.ndarray:
    u = np.eye(1 << c.width, dtype=complex)
    for inst in c.gates:
        u = embed_gate(inst, c.width) @ u
    return u


def random_instance(rng: np.random.Generator, width: int,
                    gates=RANDOM_GATES) -> GateInstance:
    while True:
        gate = gates[rng.integers(len(gates))]
        need = gate.n_targets + gate.base_controls
        extra = 0
        if gate is Gate.MCX and width >= 3:
            extra = int(rng.integers(0, width - 2))
        if need + extra > width:
            continue
        qs = rng.choice(width, size=need + extra, replace=False)
        controls = tuple(int(q) for q in qs[:gate.base_controls + extra])
        targets = tuple(int(q) for q in qs[gate.base_controls + extra:])
        params = tuple(rng.uniform(-np.pi, np.pi, gate.n_params))
        return GateInstance(gate, controls, targets, params)


def random_circuit(rng: np.random.Generator, width: int,
                   length: int, gates=RANDOM_GATES) -> Circuit:
    return Circuit(width, tuple(random_instance(rng, width, gates)
                                for _ in range(length)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
