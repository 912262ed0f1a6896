"""Builders and estimators for the overlap / shift / shift-diagonal tests.

Each circuit estimates Re<0| U_t^dag M U_lam |0> on the ancilla for
M in {I, A, A^dag, A D_t^dag, A^dag D_t^dag}, where A is the cyclic
basis-shift (decrement) permutation and D_t = diag(amplitudes of U_t|0>).

Construction is mechanical: lay out the body (U_lam, optional copy
network + second-register inverse evolution, adder, first-register
inverse evolution), give *every* body gate an ancilla control, then run
the elision pass so only the gates with no register control keep it.
The diagonal operator needs no explicit gate: copying the basis index
into a second register and uncomputing it with the inverse evolution
projects in exactly the right way.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .circuit import Circuit, Gate, GateInstance, dagger
from .elision import elide_body
from .simulator import (ShotConfig, ancilla_expectation_z, density_expectation_z,
                        run_density, run_statevector, sample_from_expectation)


class GTermKind(Enum):
    OVERLAP = "overlap"
    SHIFT = "shift"
    SHIFT_DIAG = "shift_diag"


@dataclass(frozen=True)
class AdderSpec:
    n: int
    direction: str = "plus"  # "plus" = A (decrement), "minus" = A^dag

    def __post_init__(self):
        if self.direction not in ("plus", "minus"):
            raise ValueError(f"direction must be 'plus' or 'minus', got {self.direction}")

    @property
    def work_qubits(self) -> int:
        return max(self.n - 2, 0)


def adder_matrix(spec: AdderSpec) -> np.ndarray:
    """Permutation with A|k> = |(k-1) mod 2^n>, so (A u)_k = u_{k+1}."""
    dim = 1 << spec.n
    mat = np.roll(np.eye(dim), -1, axis=0)
    return mat.T if spec.direction == "minus" else mat


def adder_gates(spec: AdderSpec, qubits: list[int]) -> list[GateInstance]:
    """MCX staircase for the shift on ``qubits`` (most significant first).

    The staircase borrows clean work qubits only at decomposition time;
    in the IR the multi-controlled gates act on the register directly.
    """
    if len(qubits) != spec.n:
        raise ValueError(f"expected {spec.n} qubits, got {len(qubits)}")
    lsb_first = list(reversed(qubits))
    gates = [GateInstance(Gate.X, (), (lsb_first[0],))]
    for j in range(1, spec.n):
        controls = tuple(lsb_first[:j])
        kind = Gate.CNOT if j == 1 else Gate.MCX
        gates.append(GateInstance(kind, controls, (lsb_first[j],)))
    if spec.direction == "minus":
        gates.reverse()  # every staircase gate is self-inverse
    return gates


# ---------------------------------------------------------------------------
# Circuit assembly
# ---------------------------------------------------------------------------

def _wrap_with_ancilla(inst: GateInstance, ancilla: int) -> GateInstance:
    if ancilla in inst.controls:
        return inst
    controls = (ancilla,) + inst.controls
    gate = inst.gate
    if gate is Gate.X:
        gate = Gate.CNOT if len(controls) == 1 else Gate.MCX
    elif gate is Gate.CNOT:
        gate = Gate.MCX
    elif gate is Gate.RY:
        gate = Gate.CRY
    elif gate not in (Gate.MCX, Gate.CRY, Gate.CU_ALT):
        raise ValueError(f"no controlled form for body gate {gate.value}")
    return GateInstance(gate, controls, inst.targets, inst.params)


def _embedded_body(full_ansatz: Circuit, register_map: dict[int, int]) -> list[GateInstance]:
    """Re-index an ansatz circuit (ancilla 0, register 1..n) into a wider circuit."""
    mapping = {0: 0, **register_map}
    return [g.remapped(mapping) for g in full_ansatz.gates]


def build_gterm_circuit(kind: GTermKind, u_t: Circuit, u_lam: Circuit,
                        direction: str = "plus", imaginary: bool = False,
                        elide: bool = True) -> Circuit:
    """Hadamard-form circuit whose ancilla <sigma_z> is the requested term.

    ``u_t`` and ``u_lam`` are ansatz-form circuits (ancilla at wire 0,
    register at 1..n).  ``elide=False`` keeps every body gate
    ancilla-controlled, for the elision-safety comparisons.
    """
    if u_t.width != u_lam.width:
        raise ValueError(f"width mismatch: {u_t.width} vs {u_lam.width}")
    n = u_t.width - 1
    work = max(n - 2, 0)
    reg1 = {q: q for q in range(1, n + 1)}
    if kind is GTermKind.OVERLAP:
        width = 1 + n
    elif kind is GTermKind.SHIFT:
        width = 1 + n + work
    elif kind is GTermKind.SHIFT_DIAG:
        width = 1 + 2 * n + work
        reg2 = {q: n + work + q for q in range(1, n + 1)}
    else:
        raise ValueError(f"unknown kind {kind}")

    body: list[GateInstance] = []
    body += _embedded_body(u_lam, reg1)
    if kind is GTermKind.SHIFT_DIAG:
        for q in range(1, n + 1):
            body.append(GateInstance(Gate.CNOT, (q,), (reg2[q],)))
        body += _embedded_body(dagger(u_t), reg2)
    if kind in (GTermKind.SHIFT, GTermKind.SHIFT_DIAG):
        body += adder_gates(AdderSpec(n, direction), [reg1[q] for q in range(1, n + 1)])
    body += _embedded_body(dagger(u_t), reg1)

    gates = [GateInstance(Gate.H, (), (0,))]
    gates += [_wrap_with_ancilla(g, 0) for g in body]
    if imaginary:
        gates.append(GateInstance(Gate.S_DAG, (), (0,)))
    gates.append(GateInstance(Gate.H, (), (0,)))

    meta = {"work_qubits": list(range(n + 1, n + 1 + work)),
            "gterm_kind": kind.value, "direction": direction}
    circ = Circuit(width, tuple(gates), ancilla=0, metadata=meta)
    if elide:
        circ = elide_body(circ, 0)
    return circ


# ---------------------------------------------------------------------------
# Dense oracle
# ---------------------------------------------------------------------------

def gterm_oracle(kind: GTermKind, u_t: Circuit, u_lam: Circuit,
                 direction: str = "plus", imaginary: bool = False) -> float:
    """Dense-matrix value of the same bracket, via register statevectors."""
    from .ansatz import register_circuit

    psi_t = run_statevector(register_circuit(u_t)).amps
    psi_lam = run_statevector(register_circuit(u_lam)).amps
    n = u_t.width - 1
    if kind is GTermKind.OVERLAP:
        m = np.eye(1 << n)
    else:
        m = adder_matrix(AdderSpec(n, direction))
        if kind is GTermKind.SHIFT_DIAG:
            m = m @ np.diag(psi_t.conj())
    val = np.vdot(psi_t, m @ psi_lam)
    return float(val.imag) if imaginary else float(val.real)


# ---------------------------------------------------------------------------
# Estimation modes
# ---------------------------------------------------------------------------

@dataclass
class EstimatorMode:
    """How a Hadamard-test expectation is turned into a number.

    ``rng`` is advanced by every sampled estimate, so a driver seeding it
    once gets a reproducible stream across a whole optimization run.
    """

    shots: int | None = None
    noise: object | None = None          # NoiseModel, when noisy
    basis: object | None = None          # BasisTarget the noisy path transpiles to
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))

    @classmethod
    def exact(cls) -> "EstimatorMode":
        return cls()

    @classmethod
    def sampled(cls, shots: int, seed: int = 0) -> "EstimatorMode":
        return cls(shots=shots, rng=np.random.default_rng(seed))

    @classmethod
    def noisy(cls, noise, basis, shots: int | None = None, seed: int = 0) -> "EstimatorMode":
        return cls(shots=shots, noise=noise, basis=basis,
                   rng=np.random.default_rng(seed))

    def evaluate(self, circuit: Circuit) -> float:
        if self.noise is None:
            z = ancilla_expectation_z(run_statevector(circuit), circuit.ancilla)
        else:
            z = noisy_expectation(circuit, self.noise, self.basis)
        if self.shots is not None:
            z = sample_from_expectation(z, ShotConfig(self.shots), rng=self.rng)
        return z


def noisy_expectation(circuit: Circuit, noise, basis) -> float:
    """Transpile to the native basis, evolve the density matrix with the
    model's channels, and fold the ancilla readout confusion in analytically."""
    from .transpile import decompose

    native = decompose(circuit, basis)
    positions = native.metadata.get("final_positions")
    anc = positions[circuit.ancilla] if positions else circuit.ancilla
    rho = run_density(native, noise=noise)
    z = density_expectation_z(rho, anc)
    p01, p10 = noise.readout_probs(anc)
    p0 = (1.0 + z) / 2.0
    p0 = (1.0 - p10) * p0 + p01 * (1.0 - p0)
    return 2.0 * p0 - 1.0


def estimate_gterm(kind: GTermKind, u_t: Circuit, u_lam: Circuit,
                   mode: EstimatorMode, direction: str = "plus",
                   imaginary: bool = False) -> float:
    circ = build_gterm_circuit(kind, u_t, u_lam, direction=direction,
                               imaginary=imaginary)
    return mode.evaluate(circ)
