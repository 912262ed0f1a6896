"""Viscous Burgers' equation on a periodic grid, quantum-state encoded.

The velocity field u is carried as u = Lambda * psi with psi a normalized
(real) state of n qubits.  One explicit-Euler step with central
differences is the matrix

    u' = [Lambda + l1 (A + A^dag - 2 I) - l2 D (A - A^dag)] psi,

where A is the cyclic shift with (A psi)_k = psi_{k+1}, D = diag(psi),
l1 = Lambda*tau*nu / (2 dx^2) and l2 = Lambda^2*tau / (2 dx).  The
variational step minimizes the negated squared projection of that target
onto the ansatz state,

    C(lambda) = -[G1 + G2 + G3]^2,

whose three brackets are exactly the quantities the Hadamard-test
circuits measure.  The signed bracket at the optimum is the next Lambda.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .hadamard import (AdderSpec, EstimatorMode, GTermKind, adder_matrix,
                       build_gterm_circuit)
from .simulator import run_statevector


@dataclass(frozen=True)
class BurgersGrid:
    n: int
    tau: float
    nu: float
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need n >= 1, got {self.n}")
        if self.b <= self.a:
            raise ValueError(f"need b > a, got [{self.a}, {self.b}]")
        if self.tau <= 0 or self.nu < 0:
            raise ValueError(f"need tau > 0 and nu >= 0, got {self.tau}, {self.nu}")

    @property
    def points(self) -> int:
        return 1 << self.n

    @property
    def delta_x(self) -> float:
        return (self.b - self.a) / self.points

    @property
    def xs(self) -> np.ndarray:
        return self.a + self.delta_x * np.arange(self.points)


@dataclass(frozen=True)
class FieldState:
    """Velocity field u = lam * psi plus the circuit that prepares psi.

    ``circuit`` is the ansatz-form preparation (ancilla wire 0); it is
    what the measurement circuits conjugate by, and may be None for
    purely classical states.
    """

    lam: float
    psi: np.ndarray
    circuit: Circuit | None = None

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=float)
        object.__setattr__(self, "psi", psi)
        norm = float(np.linalg.norm(psi))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"psi must be normalized, |psi| = {norm}")

    @property
    def velocity(self) -> np.ndarray:
        return self.lam * self.psi


@dataclass(frozen=True)
class CostCoefficients:
    l1: float
    l2: float

    @classmethod
    def for_state(cls, grid: BurgersGrid, lam: float) -> "CostCoefficients":
        dx = grid.delta_x
        return cls(l1=lam * grid.tau * grid.nu / (2 * dx * dx),
                   l2=lam * lam * grid.tau / (2 * dx))


@dataclass(frozen=True)
class GTermBundle:
    """(G1, G2, G3) at each of the three parameter bindings 0, pi, 2pi."""

    at_0: tuple[float, float, float]
    at_pi: tuple[float, float, float]
    at_2pi: tuple[float, float, float]

    @property
    def sums(self) -> tuple[float, float, float]:
        return (sum(self.at_0), sum(self.at_pi), sum(self.at_2pi))


def initial_condition_gaussian(grid: BurgersGrid, sigma: float,
                               center: float | None = None,
                               amplitude: float = 1.0) -> FieldState:
    """Unit-height Gaussian bump, centered mid-domain by default."""
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if center is None:
        center = 0.5 * (grid.a + grid.b)
    u = amplitude * np.exp(-((grid.xs - center) ** 2) / (2 * sigma * sigma))
    lam = float(np.linalg.norm(u))
    return FieldState(lam, u / lam)


def classical_step(grid: BurgersGrid, u: np.ndarray) -> np.ndarray:
    """Pointwise explicit-Euler update of the raw velocity vector."""
    u = np.asarray(u, dtype=float)
    up = np.roll(u, -1)   # u_{k+1}
    um = np.roll(u, 1)    # u_{k-1}
    dx = grid.delta_x
    diffusion = grid.tau * grid.nu * (up + um - 2 * u) / (2 * dx * dx)
    advection = grid.tau * u * (up - um) / (2 * dx)
    return u + diffusion - advection


def step_matrix(grid: BurgersGrid, state: FieldState) -> np.ndarray:
    """Dense update operator; classical_step(u) == step_matrix @ psi."""
    dim = grid.points
    ap = adder_matrix(AdderSpec(grid.n, "plus"))
    am = ap.T
    c = CostCoefficients.for_state(grid, state.lam)
    d = np.diag(state.psi)
    return (state.lam * np.eye(dim) + c.l1 * (ap + am - 2 * np.eye(dim))
            - c.l2 * d @ (ap - am))


def classical_trajectory(grid: BurgersGrid, u0: np.ndarray,
                         steps: int) -> np.ndarray:
    """Array of shape (steps + 1, N) holding u at every time slice."""
    out = np.empty((steps + 1, grid.points))
    out[0] = u0
    for k in range(steps):
        out[k + 1] = classical_step(grid, out[k])
    return out


# ---------------------------------------------------------------------------
# Cost assembly
# ---------------------------------------------------------------------------

def gterm_values(grid: BurgersGrid, prev: FieldState, u_lam: Circuit,
                 mode: EstimatorMode) -> tuple[float, float, float]:
    """(G1, G2, G3) of the cost bracket, via five Hadamard-test estimates."""
    if prev.circuit is None:
        raise ValueError("previous state carries no preparation circuit")
    u_t = prev.circuit
    c = CostCoefficients.for_state(grid, prev.lam)

    def est(kind, direction="plus"):
        circ = build_gterm_circuit(kind, u_t, u_lam, direction=direction)
        return mode.evaluate(circ)

    g1 = (prev.lam - 2 * c.l1) * est(GTermKind.OVERLAP)
    g2 = c.l1 * (est(GTermKind.SHIFT, "plus") + est(GTermKind.SHIFT, "minus"))
    g3 = c.l2 * (est(GTermKind.SHIFT_DIAG, "plus")
                 - est(GTermKind.SHIFT_DIAG, "minus"))
    return (g1, g2, g3)


def cost_bracket(grid: BurgersGrid, prev: FieldState, u_lam: Circuit,
                 mode: EstimatorMode) -> float:
    return sum(gterm_values(grid, prev, u_lam, mode))


def evaluate_cost_direct(grid: BurgersGrid, prev: FieldState, u_lam: Circuit,
                         mode: EstimatorMode | None = None) -> float:
    """C = -[G1 + G2 + G3]^2; exact mode when no estimator is given."""
    if mode is None:
        mode = EstimatorMode.exact()
    s = cost_bracket(grid, prev, u_lam, mode)
    return -s * s


def bracket_oracle(grid: BurgersGrid, prev: FieldState,
                   psi_lam: np.ndarray) -> float:
    """Dense-matrix value of the bracket: Re <psi_lam| M |psi_t>."""
    target = step_matrix(grid, prev) @ prev.psi
    return float(np.real(np.vdot(psi_lam, target)))


def infidelity(psi_opt: np.ndarray, psi_classical: np.ndarray) -> float:
    """1 - |<classical|opt>|^2, clipped to [0, 1] against rounding."""
    a = np.asarray(psi_opt).reshape(-1)
    b = np.asarray(psi_classical).reshape(-1)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    f = abs(np.vdot(b, a)) ** 2
    return float(min(1.0, max(0.0, 1.0 - f)))


def register_state(u_lam: Circuit) -> np.ndarray:
    """Real register statevector prepared by an ansatz-form circuit."""
    from .ansatz import register_circuit

    amps = run_statevector(register_circuit(u_lam)).amps
    return np.real(amps)
