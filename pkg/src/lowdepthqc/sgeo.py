"""Sequential grid-based explicit optimization (coordinate descent).

Every gate carrying a parameter here (RY, controlled-RY and the
single-CNOT controlled block) has matrix entries affine in
{1, cos(lambda/2), sin(lambda/2)}, so the cost bracket along any single
parameter is exactly determined by its values at the three bindings
{0, pi, 2pi}:

    S(lambda) = c0(lambda) S(0) + cpi(lambda) S(pi) + c2pi(lambda) S(2pi)

with c0 = (1 + cos(l/2) - sin(l/2))/2, cpi = sin(l/2) and
c2pi = (1 - cos(l/2) - sin(l/2))/2.  Nine circuit estimates per
parameter therefore buy the whole 1-D cost slice in closed form; the
argmin over a dense angle grid (plus a free analytic refinement) costs
no further quantum evaluations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ansatz import AnsatzSpec, ansatz_state, bind_parameter, build_ansatz
from .burgers import (BurgersGrid, FieldState, GTermBundle, gterm_values,
                      infidelity)
from .hadamard import EstimatorMode

_BINDINGS = (0.0, math.pi, 2 * math.pi)


def reconstruction_coeffs(lam: float) -> tuple[float, float, float]:
    c = math.cos(lam / 2)
    s = math.sin(lam / 2)
    return (0.5 * (1 + c - s), s, 0.5 * (1 - c - s))


def reconstruct_bracket(bundle: GTermBundle, lam: float) -> float:
    s0, spi, s2pi = bundle.sums
    c0, cpi, c2pi = reconstruction_coeffs(lam)
    return c0 * s0 + cpi * spi + c2pi * s2pi


def reconstruct_cost(bundle: GTermBundle, lam: float) -> float:
    s = reconstruct_bracket(bundle, lam)
    return -s * s


@dataclass(frozen=True)
class SweepConfig:
    grid_points: int = 64
    sweeps: int = 10
    tol: float = 1e-8
    mode: EstimatorMode = field(default_factory=EstimatorMode.exact)

    def __post_init__(self):
        if self.grid_points < 8:
            raise ValueError(f"need grid_points >= 8, got {self.grid_points}")
        if self.sweeps < 1:
            raise ValueError(f"need sweeps >= 1, got {self.sweeps}")


@dataclass(frozen=True)
class TraceEntry:
    sweep: int
    param_index: int
    value: float
    cost: float


@dataclass(frozen=True)
class OptimizeResult:
    params: tuple[float, ...]
    cost: float
    bracket: float
    trace: tuple[TraceEntry, ...]


def _grid_angles(points: int) -> np.ndarray:
    return np.linspace(-math.pi, math.pi, points, endpoint=False)


def _refine_argmin(sums: tuple[float, float, float], angles: np.ndarray) -> tuple[float, float]:
    """Grid argmin of -S(lambda)^2, then golden-section inside the best cell.

    Works purely on the closed-form reconstruction, so refinement is free.
    """
    s0, spi, s2pi = sums

    def cost(lam: float) -> float:
        c0, cpi, c2pi = reconstruction_coeffs(lam)
        s = c0 * s0 + cpi * spi + c2pi * s2pi
        return -s * s

    values = np.array([cost(a) for a in angles])
    k = int(np.argmin(values))
    step = angles[1] - angles[0]
    lo, hi = angles[k] - step, angles[k] + step
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = cost(x1), cost(x2)
    for _ in range(40):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = cost(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = cost(x2)
    best = x1 if f1 <= f2 else x2
    return float(best), float(cost(best))


def _best_of_last(entries: list[tuple[tuple[float, ...], float, float]],
                  window: int = 5):
    """The retained iterate is the best of the last few coordinate updates,
    a guard against a shot-noise stumble on the final coordinate."""
    tail = entries[-window:]
    return min(tail, key=lambda e: e[1])


def optimize_step(grid: BurgersGrid, prev: FieldState, spec: AnsatzSpec,
                  lam_init, cfg: SweepConfig) -> OptimizeResult:
    """One variational time step: coordinate descent over all parameters."""
    params = tuple(float(v) for v in lam_init)
    if len(params) != spec.parameter_count:
        raise ValueError(
            f"expected {spec.parameter_count} parameters, got {len(params)}")
    angles = _grid_angles(cfg.grid_points)
    trace: list[TraceEntry] = []
    iterates: list[tuple[tuple[float, ...], float, float]] = []
    prev_best = math.inf
    for sweep in range(cfg.sweeps):
        for j in range(len(params)):
            triples = []
            for binding in _BINDINGS:
                u_lam = build_ansatz(spec, bind_parameter(params, j, binding))
                triples.append(gterm_values(grid, prev, u_lam, cfg.mode))
            bundle = GTermBundle(*triples)
            best_lam, best_cost = _refine_argmin(bundle.sums, angles)
            params = bind_parameter(params, j, best_lam)
            bracket = reconstruct_bracket(bundle, best_lam)
            trace.append(TraceEntry(sweep, j, best_lam, best_cost))
            iterates.append((params, best_cost, bracket))
        sweep_best = min(e.cost for e in trace if e.sweep == sweep)
        if prev_best - sweep_best < cfg.tol:
            break
        prev_best = sweep_best
    final_params, final_cost, final_bracket = _best_of_last(iterates)
    return OptimizeResult(final_params, final_cost, final_bracket, tuple(trace))


# ---------------------------------------------------------------------------
# Initial-state fitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    params: tuple[float, ...]
    infidelity: float
    reached_threshold: bool


def _overlap_bracket(target: np.ndarray, spec: AnsatzSpec, params) -> float:
    return float(np.real(np.vdot(target, ansatz_state(spec, params))))


def fit_initial_state(target: np.ndarray, spec: AnsatzSpec,
                      cfg: SweepConfig | None = None,
                      threshold: float = 1e-6, restarts: int = 8,
                      seed: int = 0) -> FitResult:
    """SGEO against the pure-overlap cost C = -[Re<target|psi(lambda)>]^2.

    Exact statevector overlaps throughout; state preparation happens
    before any hardware run, so sampling it buys nothing.  Failing the
    threshold returns the best candidate found rather than raising.
    """
    target = np.asarray(target, dtype=float).reshape(-1)
    if target.shape != (1 << spec.n,):
        raise ValueError(f"target has dim {target.shape}, expected {1 << spec.n}")
    cfg = cfg or SweepConfig(sweeps=40)
    rng = np.random.default_rng(seed)
    angles = _grid_angles(cfg.grid_points)
    best: FitResult | None = None
    for attempt in range(restarts):
        if attempt == 0:
            params = tuple(0.0 for _ in range(spec.parameter_count))
        else:
            params = tuple(rng.uniform(-math.pi, math.pi, spec.parameter_count))
        prev_cost = math.inf
        for _ in range(cfg.sweeps):
            for j in range(len(params)):
                sums = tuple(
                    _overlap_bracket(target, spec, bind_parameter(params, j, b))
                    for b in _BINDINGS)
                lam, cost = _refine_argmin(sums, angles)
                params = bind_parameter(params, j, lam)
            if prev_cost - cost < cfg.tol:
                break
            prev_cost = cost
        err = infidelity(ansatz_state(spec, params), target)
        if best is None or err < best.infidelity:
            best = FitResult(params, err, err <= threshold)
        if best.reached_threshold:
            break
    return best
