"""Native gate-count scaling: low-depth vs conventional construction.

Tallies single- and two-qubit gates of the deepest estimator circuit
(the shift-plus-diagonal term) after lowering to each hardware basis,
for the low-depth scheme (elided controls, d = 2n-3 layers) and the
conventional fully ancilla-controlled baseline (d = n layers).
"""
import numpy as np

from lowdepthqc import (AnsatzSpec, BaselineSpec, BasisTarget, GTermKind,
                        Head, Variant, build_ansatz, build_baseline,
                        build_gterm_circuit, count_report)

rng = np.random.default_rng(0)
print(f"{'n':>2} {'basis':>5} {'scheme':>12} {'g1':>6} {'g2':>5} {'depth':>6}")
for n in range(3, 7):
    low = AnsatzSpec(n, 2 * n - 3, Variant.CU_ALT, Head.RY)
    base = BaselineSpec(n)
    for scheme, spec, build, elide in (("low_depth", low, build_ansatz, True),
                                       ("conventional", base, build_baseline,
                                        False)):
        params = rng.uniform(-np.pi, np.pi, spec.parameter_count)
        u = build(spec, tuple(params))
        circ = build_gterm_circuit(GTermKind.SHIFT_DIAG, u, u, elide=elide)
        for basis in BasisTarget:
            r = count_report(circ, basis)
            print(f"{n:>2} {basis.value:>5} {scheme:>12} "
                  f"{r.g1:>6} {r.g2:>5} {r.depth:>6}")
