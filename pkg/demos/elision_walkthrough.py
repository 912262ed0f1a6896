"""Walk through ancilla-control elision on a small overlap estimator.

Builds the Hadamard-test circuit for Re<psi_t|psi_lam> twice, once with
every body gate ancilla-controlled and once with the redundant ancilla
controls removed, then verifies both give identical statevectors and
compares native gate counts on both hardware bases.
"""
import numpy as np

from lowdepthqc import (AnsatzSpec, BasisTarget, GTermKind, Head, Variant,
                        build_ansatz, build_gterm_circuit, count_report,
                        serialize_circuit, statevector_deviation)

rng = np.random.default_rng(0)
spec = AnsatzSpec(n=3, d=3, variant=Variant.CU_ALT, head=Head.RY)
make = lambda: build_ansatz(spec, rng.uniform(-np.pi, np.pi,
                                              spec.parameter_count))
u_t, u_lam = make(), make()

full = build_gterm_circuit(GTermKind.OVERLAP, u_t, u_lam, elide=False)
lean = build_gterm_circuit(GTermKind.OVERLAP, u_t, u_lam, elide=True)

print("unelided circuit:")
print(serialize_circuit(full))
print("elided circuit:")
print(serialize_circuit(lean))

dev = statevector_deviation(full, lean)
print(f"max statevector deviation after elision: {dev:.3e}")

for basis in BasisTarget:
    a = count_report(full, basis)
    b = count_report(lean, basis)
    print(f"{basis.value:>4}: g2 {a.g2} -> {b.g2}  "
          f"g1 {a.g1} -> {b.g1}  depth {a.depth} -> {b.depth}")
