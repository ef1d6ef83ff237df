"""Antisymmetrize two scalar particles held in two registers.

Start from (|empty>_2 |p0>_1 + |p1>_2 |p0>_1)/sqrt2, run the marking, aux
rotation, conditional swap and uncompute stages, and look at the state and at
the aux + register-2 measurement statistics after each variant.
"""
from compactferm import antisym
from compactferm.experiments import antisym_histograms, phi0

state = phi0()
print("input branches (aux-reg2 reg1):")
for k, a in state.branches().items():
    print(f"  {k}  {a.real:+.4f}")

marked = antisym.mark_largest(state)
rotated = antisym.antisymmetrize_aux(marked)
swapped = antisym.conditional_swap_phase(rotated)
clean = antisym.locate_largest_uncompute(swapped)
for name, st in [("after marking", marked), ("after aux rotation", rotated),
                 ("after conditional swap", swapped), ("after uncompute", clean)]:
    print(f"{name}:")
    for k, a in st.branches().items():
        print(f"  {k}  {a.real:+.4f}")

# The pair branch now reads (|p1 p0> - |p0 p1>)/2 with the aux back in |00>.
hist = antisym_histograms(shots=5000, seed=2024)
for name, entry in hist.items():
    print(f"\n{name}: outcome  exact  counts/5000")
    for k, p in sorted(entry["exact"].probabilities.items()):
        print(f"  {k}  {p:.3f}  {entry['sampled'].counts.get(k, 0)}")
