"""Tour of the truncated Fock-space toolkit.

Builds each nonclassical target state, inspects truncation quality, and
checks the ladder identities that everything downstream relies on.
"""

import math

import numpy as np

from ionprotect import (
    FockSpace,
    annihilation,
    basis_ket,
    cat_plus_state,
    cat_unitary,
    coherent_state,
    creation,
    number_operator,
    phase_state,
    sideband_amplitudes,
    squeezed_vacuum,
)

space = FockSpace(40)
print(f"Working on a {space.dim}-level vibrational ladder\n")

# 1. ladder algebra ---------------------------------------------------------
a = annihilation(space)
n_op = number_operator(space)
print("a|3> has squared length 3:",
      round(np.linalg.norm((a @ basis_ket(space, 3)).amp) ** 2, 12))
comm = (a @ creation(space)).mat - (creation(space) @ a).mat
print("[a, a+] = 1 on the retained levels (edge excepted):",
      np.allclose(np.diag(comm)[:-1], 1.0))

# 2. the target states ------------------------------------------------------
alpha = math.sqrt(3)
states = {
    "coherent(sqrt 3)": coherent_state(space, alpha),
    "balanced cat": cat_plus_state(space, alpha),
    "squeezed vacuum r=0.6": squeezed_vacuum(space, 0.6),
    "phase state N=3": phase_state(space, 3, 0.0),
}
print("\nstate                     <n>      discarded tail")
for label, ket in states.items():
    print(f"{label:<24} {ket.mean_excitation():7.4f}   {ket.tail:.2e}")

# the cat keeps the coherent state's number distribution, just with the odd
# and even sectors phase-locked
cat = states["balanced cat"]
coh = states["coherent(sqrt 3)"]
print("\ncat vs coherent number distributions agree to",
      f"{np.abs(cat.number_distribution() - coh.number_distribution()).max():.1e}")

# 3. the cat-producing unitary ----------------------------------------------
t_op = cat_unitary(space, alpha)
produced = t_op @ basis_ket(space, 0)
print("unitary applied to |0> overlaps the cat:",
      f"{abs(cat.overlap(produced)):.12f}")

# 4. sideband coupling functions -------------------------------------------
print("\nLamb-Dicke coupling amplitudes f_k(n) at eta = 0.2:")
for k in (0, 1):
    vals = sideband_amplitudes(6, k, 0.2)
    print(f"  k={k}:", "  ".join(f"{v:.5f}" for v in vals))
print("small-eta limit f_k(0) -> 1/k!:",
      "  ".join(f"{sideband_amplitudes(1, k, 1e-6)[0]:.6f}" for k in (0, 1, 2)))
