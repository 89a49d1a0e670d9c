"""Inverse design: laser configurations whose dissipator pins a chosen state.

For each target family, synthesize the engineered jump operator, print the
beam table, and audit the dark state (residual and null-space dimension).
"""

import math

import numpy as np

from ionprotect import (
    FockSpace,
    cat_dissipator,
    qubit_drive,
    reduced_generator,
    spectral_gap,
    squeeze_dissipator,
    steady_states,
    superposition_drive,
    verify_dark_state,
)

GAMMA_MHZ = 4.0          # electronic decay
OMEGA1_MHZ = 2.0         # reference Rabi frequency
om1 = OMEGA1_MHZ / GAMMA_MHZ

space = FockSpace(30)
# the squeezed family needs a deeper ladder: the residual of a + tanh(r) a+
# on the truncated squeezed vacuum falls off like tanh(r)^(dim/2)
deep = FockSpace(56)

designs = {
    "qubit (|0>+|1>)/sqrt2": qubit_drive(space, 1.0, 1.0, 0.2, om1),
    "phase state N=3": superposition_drive(space, np.ones(4) / 2.0, 0.2, om1),
    "cat alpha^2=3": cat_dissipator(space, math.sqrt(3), (0.2 * om1) ** 2),
    "squeezed r=0.6": squeeze_dissipator(deep, 0.6, om1, eta=0.05),
}

for label, diss in designs.items():
    print(f"\n=== {label} ===")
    print(f"gamma_eng = {diss.gamma_eng * GAMMA_MHZ * 1e3:.3f} kHz "
          f"({diss.gamma_eng:.2e} in decay-rate units)")
    if diss.drives:
        print(f"{'beam':<22}{'sideband':>9}{'eta':>8}   Rabi / MHz")
        for dr in diss.drives:
            rabi = dr.rabi * GAMMA_MHZ
            print(f"{dr.label:<22}{dr.sideband_k:>+9d}{dr.eta:>8.3f}   {rabi:.4g}")
    else:
        print("no finite beam realization known; reduced model only")
    audit = verify_dark_state(diss.d, diss.target)
    print(f"dark-state residual {audit.residual:.2e}, null dimension {audit.null_dim}")

# uniqueness and relaxation speed of the engineered reservoirs ---------------
print("\nsteady-state audit of the engineered dissipators alone:")
for label, diss in designs.items():
    gen = reduced_generator(diss.d.space, diss)
    result = steady_states(gen)
    gap = spectral_gap(gen)
    print(f"{label:<24} multiplicity {result.multiplicity}   "
          f"gap/gamma_eng = {gap / diss.gamma_eng:.4f}")
print("\nnote the small phase-state gap: the offset profile vanishes at the")
print("target degree, so levels just above it drain back only slowly")
