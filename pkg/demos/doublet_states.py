"""Channel doublets: two bound states per level, one energy.

Every root of the secular equation carries a two-dimensional eigenspace
labelled by the channel sign sigma = +/-1.  The two members share E but
differ in their channel amplitude ratio A/B = sigma sqrt(Z/Y).  The
scalar profile is a complex sine, matched in value and slope at the
sign flip of the potential, and it alternates quasi-parity (-1)^n down
the ladder.
"""

import numpy as np

from coupledwell import (
    CouplingPair,
    doublet_family,
    evaluate,
    matching_residual,
    phi_bilinear_product,
    quasi_parity,
)

pair = CouplingPair(1.0, 4.0)
family = doublet_family(pair, 4)

print(f"Y={pair.Y}  Z={pair.Z}  sqrt(Z/Y)={np.sqrt(pair.Z / pair.Y)}")
print()
print(" n  sig        E            A/B        match defect   parity")
for st in family:
    ratio = st.A / st.B
    defect = matching_residual(st)
    p = quasi_parity(st)
    print(
        f"{st.level.n:2d}  {st.sigma:+d}  {st.level.E:13.8f}"
        f"  {ratio.real:+.6f}  {defect:12.3e}   {p:+.0f}"
    )

# both members of level 0 point to the same root object
up, down = family[0], family[1]
assert up.level is down.level

# boundary and interface values of the scalar profile
x = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
vals = evaluate(up, x)
print()
print("channel values of the (0,+1) state")
print("  x      ", "  ".join(f"{xi:+.2f}" for xi in x))
print("  upper  ", "  ".join(f"{v:+.4f}" for v in vals[0].real))
print("  lower  ", "  ".join(f"{v:+.4f}" for v in vals[1].real))
print("  (endpoint values exactly zero:", vals[0, 0] == 0.0, vals[0, -1] == 0.0, ")")

# the bilinear (not conjugated) product pairs states of opposite parity
# to zero; the diagonal entries are the normalization integrals
print()
print("bilinear products, level 0 vs 0..3 at sigma=+1")
for st in family[0::2]:
    g = phi_bilinear_product(up, st)
    print(f"  <0|{st.level.n}> = {g:+.3e}")
