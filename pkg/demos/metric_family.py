"""A family of positive metrics, one per choice of doublet weights.

The truncated sum of weighted left projectors gives a positive operator
Theta under which the non-Hermitian Hamiltonian and the channel
observable both become Hermitian.  The weights S_n,sigma > 0 are free:
each admissible choice is a different metric.  Equal weights make the
off-diagonal channel block of every level kernel vanish identically.
"""

import numpy as np

from coupledwell import (
    CouplingPair,
    MetricWeights,
    OperatorRep,
    RepBasis,
    build_theta_metric,
    doublet_family,
    inverse_identity_defect,
    inverse_theta_metric,
    mode_hamiltonian,
    mode_spin,
    quasi_hermiticity_defect,
)

pair = CouplingPair(2.0, 2.0)
states = doublet_family(pair, 8)
ham = mode_hamiltonian(states)
spin = mode_spin(states)

print("default weights (all S = 1)")
theta = build_theta_metric(states)
evals = np.linalg.eigvalsh(theta.matrix)
print("  hermitian defect   ", np.max(np.abs(theta.matrix - theta.matrix.conj().T)))
print("  eigenvalue range    [%.6f, %.6f]" % (evals[0], evals[-1]))
print("  signature          ", theta.meta["signature"])
print("  H defect           ", quasi_hermiticity_defect(ham, theta))
print("  spin defect        ", quasi_hermiticity_defect(spin, theta))
k0 = theta.meta["channel_kernels"][0]
print("  level-0 kernel off-diagonal:", k0[0][1], k0[1][0])

print()
print("skewed weights (S_+ = 3, S_- = 1 on level 1)")
s_plus = np.ones(8)
s_plus[1] = 3.0
w = MetricWeights(s_plus, np.ones(8))
theta_w = build_theta_metric(states, weights=w)
evals_w = np.linalg.eigvalsh(theta_w.matrix)
print("  eigenvalue range    [%.6f, %.6f]" % (evals_w[0], evals_w[-1]))
print("  H defect           ", quasi_hermiticity_defect(ham, theta_w))
print("  spin defect        ", quasi_hermiticity_defect(spin, theta_w))
k1 = theta_w.meta["channel_kernels"][1]
print("  level-1 kernel off-diagonal:", k1[0][1], k1[1][0])
print("  (nonzero: unequal weights couple the channels in the kernel)")

# H and the channel observable are Hermitian under EVERY member of the
# family; a generic operator is not.  The doublet swap (n,sig)->(n,-sig)
# passes only for the symmetric weight choice.
flip = np.zeros_like(theta.matrix)
order = theta.meta["order"]
for i, (n, sig) in enumerate(order):
    j = order.index((n, -sig))
    flip[i, j] = 1.0
swap = OperatorRep(matrix=flip, basis=RepBasis.MODE)
print()
print("doublet swap defect, equal weights: ", quasi_hermiticity_defect(swap, theta))
print("doublet swap defect, skewed weights:", quasi_hermiticity_defect(swap, theta_w))

# closed-form inverse: same projectors, weights 1/(S d^2)
inv = inverse_theta_metric(states)
d = inverse_identity_defect(theta, states)
print()
print("inverse check, max |Theta^-1 Theta - 1| =", d)
print("inverse coefficients (first four):", [f"{c:.6f}" for c in inv.meta["coefficients"][:4]])
