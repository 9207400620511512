"""Metric layer: swap-reflect conjugation, biorthogonal pairings, weighted
metric family, inverses and spectral sums."""

import math

import numpy as np
import pytest

from coupledwell import (
    ChannelState,
    CouplingPair,
    GridSpec,
    LeftState,
    MetricConstraintError,
    MetricWeights,
    ModelDomainError,
    NormalizationSingularError,
    OperatorRep,
    RepBasis,
    apply_theta,
    biorthogonal_overlap,
    biorthogonality_matrix,
    build_hamiltonian,
    build_theta_metric,
    channel_kernel,
    diagonal_overlap,
    discrete_theta,
    doublet_family,
    inverse_identity_defect,
    inverse_theta_metric,
    left_vector,
    mode_hamiltonian,
    mode_spin,
    parity_overlap,
    quasi_hermiticity_defect,
    quasi_parity,
    solve_coefficients,
    solve_level,
    spectral_reconstruct,
    spin_operator,
)

UNIT = CouplingPair(1.0, 1.0)
XS = np.linspace(-1.0, 1.0, 101)


def _singular_state():
    # phi_coeff^2 = i makes the parity overlap exactly zero, which no sign
    # convention can absorb
    lvl = solve_level(0, CouplingPair(0.0, 0.0))
    a = complex(math.sqrt(0.5), math.sqrt(0.5))
    kappa = complex(lvl.s, 0.0)
    return ChannelState(level=lvl, sigma=+1, Y=0.0, Z=0.0,
                        phi_coeff=a, kappa=kappa, A=a, B=a)


def test_apply_theta_swaps_and_reflects():
    f = lambda x: np.asarray(x) ** 2 + 0j
    g = lambda x: np.asarray(x) ** 3 + 0j
    up, low = apply_theta(f, g)
    assert np.array_equal(up(XS), g(-XS))
    assert np.array_equal(low(XS), f(-XS))


def test_apply_theta_is_an_involution():
    states = doublet_family(UNIT, 1)
    st = states[0]
    up2, low2 = apply_theta(*apply_theta(st.upper, st.lower))
    assert np.array_equal(up2(XS), st.upper(XS))
    assert np.array_equal(low2(XS), st.lower(XS))


def test_theta_maps_state_to_scaled_reflection():
    pair = CouplingPair(1.0, 4.0)
    st = doublet_family(pair, 1)[0]
    up, low = apply_theta(st.upper, st.lower)
    # channels swap and reflect: the new upper is sigma sqrt(Y) P phi,
    # the new lower sqrt(Z) P phi
    assert np.abs(up(XS) - st.sigma * math.sqrt(pair.Y) * st.phi(-XS)).max() < 1e-12
    assert np.abs(low(XS) - math.sqrt(pair.Z) * st.phi(-XS)).max() < 1e-12


def test_left_vector_diagonal_pairing():
    for sigma in (+1, -1):
        st = doublet_family(UNIT, 1)[0 if sigma == 1 else 1]
        d = diagonal_overlap(st)
        assert d > 0.0
        assert abs(d - 2.0 * abs(parity_overlap(st))) < 1e-13
    pair = CouplingPair(2.0, 0.5)
    for st in doublet_family(pair, 3):
        expected = 2.0 * math.sqrt(2.0 * 0.5) * abs(parity_overlap(st))
        assert abs(diagonal_overlap(st) - expected) < 1e-13


def test_left_vector_component_layout():
    st = doublet_family(CouplingPair(1.0, 4.0), 1)[0]
    lv = left_vector(st)
    q = lv.q
    assert q in (+1, -1)
    assert np.array_equal(lv.upper(XS), q * st.lower(-XS))
    assert np.array_equal(lv.lower(XS), q * st.upper(-XS))


def test_decoupled_weights_keep_pairing_finite():
    # at Y = Z = 0 the states carry unit channel factors, so the diagonal
    # pairing stays 2|p| instead of collapsing with sqrt(YZ)
    pair = CouplingPair(0.0, 0.0)
    lvl = solve_level(0, pair)
    st = solve_coefficients(lvl, pair, +1)
    assert abs(diagonal_overlap(st) - 2.0 * abs(parity_overlap(st))) < 1e-14
    assert diagonal_overlap(st) > 0.0


def test_biorthogonality_matrix_closed():
    states = doublet_family(UNIT, 3)
    mat = biorthogonality_matrix(states)
    diag = np.diag(mat)
    assert np.all(diag > 0.0)
    off = mat - np.diag(diag)
    assert np.abs(off).max() <= 1e-12 * diag.max()
    # opposite spin members of one level decouple exactly in closed form
    assert mat[0, 1] == 0.0 and mat[1, 0] == 0.0


def test_biorthogonality_matrix_quadrature():
    states = doublet_family(UNIT, 3)
    mat = biorthogonality_matrix(states, method="quadrature", panels=512)
    diag = np.diag(mat)
    assert np.all(diag > 0.0)
    assert np.abs(mat - np.diag(diag)).max() <= 1e-9 * diag.max()
    closed = biorthogonality_matrix(states)
    assert np.abs(mat - closed).max() < 1e-9


def test_biorthogonality_matrix_validation():
    states = doublet_family(UNIT, 2)
    with pytest.raises(ModelDomainError):
        biorthogonality_matrix(states, method="monte-carlo")


def test_spin_operator_entries():
    assert np.array_equal(spin_operator(UNIT).matrix, np.array([[0.0, 1.0], [1.0, 0.0]]))
    omega = spin_operator(CouplingPair(1.0, 4.0)).matrix
    assert np.array_equal(omega, np.array([[0.0, 2.0], [0.5, 0.0]]))
    assert np.array_equal(omega @ omega, np.eye(2))
    with pytest.raises(ModelDomainError):
        spin_operator(CouplingPair(0.0, 1.0))


def test_spin_commutes_with_discrete_hamiltonian():
    for y, z in [(1.0, 1.0), (1.0, 4.0)]:
        pair = CouplingPair(y, z)
        grid = GridSpec(32)
        h = build_hamiltonian(pair, grid).matrix
        omega = np.kron(spin_operator(pair).matrix, np.eye(grid.n_interior))
        assert np.abs(omega @ h - h @ omega).max() == 0.0


def test_spin_conjugated_by_swap_reflect_gives_adjoint():
    pair = CouplingPair(1.0, 4.0)
    grid = GridSpec(16)
    omega = np.kron(spin_operator(pair).matrix, np.eye(grid.n_interior))
    s = discrete_theta(grid).matrix
    assert np.abs(s @ omega @ s - omega.conj().T).max() == 0.0


def test_channel_kernel_values():
    k = channel_kernel(UNIT, 1.0, 1.0)
    assert np.array_equal(k, np.array([[2.0, 0.0], [0.0, 2.0]]))
    k2 = channel_kernel(UNIT, 1.0, 2.0)
    assert np.array_equal(k2, np.array([[3.0, -1.0], [-1.0, 3.0]]))


def test_channel_kernel_offdiagonal_exact_zero_at_equal_weights():
    for w in (1.0, 0.7, 3.5):
        for y, z in [(1.0, 1.0), (1.5, 1.5), (2.0, 0.5)]:
            k = channel_kernel(CouplingPair(y, z), w, w)
            assert k[0, 1] == 0.0 and k[1, 0] == 0.0


def test_build_theta_metric_mode_basic():
    states = doublet_family(UNIT, 6)
    theta = build_theta_metric(states)
    assert theta.basis is RepBasis.MODE and theta.is_form
    assert np.abs(theta.matrix - theta.matrix.conj().T).max() == 0.0
    assert np.linalg.eigvalsh(theta.matrix).min() > 0.0
    assert theta.meta["signature"] == (12, 0)
    for k in theta.meta["channel_kernels"]:
        assert k[0, 1] == 0.0 and k[1, 0] == 0.0


def test_theta_intertwines_mode_hamiltonian_and_spin():
    for y, z, n in [(1.0, 1.0, 16), (2.0, 2.0, 16), (1.0, 4.0, 12)]:
        states = doublet_family(CouplingPair(y, z), n)
        theta = build_theta_metric(states)
        assert quasi_hermiticity_defect(mode_hamiltonian(states), theta) <= 1e-8
        assert quasi_hermiticity_defect(mode_spin(states), theta) <= 1e-8
        assert np.linalg.eigvalsh(theta.matrix).min() > 0.0


def test_theta_intertwines_with_nontrivial_weights():
    states = doublet_family(UNIT, 4)
    w = MetricWeights(
        s_plus=np.array([1.0, 2.0, 0.5, 1.25]),
        s_minus=np.array([3.0, 1.0, 1.0, 0.75]),
    )
    theta = build_theta_metric(states, w)
    assert quasi_hermiticity_defect(mode_hamiltonian(states), theta) <= 1e-8
    assert quasi_hermiticity_defect(mode_spin(states), theta) <= 1e-8
    assert np.linalg.eigvalsh(theta.matrix).min() > 0.0
    # unequal spin weights switch on the off-diagonal kernel entries
    k0 = theta.meta["channel_kernels"][0]
    assert k0[0, 1] != 0.0


def test_metric_weights_validation_and_selection():
    w = MetricWeights(s_plus=np.array([1.0, 2.0]), s_minus=np.array([3.0, 4.0]))
    assert w.n_levels == 2
    assert w.select(0, +1) == 1.0 and w.select(1, -1) == 4.0
    with pytest.raises(MetricConstraintError):
        w.select(2, +1)
    with pytest.raises(MetricConstraintError):
        MetricWeights(s_plus=np.array([1.0]), s_minus=np.array([1.0, 2.0]))


def test_metric_weight_file_parsing(tmp_path):
    path = tmp_path / "weights.txt"
    path.write_text("# level  S+  S-\n0 1.5 2.5\n\n2 0.5 0.25\n")
    w = MetricWeights.from_file(path, 3)
    assert w.select(0, +1) == 1.5 and w.select(0, -1) == 2.5
    # level 1 falls back to the defaults
    assert w.select(1, +1) == 1.0 and w.select(1, -1) == 1.0
    assert w.select(2, -1) == 0.25


def test_metric_weight_file_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1.0 1.0\n0 2.0 2.0\n")
    with pytest.raises(MetricConstraintError):
        MetricWeights.from_file(bad, 2)
    bad.write_text("7 1.0 1.0\n")
    with pytest.raises(MetricConstraintError):
        MetricWeights.from_file(bad, 2)
    bad.write_text("0 one 1.0\n")
    with pytest.raises(MetricConstraintError):
        MetricWeights.from_file(bad, 2)


def test_indefinite_weights_need_unsafe():
    states = doublet_family(UNIT, 2)
    w = MetricWeights(s_plus=np.array([1.0, 1.0]), s_minus=np.array([-1.0, -1.0]))
    with pytest.raises(MetricConstraintError):
        build_theta_metric(states, w)
    theta = build_theta_metric(states, w, unsafe=True)
    assert theta.meta["signature"] == (2, 2)
    assert np.linalg.eigvalsh(theta.matrix).min() < 0.0


def test_general_weight_matrix_diagonal_reduction():
    states = doublet_family(UNIT, 2)
    r = np.diag([1.0, 2.0, 3.0, 4.0])
    theta_r = build_theta_metric(states, general_weight_matrix=r)
    w = MetricWeights(s_plus=np.array([1.0, 3.0]), s_minus=np.array([2.0, 4.0]))
    theta_w = build_theta_metric(states, w)
    assert np.array_equal(theta_r.matrix, theta_w.matrix)


def test_general_weight_matrix_rejects_mixing():
    states = doublet_family(UNIT, 2)
    r = np.diag([1.0, 1.0, 1.0, 1.0])
    r[0, 2] = 0.1
    with pytest.raises(MetricConstraintError):
        build_theta_metric(states, general_weight_matrix=r)
    with pytest.raises(MetricConstraintError):
        build_theta_metric(states, general_weight_matrix=np.eye(3))
    with pytest.raises(MetricConstraintError):
        build_theta_metric(states, general_weight_matrix=np.eye(4) * (1 + 1j))


def test_metric_refuses_near_decoupled_family():
    pair = CouplingPair(1e-7, 1e-7)
    states = doublet_family(pair, 1)
    with pytest.raises(MetricConstraintError):
        build_theta_metric(states)


def test_family_validation():
    states = doublet_family(UNIT, 2)
    with pytest.raises(ModelDomainError):
        build_theta_metric(states[:3])  # missing one spin member
    with pytest.raises(ModelDomainError):
        build_theta_metric([states[0], states[0], states[2], states[3]])
    mixed = doublet_family(CouplingPair(2.0, 2.0), 2)
    with pytest.raises(ModelDomainError):
        build_theta_metric(states[:2] + mixed[2:])


def test_grid_theta_hermitian_and_converging_defect():
    states = doublet_family(UNIT, 2)
    defects = []
    for m in (64, 128):
        grid = GridSpec(m)
        theta = build_theta_metric(states, rep=RepBasis.GRID, grid=grid)
        assert np.abs(theta.matrix - theta.matrix.conj().T).max() == 0.0
        h = build_hamiltonian(UNIT, grid)
        defects.append(quasi_hermiticity_defect(h, theta))
    assert defects[0] < 1e-4
    # discretization error of the finite-difference operator dominates and
    # shrinks under refinement
    assert defects[1] < defects[0] / 4.0


def test_grid_theta_requires_grid():
    states = doublet_family(UNIT, 1)
    with pytest.raises(ModelDomainError):
        build_theta_metric(states, rep=RepBasis.GRID)


def test_discrete_swap_reflect_has_zero_defect():
    grid = GridSpec(64)
    h = build_hamiltonian(UNIT, grid)
    assert quasi_hermiticity_defect(h, discrete_theta(grid)) == 0.0


def test_identity_metric_in_hermitian_limit():
    grid = GridSpec(32)
    h = build_hamiltonian(CouplingPair(0.0, 0.0), grid)
    eye = OperatorRep(np.eye(h.dim), RepBasis.GRID, is_form=True)
    assert quasi_hermiticity_defect(h, eye) == 0.0


def test_defect_validation():
    states = doublet_family(UNIT, 2)
    theta = build_theta_metric(states)
    grid_h = build_hamiltonian(UNIT, GridSpec(16))
    with pytest.raises(ModelDomainError):
        quasi_hermiticity_defect(grid_h, theta)  # basis mismatch
    with pytest.raises(ModelDomainError):
        quasi_hermiticity_defect(theta, theta)  # form where a map is needed
    small = mode_hamiltonian(doublet_family(UNIT, 1))
    with pytest.raises(ModelDomainError):
        quasi_hermiticity_defect(small, theta)


def test_inverse_theta_identity_defect():
    states = doublet_family(UNIT, 4)
    theta = build_theta_metric(states)
    assert inverse_identity_defect(theta, states) <= 1e-8
    # the inverse map's Gram factor cancels against the metric form, so
    # scaling by the coefficients alone must reproduce the identity
    inv = inverse_theta_metric(states)
    coeff = inv.meta["coefficients"]
    assert np.abs(coeff[:, None] * theta.matrix - np.eye(8)).max() <= 1e-8


def test_inverse_theta_scaling():
    states = doublet_family(UNIT, 2)
    w1 = MetricWeights.unit(2)
    w2 = MetricWeights(s_plus=np.full(2, 2.0), s_minus=np.full(2, 2.0))
    inv1 = inverse_theta_metric(states, w1)
    inv2 = inverse_theta_metric(states, w2)
    assert np.array_equal(inv2.matrix, inv1.matrix / 2.0)
    # reciprocal relation between metadata coefficients and overlaps
    c = inv1.meta["coefficients"]
    d = inv1.meta["diagonal_overlaps"]
    assert np.abs(c * d * d - 1.0).max() < 1e-12


def test_spectral_reconstruct_mode_is_diagonal():
    states = doublet_family(UNIT, 4)
    lefts = [left_vector(s) for s in states]
    rec = spectral_reconstruct(states, lefts, "hamiltonian", rep=RepBasis.MODE)
    energies = np.array([s.level.E for s in states])
    assert np.abs(rec.matrix - np.diag(energies)).max() < 1e-9
    rec_s = spectral_reconstruct(states, lefts, "spin", rep=RepBasis.MODE)
    assert np.abs(rec_s.matrix - np.diag([s.sigma for s in states])).max() < 1e-9


def test_spectral_reconstruct_grid_accuracy():
    grid = GridSpec(512)
    states = doublet_family(UNIT, 4)
    lefts = [left_vector(s) for s in states]
    nodes = grid.interior_nodes
    rec_h = spectral_reconstruct(states, lefts, "hamiltonian", grid=grid)
    rec_i = spectral_reconstruct(states, lefts, "identity", grid=grid)
    rec_o = spectral_reconstruct(states, lefts, "spin", grid=grid)
    for st in states:
        v = np.concatenate([st.upper(nodes), st.lower(nodes)])
        scale = np.abs(v).max()
        assert np.abs(rec_h.matrix @ v - st.level.E * v).max() <= 1e-8 * scale * abs(st.level.E)
        assert np.abs(rec_i.matrix @ v - v).max() <= 1e-8 * scale
        assert np.abs(rec_o.matrix @ v - st.sigma * v).max() <= 1e-8 * scale


def test_spectral_reconstruct_validation():
    states = doublet_family(UNIT, 2)
    lefts = [left_vector(s) for s in states]
    with pytest.raises(ModelDomainError):
        spectral_reconstruct(states, lefts[::-1], "hamiltonian", rep=RepBasis.MODE)
    with pytest.raises(ModelDomainError):
        spectral_reconstruct(states, lefts, "resolvent", rep=RepBasis.MODE)
    with pytest.raises(ModelDomainError):
        spectral_reconstruct(states, lefts, "hamiltonian", grid=GridSpec(126))
    with pytest.raises(ModelDomainError):
        spectral_reconstruct(states, lefts, "hamiltonian")  # grid missing


def test_singular_parity_overlap_is_refused():
    st = _singular_state()
    assert parity_overlap(st) == 0.0
    with pytest.raises(NormalizationSingularError):
        quasi_parity(st)
    with pytest.raises(NormalizationSingularError):
        left_vector(st)
    forced = LeftState(state=st, q=1)
    with pytest.raises(NormalizationSingularError):
        spectral_reconstruct([st], [forced], "identity", rep=RepBasis.MODE)


def test_biorthogonal_overlap_requires_matching_coupling():
    a = doublet_family(UNIT, 1)[0]
    b = doublet_family(CouplingPair(2.0, 2.0), 1)[0]
    lv = left_vector(a)
    with pytest.raises(ModelDomainError):
        biorthogonal_overlap(lv, b)
