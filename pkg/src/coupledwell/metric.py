"""Biorthogonal pairing, the swap-reflect pseudo-metric, and the family
of positive metrics that make the coupled-well operator an observable.

The operator is not Hermitian, but it is exactly Hermitian-conjugated by
the involution (channel swap) o (x -> -x).  Left eigenvectors are
therefore swap-reflected images of the right ones, up to the per-state
sign q fixed in wavefunctions.quasi_parity.  Any positive combination

    Theta = sum over (n, sigma) of S[n, sigma] |left><left|

intertwines the operator with its adjoint exactly, for every admissible
weight choice; that sum over the retained levels is what
build_theta_metric assembles.

Map versus form: mode-basis vectors are exact eigenstates and are not
mutually orthogonal, so an operator has two inequivalent matrices there
(see model.OperatorRep).  Metrics are built as forms F[i,k] =
<e_i|Theta e_k>; the operator and the channel-swap observable enter
defect formulas as maps (diagonal in the mode basis).  The mixed-rep
defect  ||M(H)^dagger F - F M(H)||  is basis-shape agnostic: on the
grid the two conventions differ only by the uniform weight h, which
cancels in the normalized defect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    MetricConstraintError,
    ModelDomainError,
    NormalizationSingularError,
)
from .model import CouplingPair, OperatorRep, RepBasis
from .oracle import GridSpec
from .wavefunctions import (
    ChannelState,
    phi_bilinear_product,
    phi_sesquilinear_product,
    quadrature_overlap,
    quasi_parity,
)

# Diagonal pairings scale with sqrt(YZ); below this the metric family
# degenerates and the Hermitian-limit identity metric should be used.
MIN_ROOT_PRODUCT = 1e-6

_OVERLAP_FLOOR = 1e-12
_KINDS = ("hamiltonian", "spin", "identity")


@dataclass(frozen=True, eq=False)
class MetricWeights:
    """Positive weight pair (S_plus, S_minus) per retained level.

    Physical metrics need strict positivity; sign-indefinite choices are
    admitted only through the unsafe flag of the builders, for exploring
    the wider pseudo-metric menu.
    """

    s_plus: np.ndarray
    s_minus: np.ndarray

    def __post_init__(self):
        for name in ("s_plus", "s_minus"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if arr.ndim != 1 or not np.all(np.isfinite(arr)):
                raise MetricConstraintError(f"{name} must be a 1-d finite array")
            object.__setattr__(self, name, arr)
        if self.s_plus.shape != self.s_minus.shape:
            raise MetricConstraintError("s_plus and s_minus must have equal length")

    @property
    def n_levels(self) -> int:
        return self.s_plus.size

    def select(self, n: int, sigma: int) -> float:
        if not 0 <= n < self.n_levels:
            raise MetricConstraintError(f"no weight stored for level n={n}")
        return float(self.s_plus[n] if sigma > 0 else self.s_minus[n])

    @classmethod
    def unit(cls, n_levels: int) -> "MetricWeights":
        if n_levels < 1:
            raise MetricConstraintError("n_levels must be >= 1")
        return cls(np.ones(n_levels), np.ones(n_levels))

    @classmethod
    def from_file(cls, path, n_levels: int) -> "MetricWeights":
        """Parse `n S_plus S_minus` lines; missing levels default to 1 1."""
        s_plus = np.ones(n_levels)
        s_minus = np.ones(n_levels)
        seen = set()
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 3:
                    raise MetricConstraintError(
                        f"{path}:{lineno}: expected 'n S_plus S_minus', got {raw!r}"
                    )
                try:
                    n = int(parts[0])
                    plus, minus = float(parts[1]), float(parts[2])
                except ValueError as exc:
                    raise MetricConstraintError(f"{path}:{lineno}: {exc}") from exc
                if not 0 <= n < n_levels:
                    raise MetricConstraintError(
                        f"{path}:{lineno}: level {n} outside 0..{n_levels - 1}"
                    )
                if n in seen:
                    raise MetricConstraintError(f"{path}:{lineno}: duplicate level {n}")
                seen.add(n)
                s_plus[n] = plus
                s_minus[n] = minus
        return cls(s_plus, s_minus)


def apply_theta(upper, lower):
    """Swap-reflect pseudo-metric at function level.

    Takes the two channel callables of a state and returns the channels
    of theta applied to it: (x -> lower(-x), x -> upper(-x)).  Applying
    it twice returns the original values pointwise (involution).
    """

    def new_upper(x):
        return lower(np.negative(x))

    def new_lower(x):
        return upper(np.negative(x))

    return new_upper, new_lower


@dataclass(frozen=True, eq=False)
class LeftState:
    """Bra partner of a ChannelState: q times its swap-reflect image."""

    state: ChannelState
    q: int

    def upper(self, x):
        return self.q * self.state.lower(np.negative(x))

    def lower(self, x):
        return self.q * self.state.upper(np.negative(x))


def left_vector(state: ChannelState) -> LeftState:
    """Left eigenvector paired with the given right eigenvector.

    The adjoint operator equals (swap o reflect) H (swap o reflect), so
    the swap-reflected state is an adjoint eigenvector for the same real
    energy; the quasi-parity sign makes the diagonal pairing positive.
    """
    return LeftState(state=state, q=quasi_parity(state))


def _channel_weights(state: ChannelState):
    # (upper, lower) scale factors multiplying the unit-norm profile
    if state.Y == 0.0 and state.Z == 0.0:
        return 1.0, float(state.sigma)
    return math.sqrt(state.Z), state.sigma * math.sqrt(state.Y)


def biorthogonal_overlap(left: LeftState, state: ChannelState) -> float:
    """<<left|state> in closed form.

    Reduces to q * (wl wu' + wu wl') * integral phi phi' through the
    self-conjugacy of the profiles; same-level pairings are positive
    under the quasi-parity convention, everything else vanishes.
    """
    ls = left.state
    if (ls.Y, ls.Z) != (state.Y, state.Z):
        raise ModelDomainError("left and right states belong to different couplings")
    wu_l, wl_l = _channel_weights(ls)
    wu_r, wl_r = _channel_weights(state)
    factor = left.q * (wl_l * wu_r + wu_l * wl_r)
    return factor * phi_bilinear_product(ls, state)


def diagonal_overlap(state: ChannelState) -> float:
    return biorthogonal_overlap(left_vector(state), state)


def biorthogonality_matrix(
    states: Sequence[ChannelState],
    lefts: Sequence[LeftState] | None = None,
    method: str = "closed",
    panels: int = 512,
) -> np.ndarray:
    """Pairing matrix G[i, j] = <<left_i|state_j>.

    method "closed" uses the analytic segment integrals; "quadrature"
    recomputes every entry by composite Simpson as an independent check
    of the closed forms.
    """
    if lefts is None:
        lefts = [left_vector(s) for s in states]
    if len(lefts) != len(states):
        raise ModelDomainError("need one left vector per state")
    n = len(states)
    if method == "closed":
        out = np.empty((n, n))
        for i, left in enumerate(lefts):
            for j, state in enumerate(states):
                out[i, j] = biorthogonal_overlap(left, state)
        return out
    if method == "quadrature":
        out = np.empty((n, n), dtype=complex)
        for i, left in enumerate(lefts):
            for j, state in enumerate(states):
                out[i, j] = quadrature_overlap(
                    left.upper, state.upper, panels
                ) + quadrature_overlap(left.lower, state.lower, panels)
        return out
    raise ModelDomainError(f"unknown overlap method {method!r}")


def spin_operator(coupling: CouplingPair) -> OperatorRep:
    """Constant 2x2 channel observable commuting with the Hamiltonian.

    Off-diagonal entries sqrt(Z/Y) and sqrt(Y/Z); eigenvalues +-1 label
    the degenerate doublets.
    """
    if coupling.Y <= 0.0 or coupling.Z <= 0.0:
        raise ModelDomainError("spin block needs Y > 0 and Z > 0")
    ratio = math.sqrt(coupling.Z / coupling.Y)
    matrix = np.array([[0.0, ratio], [1.0 / ratio, 0.0]])
    return OperatorRep(
        matrix=matrix,
        basis=RepBasis.CHANNEL,
        is_form=False,
        meta={"coupling": coupling},
    )


def channel_kernel(coupling: CouplingPair, s_plus: float, s_minus: float) -> np.ndarray:
    """2x2 channel-weight matrix of one level's metric contribution.

    [[Y (S+ + S-), sqrt(YZ) (S+ - S-)],
     [sqrt(YZ) (S+ - S-), Z (S+ + S-)]]

    The off-diagonal carries the factor S+ - S-, so equal weights kill
    the channel mixing identically (exact zero, not a small number).
    """
    m = math.sqrt(coupling.Y) * math.sqrt(coupling.Z)
    off = m * s_plus - m * s_minus
    return np.array(
        [
            [coupling.Y * (s_plus + s_minus), off],
            [off, coupling.Z * (s_plus + s_minus)],
        ]
    )


def _validate_family(states: Sequence[ChannelState]):
    if not states:
        raise ModelDomainError("need at least one state")
    if len(states) % 2 != 0:
        raise ModelDomainError("states must come in complete (n, +1), (n, -1) doublets")
    coupling = CouplingPair(states[0].Y, states[0].Z)
    n_levels = len(states) // 2
    expected = {(n, sigma) for n in range(n_levels) for sigma in (+1, -1)}
    seen = []
    for s in states:
        if (s.Y, s.Z) != (coupling.Y, coupling.Z):
            raise ModelDomainError("all states must share one coupling pair")
        seen.append((s.level.n, s.sigma))
    if set(seen) != expected or len(seen) != len(set(seen)):
        raise ModelDomainError(
            f"states must cover levels 0..{n_levels - 1} with both sigma labels exactly once"
        )
    return coupling, n_levels


def _resolve_weights(states, weights, general_weight_matrix, unsafe):
    coupling, n_levels = _validate_family(states)
    if coupling.root_product < MIN_ROOT_PRODUCT:
        raise MetricConstraintError(
            f"sqrt(|YZ|) = {coupling.root_product:.3e} is below {MIN_ROOT_PRODUCT}; "
            "diagonal pairings vanish in the decoupled limit, so no metric of this "
            "family exists there. The Hermitian limit uses the identity metric."
        )
    if general_weight_matrix is not None:
        r = np.asarray(general_weight_matrix)
        dim = 2 * n_levels
        if r.shape != (dim, dim):
            raise MetricConstraintError(
                f"general weight matrix must be {dim}x{dim}, got {r.shape}"
            )
        off = r - np.diag(np.diag(r))
        if np.any(off != 0):
            raise MetricConstraintError(
                "weight matrices mixing distinct levels or spin labels are rejected: "
                "the intertwining constraint forces (E' - E) R = 0, leaving only the "
                "diagonal reduction"
            )
        if np.any(np.iscomplex(r)) or not np.all(np.isfinite(np.diag(r).real)):
            raise MetricConstraintError("weights must be finite reals")
        per_state = np.diag(r).real.astype(float).copy()
    else:
        if weights is None:
            weights = MetricWeights.unit(n_levels)
        if weights.n_levels < n_levels:
            raise MetricConstraintError(
                f"weights cover {weights.n_levels} levels, need {n_levels}"
            )
        per_state = np.array(
            [weights.select(s.level.n, s.sigma) for s in states], dtype=float
        )
    if not unsafe and np.any(per_state <= 0.0):
        bad = int(np.argmin(per_state))
        raise MetricConstraintError(
            f"weight {per_state[bad]!r} for state (n={states[bad].level.n}, "
            f"sigma={states[bad].sigma}) is not positive; indefinite weight "
            "choices need unsafe=True"
        )
    return coupling, n_levels, per_state


def _kernels_by_level(states, per_state, coupling, n_levels):
    by_level = {}
    for s, w in zip(states, per_state):
        by_level.setdefault(s.level.n, {})[s.sigma] = w
    return [
        channel_kernel(coupling, by_level[n][+1], by_level[n][-1])
        for n in range(n_levels)
    ]


def _hermitize(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.conj().T) / 2.0


def _stack_on_grid(vec_upper, vec_lower, nodes) -> np.ndarray:
    return np.concatenate([vec_upper(nodes), vec_lower(nodes)])


def build_theta_metric(
    states: Sequence[ChannelState],
    weights: MetricWeights | None = None,
    rep: RepBasis = RepBasis.MODE,
    grid: GridSpec | None = None,
    unsafe: bool = False,
    general_weight_matrix: np.ndarray | None = None,
) -> OperatorRep:
    """Assemble the weighted left-projector sum as a form matrix.

    MODE: F = C diag(S) C^dagger with C[i, k] = <state_i|left_k>, all
    entries from closed-form integrals; the result is real symmetric and
    positive definite for positive weights.  GRID: the same sum sampled
    on the interior nodes of `grid` (channel-blocked layout), weighted
    by the node spacing.  The per-level 2x2 channel kernels are exposed
    in meta["channel_kernels"].
    """
    coupling, n_levels, per_state = _resolve_weights(
        states, weights, general_weight_matrix, unsafe
    )
    lefts = [left_vector(s) for s in states]
    meta = {
        "coupling": coupling,
        "n_levels": n_levels,
        "order": [(s.level.n, s.sigma) for s in states],
        "weights_by_state": per_state,
        "channel_kernels": _kernels_by_level(states, per_state, coupling, n_levels),
    }
    if rep is RepBasis.MODE:
        dim = len(states)
        c = np.empty((dim, dim))
        for i, state in enumerate(states):
            for k, left in enumerate(lefts):
                c[i, k] = biorthogonal_overlap(left, state)
        matrix = _hermitize(c @ np.diag(per_state) @ c.T)
        eigenvalues = np.linalg.eigvalsh(matrix)
        meta["signature"] = (
            int(np.sum(eigenvalues > 0.0)),
            int(np.sum(eigenvalues < 0.0)),
        )
        return OperatorRep(matrix=matrix, basis=RepBasis.MODE, is_form=True, meta=meta)
    if rep is RepBasis.GRID:
        if grid is None:
            raise ModelDomainError("grid representation needs a GridSpec")
        nodes = grid.interior_nodes
        columns = np.stack(
            [_stack_on_grid(l.upper, l.lower, nodes) for l in lefts], axis=1
        )
        matrix = _hermitize((columns * per_state) @ columns.conj().T * grid.h)
        meta["grid"] = grid
        return OperatorRep(matrix=matrix, basis=RepBasis.GRID, is_form=True, meta=meta)
    raise ModelDomainError(f"unsupported representation {rep!r} for the metric")


def mode_hamiltonian(states: Sequence[ChannelState]) -> OperatorRep:
    """Map matrix of the Hamiltonian on its own eigenbasis: diag(E)."""
    _validate_family(states)
    return OperatorRep(
        matrix=np.diag([s.level.E for s in states]),
        basis=RepBasis.MODE,
        is_form=False,
        meta={"order": [(s.level.n, s.sigma) for s in states]},
    )


def mode_spin(states: Sequence[ChannelState]) -> OperatorRep:
    """Map matrix of the channel observable on the mode basis: diag(sigma)."""
    _validate_family(states)
    return OperatorRep(
        matrix=np.diag([float(s.sigma) for s in states]),
        basis=RepBasis.MODE,
        is_form=False,
        meta={"order": [(s.level.n, s.sigma) for s in states]},
    )


def quasi_hermiticity_defect(op_rep: OperatorRep, theta_rep: OperatorRep) -> float:
    """Normalized size of  M(A)^dagger F(Theta) - F(Theta) M(A).

    Zero exactly when A is Hermitian under the Theta inner product.  The
    operator must be a map representation and the metric a form on the
    same basis.
    """
    if op_rep.basis is not theta_rep.basis:
        raise ModelDomainError(
            f"representations live on different bases: {op_rep.basis} vs {theta_rep.basis}"
        )
    if op_rep.dim != theta_rep.dim:
        raise ModelDomainError("dimension mismatch between operator and metric")
    if op_rep.is_form or not theta_rep.is_form:
        raise ModelDomainError("defect needs an operator map and a metric form")
    m = op_rep.matrix
    f = theta_rep.matrix
    defect = m.conj().T @ f - f @ m
    denom = float(np.max(np.abs(f))) * float(np.max(np.abs(m)))
    if denom == 0.0:
        raise ModelDomainError("zero operator or metric")
    return float(np.max(np.abs(defect))) / denom


def _diagonal_overlaps(states, lefts):
    d = np.array(
        [biorthogonal_overlap(l, s) for l, s in zip(lefts, states)], dtype=float
    )
    scale = float(np.max(np.abs(d))) if d.size else 0.0
    if scale == 0.0 or np.any(np.abs(d) <= _OVERLAP_FLOOR * max(1.0, scale)):
        raise NormalizationSingularError(
            "a diagonal biorthogonal overlap vanishes; spectral sums cannot be normalized"
        )
    return d


def _simpson_node_weights(grid: GridSpec) -> np.ndarray:
    # composite Simpson per half-interval; walls are dropped because every
    # participating function vanishes there
    if grid.M % 4 != 0:
        raise ModelDomainError(
            f"Simpson weighting splits each half into an even panel count: "
            f"M must be divisible by 4, got {grid.M}"
        )
    half = grid.M // 2
    pattern = np.ones(half + 1)
    pattern[1:-1:2] = 4.0
    pattern[2:-1:2] = 2.0
    pattern *= grid.h / 3.0
    full = np.zeros(grid.M + 1)
    full[: half + 1] += pattern
    full[half:] += pattern
    return full[1:-1]


def spectral_reconstruct(
    states: Sequence[ChannelState],
    lefts: Sequence[LeftState],
    kind: str = "hamiltonian",
    rep: RepBasis = RepBasis.GRID,
    grid: GridSpec | None = None,
) -> OperatorRep:
    """Truncated spectral sum  sum_i value_i |state_i><<left_i| / d_i.

    kind selects value_i: the level energy ("hamiltonian"), the spin
    label ("spin"), or 1 ("identity", the completeness partial sum).
    On the grid the bra integrals use Simpson node weights so that the
    reconstruction error on the retained span is quadrature-limited.
    """
    if kind not in _KINDS:
        raise ModelDomainError(f"kind must be one of {_KINDS}, got {kind!r}")
    if len(lefts) != len(states) or any(
        l.state is not s for l, s in zip(lefts, states)
    ):
        raise ModelDomainError("lefts must pair one-to-one with states, in order")
    d = _diagonal_overlaps(states, lefts)
    if kind == "hamiltonian":
        values = np.array([s.level.E for s in states])
    elif kind == "spin":
        values = np.array([float(s.sigma) for s in states])
    else:
        values = np.ones(len(states))
    meta = {"kind": kind, "order": [(s.level.n, s.sigma) for s in states]}
    if rep is RepBasis.GRID:
        if grid is None:
            raise ModelDomainError("grid representation needs a GridSpec")
        w = _simpson_node_weights(grid)
        w2 = np.concatenate([w, w])
        nodes = grid.interior_nodes
        right = np.stack(
            [_stack_on_grid(s.upper, s.lower, nodes) for s in states], axis=1
        )
        bras = np.stack(
            [_stack_on_grid(l.upper, l.lower, nodes) for l in lefts], axis=1
        )
        matrix = (right * (values / d)) @ (bras.conj() * w2[:, None]).T
        meta.update({"grid": grid, "rule": "simpson"})
        return OperatorRep(matrix=matrix, basis=RepBasis.GRID, is_form=False, meta=meta)
    if rep is RepBasis.MODE:
        pairing = biorthogonality_matrix(states, lefts, method="closed")
        matrix = np.diag(values / d) @ pairing
        return OperatorRep(matrix=matrix, basis=RepBasis.MODE, is_form=False, meta=meta)
    raise ModelDomainError(f"unsupported representation {rep!r} for spectral sums")


def inverse_theta_metric(
    states: Sequence[ChannelState],
    weights: MetricWeights | None = None,
    rep: RepBasis = RepBasis.MODE,
    grid: GridSpec | None = None,
    unsafe: bool = False,
) -> OperatorRep:
    """Map representation of Theta^{-1} = sum |state> <state| / (S d^2).

    The coefficients are reciprocals of the metric's weights through the
    squared diagonal pairings d; composing with the metric reproduces
    the identity on the retained span (see inverse_identity_defect).
    """
    coupling, n_levels, per_state = _resolve_weights(states, weights, None, unsafe)
    lefts = [left_vector(s) for s in states]
    d = _diagonal_overlaps(states, lefts)
    coeff = 1.0 / (per_state * d * d)
    meta = {
        "coupling": coupling,
        "n_levels": n_levels,
        "order": [(s.level.n, s.sigma) for s in states],
        "coefficients": coeff,
        "diagonal_overlaps": d,
    }
    if rep is RepBasis.MODE:
        dim = len(states)
        gram = np.empty((dim, dim))
        for i, a in enumerate(states):
            wu_a, wl_a = _channel_weights(a)
            for j, b in enumerate(states):
                wu_b, wl_b = _channel_weights(b)
                gram[i, j] = (wu_a * wu_b + wl_a * wl_b) * phi_sesquilinear_product(a, b)
        matrix = np.diag(coeff) @ gram
        return OperatorRep(matrix=matrix, basis=RepBasis.MODE, is_form=False, meta=meta)
    if rep is RepBasis.GRID:
        if grid is None:
            raise ModelDomainError("grid representation needs a GridSpec")
        nodes = grid.interior_nodes
        columns = np.stack(
            [_stack_on_grid(s.upper, s.lower, nodes) for s in states], axis=1
        )
        matrix = (columns * coeff) @ columns.conj().T * grid.h
        meta["grid"] = grid
        return OperatorRep(matrix=matrix, basis=RepBasis.GRID, is_form=False, meta=meta)
    raise ModelDomainError(f"unsupported representation {rep!r} for the inverse metric")


def inverse_identity_defect(
    theta_rep: OperatorRep,
    states: Sequence[ChannelState],
    weights: MetricWeights | None = None,
    unsafe: bool = False,
) -> float:
    """Max deviation of Theta^{-1} Theta from the identity on the span.

    In mode coordinates the basis Gram matrix of the inverse's map and
    the metric's form cancel exactly, so the composition reduces to
    diag(1/(S d^2)) F(Theta); no matrix inversion enters the check.
    """
    if theta_rep.basis is not RepBasis.MODE or not theta_rep.is_form:
        raise ModelDomainError("identity check expects the mode-basis metric form")
    _, _, per_state = _resolve_weights(states, weights, None, unsafe)
    if theta_rep.dim != len(states):
        raise ModelDomainError("metric dimension does not match the state list")
    lefts = [left_vector(s) for s in states]
    d = _diagonal_overlaps(states, lefts)
    coeff = 1.0 / (per_state * d * d)
    product = coeff[:, None] * theta_rep.matrix
    return float(np.max(np.abs(product - np.eye(len(states)))))
