"""Independent finite-difference cross-check of the analytic solution.

Everything here is deliberately dumb: second-order central differences
on a uniform mesh, Dirichlet rows eliminated, and a dense eigensolve.
No module of the analytic chain (secular roots, closed-form states,
metric algebra) is consulted to build the matrix, so agreement between
the two paths is evidence, not circularity.

The mesh always contains x = 0 as a node (M even), where the
off-diagonal potential takes its average value 0.  That single choice
makes the discrete operator exactly pseudo-Hermitian under the
channel-swap / index-reversal matrix, at every grid size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import ModelDomainError, NumericalFailureError
from .model import CouplingPair, OperatorRep, RepBasis
from .secular import LevelSolution

DEGENERACY_RTOL = 1e-6
PAIRING_RTOL = 1e-6


@dataclass(frozen=True)
class GridSpec:
    """Uniform mesh over [-1, 1] with M intervals, M even and >= 8."""

    M: int

    def __post_init__(self):
        if not isinstance(self.M, int) or self.M < 8 or self.M % 2 != 0:
            raise ModelDomainError(f"M must be an even integer >= 8, got {self.M!r}")

    @property
    def h(self) -> float:
        return 2.0 / self.M

    @property
    def n_interior(self) -> int:
        return self.M - 1

    @property
    def interior_nodes(self) -> np.ndarray:
        return -1.0 + self.h * np.arange(1, self.M)


def build_hamiltonian(coupling: CouplingPair, grid: GridSpec) -> OperatorRep:
    """Dense 2(M-1)-dimensional matrix of the coupled-well operator.

    Layout is channel-blocked: indices 0..M-2 are the upper channel on
    the interior nodes, M-1..2M-3 the lower channel.
    """
    m = grid.n_interior
    h2 = grid.h * grid.h
    kinetic = (
        2.0 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)
    ) / h2
    sgn = np.sign(-grid.interior_nodes)  # 0 at the midpoint node
    channel = np.array([[0.0, 1j * coupling.Z], [1j * coupling.Y, 0.0]])
    matrix = np.kron(np.eye(2), kinetic).astype(complex)
    matrix += np.kron(channel, np.diag(sgn))
    return OperatorRep(
        matrix=matrix,
        basis=RepBasis.GRID,
        is_form=False,
        meta={"grid": grid, "coupling": coupling},
    )


def discrete_theta(grid: GridSpec) -> OperatorRep:
    """Channel swap composed with spatial index reversal.

    Satisfies S H S = H^dagger entrywise for every coupling and grid;
    S is real, symmetric, and involutive.
    """
    m = grid.n_interior
    reversal = np.fliplr(np.eye(m))
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    return OperatorRep(
        matrix=np.kron(swap, reversal),
        basis=RepBasis.GRID,
        is_form=True,
        meta={"grid": grid},
    )


def eigenpairs(rep: OperatorRep, k: int):
    """k eigenvalues of smallest real part with unit-norm right vectors.

    Every eigensolve asserts the pseudo-Hermitian reality structure:
    eigenvalues are real or occur in conjugate pairs, else the solve is
    reported as a failure rather than returned.
    """
    if not isinstance(k, (int, np.integer)) or k < 1 or k > rep.dim:
        raise ModelDomainError(f"k must be in 1..{rep.dim}, got {k!r}")
    try:
        values, vectors = scipy.linalg.eig(rep.matrix)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - hardware dependent
        raise NumericalFailureError(f"dense eigensolve failed: {exc}") from exc
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    vectors = vectors[:, order]
    _assert_conjugate_pairing(values)
    chosen = vectors[:, :k]
    chosen = chosen / np.linalg.norm(chosen, axis=0, keepdims=True)
    return values[:k], chosen


def _assert_conjugate_pairing(values: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(values))))
    tol = PAIRING_RTOL * scale
    complex_ones = values[np.abs(values.imag) > tol]
    for v in complex_ones:
        if np.min(np.abs(complex_ones - np.conj(v))) > tol:
            raise NumericalFailureError(
                f"eigenvalue {v} has no conjugate partner; "
                "pseudo-Hermitian pairing violated"
            )


def group_degenerate(values: np.ndarray, rtol: float = DEGENERACY_RTOL):
    """Cluster eigenvalues whose gaps are below rtol * max(1, |E|).

    Returns a list of (mean value, multiplicity) in ascending real part.
    """
    if values.size == 0:
        return []
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    clusters = [[values[0]]]
    for v in values[1:]:
        anchor = clusters[-1][-1]
        if abs(v - anchor) <= rtol * max(1.0, abs(anchor)):
            clusters[-1].append(v)
        else:
            clusters.append([v])
    return [(complex(np.mean(c)), len(c)) for c in clusters]


def compare_spectrum(
    analytic: Sequence[LevelSolution],
    eigenvalues: np.ndarray,
    k: int,
    coarse_eigenvalues: np.ndarray | None = None,
) -> dict:
    """Per-level error report of the oracle against the analytic levels.

    Eigenvalues are clustered into degenerate groups first; each analytic
    level is matched against one cluster.  With a second, coarser
    eigenvalue set (half the intervals) the report adds Richardson
    convergence orders, expected near 2 for the central-difference rule.
    """
    if len(analytic) < k:
        raise ModelDomainError(f"need at least {k} analytic levels, got {len(analytic)}")
    clusters = group_degenerate(np.asarray(eigenvalues))
    if len(clusters) < k:
        raise ModelDomainError(
            f"only {len(clusters)} degenerate clusters in the numeric spectrum, need {k}"
        )
    rows = []
    degeneracy_ok = True
    for i in range(k):
        level = analytic[i]
        value, multiplicity = clusters[i]
        if multiplicity != 2:
            degeneracy_ok = False
        abs_err = abs(value.real - level.E)
        rows.append(
            {
                "n": level.n,
                "E_analytic": level.E,
                "E_numeric": value.real,
                "im_numeric": value.imag,
                "multiplicity": multiplicity,
                "abs_err": abs_err,
                "rel_err": abs_err / max(1.0, abs(level.E)),
            }
        )
    report = {"levels": rows, "degeneracy_ok": degeneracy_ok}
    if coarse_eigenvalues is not None:
        coarse = group_degenerate(np.asarray(coarse_eigenvalues))
        if len(coarse) < k:
            raise ModelDomainError("coarse spectrum has too few clusters")
        orders = []
        for i in range(k):
            err_fine = rows[i]["abs_err"]
            err_coarse = abs(coarse[i][0].real - analytic[i].E)
            if err_fine == 0.0 or err_coarse == 0.0:
                orders.append(float("nan"))
            else:
                orders.append(math.log2(err_coarse / err_fine))
        report["richardson_orders"] = orders
    return report


def criticality_scan(c_values: Sequence[float], grid: GridSpec):
    """Max |Im E| of the four lowest eigenvalues for each coupling value.

    c is sqrt(YZ), applied as Y = Z = c.  Below the critical coupling the
    imaginary parts are grid noise; past it the lowest quartet carries an
    O(1) imaginary part.  c_values must be strictly increasing.
    """
    c_values = [float(c) for c in c_values]
    if any(c < 0 for c in c_values):
        raise ModelDomainError("coupling values must be >= 0")
    if any(b <= a for a, b in zip(c_values, c_values[1:])):
        raise ModelDomainError("coupling values must be strictly increasing")
    out = []
    for c in c_values:
        rep = build_hamiltonian(CouplingPair(c, c), grid)
        values, _ = eigenpairs(rep, 4)
        out.append((c, float(np.max(np.abs(values.imag)))))
    return out


def first_complex_bracket(scan, threshold: float = 1e-6):
    """Bracket (last real c, first complex c) from a criticality scan."""
    last_real = None
    for c, im in scan:
        if im <= threshold:
            last_real = c
        elif last_real is not None:
            return (last_real, c)
    raise ModelDomainError(
        "scan does not bracket the reality transition; widen the coupling range"
    )


def subspace_alignment(basis_vectors: np.ndarray, target: np.ndarray) -> float:
    """Cosine of the angle between target and span(basis_vectors).

    Used to match an analytic doublet state against the two numerically
    split eigenvectors of a degenerate pair, independent of the
    eigensolver's arbitrary mixing and phases.
    """
    basis_vectors = np.atleast_2d(np.asarray(basis_vectors, dtype=complex))
    if basis_vectors.shape[0] < basis_vectors.shape[1]:
        basis_vectors = basis_vectors.T
    q, _ = np.linalg.qr(basis_vectors)
    target = np.asarray(target, dtype=complex)
    norm = np.linalg.norm(target)
    if norm == 0.0:
        raise ModelDomainError("target vector is zero")
    return float(np.linalg.norm(q.conj().T @ target) / norm)
