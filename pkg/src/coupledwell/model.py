"""Two-channel square well on (-1, 1) with purely imaginary,
antisymmetric channel coupling.

Units hbar = 2m = 1, Dirichlet walls at x = +/-1 (half-width fixed to 1;
no length parameter appears anywhere downstream).  Both diagonal channel
potentials vanish.  The off-diagonal coupling is piecewise constant and
purely imaginary: the upper-right entry is +iZ on (-1, 0) and -iZ on
(0, 1); the lower-left entry is +iY and -iY on the same halves.  At
x = 0 exactly the coupling takes the average value 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelDomainError

HALF_WIDTH = 1.0


class BranchClass(enum.Enum):
    """Sign class of the coupling product YZ.

    POSITIVE_PRODUCT: complex kappa branch, doubly degenerate real levels.
    NEGATIVE_PRODUCT: real kappa, levels split as E = s^2 +/- sqrt(-YZ).
    DECOUPLED: YZ = 0; with exactly one coupling nonzero the channel
    matrix is a Jordan block (non-diagonalizable warning downstream).
    """

    POSITIVE_PRODUCT = "POSITIVE_PRODUCT"
    NEGATIVE_PRODUCT = "NEGATIVE_PRODUCT"
    DECOUPLED = "DECOUPLED"


def _require_finite(name, value):
    if not math.isfinite(value):
        raise ModelDomainError(f"{name} must be finite, got {value!r}")


def classify_branch(Y: float, Z: float) -> BranchClass:
    """Classify the coupling pair by the sign of the product YZ."""
    _require_finite("Y", Y)
    _require_finite("Z", Z)
    product = Y * Z
    if product > 0:
        return BranchClass.POSITIVE_PRODUCT
    if product < 0:
        return BranchClass.NEGATIVE_PRODUCT
    return BranchClass.DECOUPLED


@dataclass(frozen=True)
class CouplingPair:
    """Imaginary coupling amplitudes of the two channels."""

    Y: float
    Z: float

    def __post_init__(self):
        _require_finite("Y", self.Y)
        _require_finite("Z", self.Z)

    @property
    def product(self) -> float:
        return self.Y * self.Z

    @property
    def branch(self) -> BranchClass:
        return classify_branch(self.Y, self.Z)

    @property
    def root_product(self) -> float:
        """sqrt(YZ) for the positive branch, sqrt(-YZ) for the negative,
        0 when decoupled."""
        return math.sqrt(abs(self.product))


@dataclass(frozen=True)
class PotentialSpec:
    """Effective 2x2 potential of the coupled pair of wells."""

    coupling: CouplingPair

    def _check_x(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise ModelDomainError("sample points must be finite")
        if np.any(np.abs(x) > HALF_WIDTH):
            raise ModelDomainError("potential is defined on |x| <= 1 only")
        return x

    def coupling_to_upper(self, x):
        """Upper-right entry: +iZ on (-1,0), -iZ on (0,1), 0 at x = 0."""
        x = self._check_x(x)
        return 1j * self.coupling.Z * np.sign(-x)

    def coupling_to_lower(self, x):
        """Lower-left entry: +iY on (-1,0), -iY on (0,1), 0 at x = 0."""
        x = self._check_x(x)
        return 1j * self.coupling.Y * np.sign(-x)

    def channel_potential_upper(self, x):
        x = self._check_x(x)
        return np.zeros_like(x)

    def channel_potential_lower(self, x):
        x = self._check_x(x)
        return np.zeros_like(x)

    def matrix(self, x: float) -> np.ndarray:
        """Full 2x2 potential matrix at a single point."""
        x = float(self._check_x(x))
        return np.array(
            [
                [0.0, 1j * self.coupling.Z * np.sign(-x)],
                [1j * self.coupling.Y * np.sign(-x), 0.0],
            ],
            dtype=complex,
        )


class RepBasis(enum.Enum):
    """Basis a finite operator representation lives on.

    GRID: interior nodes of a uniform mesh, channel-blocked layout
    (all upper-channel values first, then all lower-channel values).
    MODE: retained exact eigenstates, one entry per (level, sigma).
    CHANNEL: the bare 2x2 channel space (constant-in-x operators).
    """

    GRID = "grid"
    MODE = "mode"
    CHANNEL = "channel"


@dataclass(frozen=True, eq=False)
class OperatorRep:
    """Dense matrix representation of an operator on a chosen basis.

    is_form distinguishes the two ways a matrix can represent an
    operator on a non-orthonormal basis: a map matrix M (A e_k =
    sum_i M[i,k] e_i) or a form matrix F[i,k] = <e_i|A e_k>.  Metrics
    are forms; Hamiltonians and the channel swap observable are maps.
    """

    matrix: np.ndarray
    basis: RepBasis
    is_form: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ModelDomainError(f"operator matrix must be square, got shape {m.shape}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def check_potential_symmetry(spec: PotentialSpec, n_samples: int = 64) -> dict:
    """Verify conj(W(x)) = W(-x) for both coupling entries.

    Samples are interior midpoints of (0, 1), so x = 0 (where the sign
    convention is the average) is never hit.  Returns the report
    {"max_defect": ...}; the defect is exactly 0 for this potential.
    """
    if n_samples < 1:
        raise ModelDomainError("n_samples must be >= 1")
    x = (np.arange(n_samples) + 0.5) / n_samples
    defect = 0.0
    for entry in (spec.coupling_to_upper, spec.coupling_to_lower):
        defect = max(defect, float(np.max(np.abs(np.conj(entry(x)) - entry(-x)))))
    # diagonal channel potentials are zero, so their mirror relation is trivial
    defect = max(
        defect,
        float(
            np.max(
                np.abs(
                    spec.channel_potential_upper(x)
                    - np.conj(spec.channel_potential_lower(-x))
                )
            )
        ),
    )
    return {"max_defect": defect}
