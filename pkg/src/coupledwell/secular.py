"""Secular equation of the coupled square wells and its root structure.

For a positive coupling product YZ the bound-state condition reduces to

    g(s) = s sin(2s) + t sinh(2t) = 0,   t = sqrt(YZ) / (2 s),

with energy E = s^2 - t^2.  Roots sit near odd multiples of pi/2 in
pairs: the n-th root is s_n = (n+1) pi/2 + (-1)^n eps_n with eps_n > 0,
so the pair (s_{2k}, s_{2k+1}) lives inside the open cell
((2k+1) pi/2, (2k+2) pi/2) where g is positive at both ends and dips
negative exactly once.  As the coupling grows the two roots of a pair
walk toward the dip minimum, merge there, and leave the real axis: that
merger defines the critical coupling of the pair.

Numerical strategy: sample g on a pi/64 mesh over the pair cell and
bisect the first (even n) or last (odd n) sign change to machine
precision.  If the mesh shows no sign change the dip minimum is located
by bounded minimization; a negative minimum splits the cell into the two
root brackets, a non-negative one means the pair has merged (ROOT_LOST).
The criticality search bisects the coupling against the sign of that dip
minimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    BracketError,
    InvalidToleranceError,
    ModelDomainError,
    NumericalFailureError,
    RootLostError,
)
from .model import BranchClass, CouplingPair

SCAN_STEP = math.pi / 64  # mesh step of the sign-change scan
DEFAULT_RESIDUAL_TOL = 1e-12
DEFAULT_CRITICAL_TOL = 1e-3
_DIP_XATOL = 1e-12
_COUPLING_CAP = 1e6  # criticality scan gives up past this coupling


@dataclass(frozen=True)
class LevelSolution:
    """One solved bound-state root.

    n: level index (0-based); s, t: real and (minus) imaginary part of
    kappa = s - i t; eps: signed offset from (n+1) pi/2 folded positive;
    E: energy; residual: |g(s)| at the returned root; branch: coupling
    product class; sublabel: +/-1 energy member for NEGATIVE_PRODUCT,
    None otherwise.
    """

    n: int
    s: float
    t: float
    eps: float
    E: float
    residual: float
    branch: BranchClass
    sublabel: int | None = None


@dataclass(frozen=True)
class SpectrumResult:
    levels: tuple[LevelSolution, ...]
    truncated_at: int | None = None
    non_diagonalizable: bool = False


@dataclass(frozen=True)
class CriticalResult:
    pair_index: int
    c_crit: float
    bracket_width: float
    evaluations: int


def _validate_tol(tol: float) -> None:
    if not (isinstance(tol, (int, float)) and math.isfinite(tol)):
        raise InvalidToleranceError(f"tolerance must be finite, got {tol!r}")
    if tol <= 0.0 or tol >= 1.0:
        raise InvalidToleranceError(f"tolerance must lie in (0, 1), got {tol!r}")


def residual(s: float, c: float) -> float:
    """g(s) = s sin(2s) + t sinh(2t) with t = c / (2s), c = sqrt(YZ) >= 0."""
    if not (math.isfinite(s) and s > 0.0):
        raise ModelDomainError(f"s must be finite and positive, got {s!r}")
    if not (math.isfinite(c) and c >= 0.0):
        raise ModelDomainError(f"coupling root c must be finite and >= 0, got {c!r}")
    if c == 0.0:
        return s * math.sin(2.0 * s)
    t = c / (2.0 * s)
    return s * math.sin(2.0 * s) + t * math.sinh(2.0 * t)


def pair_interval(pair_index: int) -> tuple[float, float]:
    """Open cell ((2k+1) pi/2, (2k+2) pi/2) holding roots 2k and 2k+1."""
    if pair_index < 0:
        raise ModelDomainError("pair_index must be >= 0")
    k = pair_index
    return ((2 * k + 1) * math.pi / 2.0, (2 * k + 2) * math.pi / 2.0)


def _bisect(f, lo: float, hi: float, f_lo: float) -> float:
    """Bisection to machine precision; f(lo) and f(hi) must differ in sign."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_lo < 0.0) != (f_mid < 0.0):
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def _scan_brackets(f, a: float, b: float, step: float):
    """Sign-change brackets of f on a uniform mesh of [a, b]."""
    n = max(2, int(math.ceil((b - a) / step)))
    xs = np.linspace(a, b, n + 1)
    vals = np.array([f(x) for x in xs])
    out = []
    for i in range(n):
        if vals[i] == 0.0:
            out.append((xs[i], xs[i], vals[i]))
        elif (vals[i] < 0.0) != (vals[i + 1] < 0.0):
            out.append((xs[i], xs[i + 1], vals[i]))
    if vals[-1] == 0.0:
        out.append((xs[-1], xs[-1], vals[-1]))
    return out


def _dip_minimum(f, a: float, b: float) -> tuple[float, float]:
    res = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": _DIP_XATOL})
    return float(res.x), float(res.fun)


def _solve_positive(n: int, c: float, tol: float) -> LevelSolution:
    a, b = pair_interval(n // 2)
    f = lambda s: residual(s, c)
    brackets = _scan_brackets(f, a, b, SCAN_STEP)
    if not brackets:
        # pair close to merger (dip narrower than the mesh) or already gone
        s_min, g_min = _dip_minimum(f, a, b)
        if g_min >= 0.0:
            raise RootLostError(n, c)
        brackets = [(a, s_min, f(a)), (s_min, b, g_min)]
    if len(brackets) == 1:
        # cannot happen for a continuous g positive at both cell ends;
        # guard against a zero landing exactly on a mesh node
        lo, hi, f_lo = brackets[0]
        s = lo if lo == hi else _bisect(f, lo, hi, f_lo)
    else:
        lo, hi, f_lo = brackets[0] if n % 2 == 0 else brackets[-1]
        s = lo if lo == hi else _bisect(f, lo, hi, f_lo)
    t = c / (2.0 * s)
    res = abs(f(s))
    if res > tol:
        raise NumericalFailureError(
            f"bisection stalled at |g|={res:.3e} > tol={tol:.3e} for level n={n}"
        )
    eps = (-1.0) ** n * (s - (n + 1) * math.pi / 2.0)
    return LevelSolution(
        n=n,
        s=s,
        t=t,
        eps=eps,
        E=s * s - t * t,
        residual=res,
        branch=BranchClass.POSITIVE_PRODUCT,
    )


def _exact_box_root(n: int) -> float:
    return (n + 1) * math.pi / 2.0


def solve_level(
    n: int,
    coupling: CouplingPair,
    tol: float = DEFAULT_RESIDUAL_TOL,
    sublabel: int | None = None,
) -> LevelSolution:
    """Solve the n-th bound-state root for the given coupling pair.

    On the NEGATIVE_PRODUCT branch the level splits into the doublet
    E = s^2 +/- sqrt(-YZ); `sublabel` (+1 or -1, default +1) selects the
    member.  On other branches `sublabel` must be omitted.

    Raises RootLostError when the root pair of n has merged (coupling at
    or above the pair's critical value).
    """
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ModelDomainError(f"level index must be a non-negative integer, got {n!r}")
    _validate_tol(tol)
    branch = coupling.branch

    if branch is BranchClass.POSITIVE_PRODUCT:
        if sublabel is not None:
            raise ModelDomainError("sublabel applies to the NEGATIVE_PRODUCT branch only")
        return _solve_positive(int(n), coupling.root_product, tol)

    if branch is BranchClass.NEGATIVE_PRODUCT:
        if sublabel is None:
            sublabel = +1
        if sublabel not in (+1, -1):
            raise ModelDomainError(f"sublabel must be +1 or -1, got {sublabel!r}")
        s = _exact_box_root(int(n))
        return LevelSolution(
            n=int(n),
            s=s,
            t=0.0,
            eps=0.0,
            E=s * s + sublabel * coupling.root_product,
            residual=abs(residual(s, 0.0)),
            branch=branch,
            sublabel=int(sublabel),
        )

    # DECOUPLED
    if sublabel is not None:
        raise ModelDomainError("sublabel applies to the NEGATIVE_PRODUCT branch only")
    s = _exact_box_root(int(n))
    return LevelSolution(
        n=int(n),
        s=s,
        t=0.0,
        eps=0.0,
        E=s * s,
        residual=abs(residual(s, 0.0)),
        branch=branch,
    )


def spectrum(
    coupling: CouplingPair,
    n_max: int,
    tol: float = DEFAULT_RESIDUAL_TOL,
) -> SpectrumResult:
    """Solve levels 0..n_max.

    POSITIVE_PRODUCT and the fully decoupled Y = Z = 0 case yield one
    entry per level; truncation at the first ROOT_LOST is recorded in
    `truncated_at`.  NEGATIVE_PRODUCT yields the split doublet, two
    entries per level ordered sublabel -1 then +1 (ordering across
    levels is by n, so for very large |YZ| doublets of neighbouring n
    may interleave in energy).  A semi-decoupled pair (exactly one of
    Y, Z nonzero) yields each unperturbed level doubly listed with the
    non_diagonalizable flag set: the channel matrix is a Jordan block
    there and the doubled listing is an algebraic multiplicity, not two
    independent states.
    """
    if not isinstance(n_max, (int, np.integer)) or n_max < 0:
        raise ModelDomainError(f"n_max must be a non-negative integer, got {n_max!r}")
    _validate_tol(tol)
    branch = coupling.branch
    levels: list[LevelSolution] = []
    truncated_at: int | None = None
    non_diagonalizable = False

    if branch is BranchClass.POSITIVE_PRODUCT:
        for n in range(n_max + 1):
            try:
                levels.append(solve_level(n, coupling, tol))
            except RootLostError:
                truncated_at = n
                break
    elif branch is BranchClass.NEGATIVE_PRODUCT:
        for n in range(n_max + 1):
            levels.append(solve_level(n, coupling, tol, sublabel=-1))
            levels.append(solve_level(n, coupling, tol, sublabel=+1))
    else:
        double = (coupling.Y != 0.0) or (coupling.Z != 0.0)
        non_diagonalizable = double
        for n in range(n_max + 1):
            sol = solve_level(n, coupling, tol)
            levels.append(sol)
            if double:
                levels.append(sol)

    return SpectrumResult(
        levels=tuple(levels),
        truncated_at=truncated_at,
        non_diagonalizable=non_diagonalizable,
    )


def perturbative_eps(n: int, coupling: CouplingPair, order: int = 2) -> float:
    """Small-coupling expansion of eps_n.

    order 1:  2 YZ / ((n+1)^3 pi^3)
    order 2:  + 4 (YZ)^2 / (3 (n+1)^5 pi^5)

    The absolute error of order 2 scales as (YZ)^3 / (n+1)^7 (with an
    additional (n+1)^-7 piece from the expansion of the prefactors).
    """
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ModelDomainError(f"level index must be a non-negative integer, got {n!r}")
    if order not in (1, 2):
        raise ModelDomainError(f"order must be 1 or 2, got {order!r}")
    product = coupling.product
    if product < 0.0:
        raise ModelDomainError("perturbative eps applies to YZ >= 0 only (branch mismatch)")
    if product == 0.0:
        return 0.0
    m = n + 1
    first = 2.0 * product / (m**3 * math.pi**3)
    if order == 1:
        return first
    return first + 4.0 * product**2 / (3.0 * m**5 * math.pi**5)


class _CountedResidual:
    """residual(s, c) wrapper counting evaluations for the report."""

    def __init__(self):
        self.count = 0

    def __call__(self, s, c):
        self.count += 1
        return residual(s, c)


def critical_coupling(
    pair_index: int,
    tol: float = DEFAULT_CRITICAL_TOL,
) -> CriticalResult:
    """Critical coupling root c = sqrt(YZ) at which the roots s_{2k},
    s_{2k+1} merge, by bisection on the coupling.

    The predicate is "the residual dips below zero inside the pair
    cell", evaluated through bounded minimization (robust arbitrarily
    close to the merger, where the negative window is narrower than any
    fixed mesh).
    """
    if not isinstance(pair_index, (int, np.integer)) or pair_index < 0:
        raise ModelDomainError(f"pair_index must be a non-negative integer, got {pair_index!r}")
    _validate_tol(tol)
    a, b = pair_interval(int(pair_index))
    g = _CountedResidual()

    def pair_alive(c: float) -> bool:
        _, g_min = _dip_minimum(lambda s: g(s, c), a, b)
        return g_min < 0.0

    lo = 1e-3
    if not pair_alive(lo):
        raise BracketError(
            f"pair {pair_index}: no live root pair even at sqrt(YZ)={lo}; scan aborted"
        )
    hi = 1.0
    while pair_alive(hi):
        lo = hi
        hi *= 2.0
        if hi > _COUPLING_CAP:
            raise BracketError(
                f"pair {pair_index}: no criticality transition up to sqrt(YZ)={_COUPLING_CAP}"
            )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if pair_alive(mid):
            lo = mid
        else:
            hi = mid
    return CriticalResult(
        pair_index=int(pair_index),
        c_crit=0.5 * (lo + hi),
        bracket_width=hi - lo,
        evaluations=g.count,
    )
