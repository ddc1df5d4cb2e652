"""Closed-form reference curves and bound evaluators.

Everything here is deterministic: DMT reference lines, exact counts of
primitive integer vectors in sup-norm shells, the Gaussian small-ball
sandwich, and the assembled Bonferroni lower bound on the probability that
a random Gaussian lattice has a short vector.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

# -- diversity-multiplexing reference curves --------------------------------


class DmtKind(str, Enum):
    NLD_BOUND = "nld_bound"
    VBLAST = "vblast"
    OPTIMAL = "optimal"


@dataclass(frozen=True)
class DmtCurve:
    M: int
    N: int
    kind: DmtKind
    points: list  # (r, d)

    @property
    def r(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def d(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


def default_r_grid(M: int, steps_per_unit: int = 10) -> np.ndarray:
    return np.linspace(0.0, M, steps_per_unit * M + 1)


def dmt_reference(M: int, N: int, kind, r=None) -> DmtCurve:
    """Diversity ``d(r)`` on a grid of multiplexing gains ``0 <= r <= M``.

    * ``nld_bound``: ``M(N-M+1) - r(N-M+1)``, the ceiling for naive lattice
      decoding of full-rate fixed-lattice codes;
    * ``vblast``: ``M - r``;
    * ``optimal``: the piecewise-linear curve through ``(k, (M-k)(N-k))``.
    """
    kind = DmtKind(kind)
    if M < 1 or N < M:
        raise ValueError(f"need 1 <= M <= N, got M={M}, N={N}")
    r = default_r_grid(M) if r is None else np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > M):
        raise ValueError(f"multiplexing gains must lie in [0, {M}]")
    if kind is DmtKind.NLD_BOUND:
        g = N - M + 1
        d = M * g - r * g
    elif kind is DmtKind.VBLAST:
        d = M - r
    else:
        k = np.arange(M + 1)
        d = np.interp(r, k, (M - k) * (N - k))
    return DmtCurve(M, N, kind, [(float(a), float(b)) for a, b in zip(r, d)])


# -- primitive integer vectors ---------------------------------------------


class CountBudgetError(RuntimeError):
    pass


def count_primitive_vectors(dim: int, k: int, max_points: int = 10**8) -> int:
    """Integer vectors with ``2^(k-1) < ||z||_inf <= 2^k`` and coprime entries.

    Exhaustive: every point of the cube ``||z||_inf <= 2^k`` is generated
    and tested.
    """
    if dim < 1 or k < 0:
        raise ValueError("need dim >= 1 and k >= 0")
    R = 2**k
    side = 2 * R + 1
    if side**dim > max_points:
        raise CountBudgetError(f"cube of {side}^{dim} points exceeds the budget of {max_points}")
    inner = R / 2
    axis = np.arange(-R, R + 1, dtype=np.int64)
    total = 0
    if dim == 1:
        pts = axis[:, None]
        chunks = [pts]
    else:
        rest = np.stack(np.meshgrid(*([axis] * (dim - 1)), indexing="ij"), axis=-1).reshape(-1, dim - 1)
        chunks = (np.column_stack([np.full(len(rest), a), rest]) for a in axis)
    for pts in chunks:
        sup = np.abs(pts).max(axis=1)
        shell = pts[(sup > inner) & (sup <= R)]
        if len(shell):
            total += int(np.count_nonzero(np.gcd.reduce(np.abs(shell), axis=1) == 1))
    return total


def _mobius(n: int) -> np.ndarray:
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    is_comp = np.zeros(n + 1, dtype=bool)
    for p in range(2, n + 1):
        if not is_comp[p]:
            is_comp[2 * p::p] = True
            mu[p::p] *= -1
            mu[p * p::p * p] = 0
    return mu


def primitive_in_cube(dim: int, R: int, mertens: np.ndarray | None = None) -> int:
    """Primitive vectors with ``0 < ||z||_inf <= R`` by Moebius inversion."""
    if R < 1:
        return 0
    if mertens is None:
        mertens = np.cumsum(_mobius(R))
    total = 0
    d = 1
    while d <= R:
        q = R // d
        d_hi = R // q
        mu_sum = int(mertens[d_hi] - mertens[d - 1])
        if mu_sum:
            total += mu_sum * ((2 * q + 1) ** dim - 1)
        d = d_hi + 1
    return total


def primitive_shell_counts(dim: int, k_max: int) -> list[int]:
    """Shell counts ``n_0 .. n_kmax`` via :func:`primitive_in_cube` (exact integers)."""
    mertens = np.cumsum(_mobius(2**k_max))
    cube = [primitive_in_cube(dim, 2**k, mertens) for k in range(k_max + 1)]
    return [cube[0]] + [cube[k] - cube[k - 1] for k in range(1, k_max + 1)]


# -- Gaussian small-ball sandwich ---------------------------------------------


def gaussian_ball_bounds(b_norm: float, epsilon: float, M: int) -> tuple[float, float]:
    """Bounds on ``Pr{||v_b|| <= eps}`` for ``v_b ~ CN(0, ||b||^2 I_M)``.

    The density is at most ``1/(pi^M ||b||^{2M})`` on the ball and at least
    that times ``exp(-eps^2/||b||^2)``; the ball of radius ``eps`` in ``C^M``
    has volume ``pi^M eps^{2M} / M!``. Both constants are therefore ``1/M!``.
    """
    if b_norm <= 0 or epsilon <= 0 or M < 1:
        raise ValueError("need positive b_norm, epsilon and M")
    x = (epsilon / b_norm) ** 2
    upper = x**M / math.factorial(M)
    return upper * math.exp(-x), upper


def ball_probability(b_norm: float, epsilon: float, M: int) -> float:
    """Exact ``Pr{||v_b|| <= eps}``: ``||v_b||^2/||b||^2`` is Gamma(M, 1)."""
    return float(special.gammainc(M, (epsilon / b_norm) ** 2))


# -- Bonferroni lower bound --------------------------------------------------


@dataclass(frozen=True)
class BonferroniTerms:
    M: int
    epsilon: float
    shells: int  # shells 0..K used
    classes: int  # primitive vectors counted, one per unit class {1, i, -1, -i}
    single: float
    pairs: float

    @property
    def bound(self) -> float:
        return self.single - self.pairs


def bonferroni_terms(M: int, epsilon: float) -> BonferroniTerms:
    """Both terms of the two-term Bonferroni bound on ``Pr{d(H) <= eps}``.

    The candidate set holds primitive Gaussian-integer vectors ``z`` with
    ``||z||_inf <= eps^(-1/2M)``, one per class of unit multiples (``z`` and
    ``i z`` give the same event). Shell ``k`` contributes ``n_k / 4`` events,
    each of probability at least ``c6 eps^{2M} / ((2M)^M 2^{2kM}) / e``; every
    pair contributes at most ``c8 eps^{4M-1}`` with ``c8 = c7^2 (2M)^M``, and
    ``c6 = c7 = 1/M!``.
    """
    if M < 2:
        raise ValueError("the bound is stated for M >= 2")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    dim = 2 * M
    c6 = c7 = 1.0 / math.factorial(M)
    c8 = c7 * c7 * (2 * M) ** M
    K = math.floor(-math.log2(epsilon) / dim + 1e-12)
    if K > 24:
        raise ValueError(f"epsilon {epsilon} needs {K + 1} shells; too small to count")
    counts = primitive_shell_counts(dim, K)
    eps2m = epsilon**dim
    single = 0.0
    classes = 0
    for k, n_k in enumerate(counts):
        reps = n_k // 4
        classes += reps
        single += reps * c6 * eps2m / ((2 * M) ** M * 2.0 ** (dim * k)) * math.exp(-1.0)
    n_pairs = classes * (classes - 1) // 2
    pairs = n_pairs * c8 * epsilon ** (4 * M - 1)
    return BonferroniTerms(M, float(epsilon), K + 1, classes, single, pairs)


def bonferroni_lower_bound(M: int, epsilon: float) -> float:
    return bonferroni_terms(M, epsilon).bound


def bonferroni_positive_threshold(M: int, lo: float = 1e-8, hi: float = 0.999, grid: int = 2000) -> float:
    """Largest ``eps0`` such that the bound is positive on the whole grid below it.

    Scans a log grid upward from ``lo`` and refines the first sign change by
    bisection.
    """
    eps = np.geomspace(lo, hi, grid)
    vals = [bonferroni_lower_bound(M, e) for e in eps]
    if vals[0] <= 0:
        raise ValueError(f"bound is not positive at eps = {lo}")
    for i in range(1, len(eps)):
        if vals[i] <= 0:
            a, b = eps[i - 1], eps[i]
            for _ in range(60):
                mid = math.sqrt(a * b)
                if bonferroni_lower_bound(M, mid) > 0:
                    a = mid
                else:
                    b = mid
            return float(a)
    return float(hi)


# -- envelope of the upper bound ----------------------------------------------


def upper_bound_lemma2(M: int, epsilon: float, C: float = 1.0) -> float:
    """``C eps^{2M} ln(1/eps)^{M-1}``."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    return C * epsilon ** (2 * M) * math.log(1.0 / epsilon) ** (M - 1)


def fit_envelope_constant(M: int, epsilons, probs) -> float:
    """Smallest ``C`` with ``upper_bound_lemma2(M, eps, C) >= p`` on the given points."""
    return max(p / upper_bound_lemma2(M, e) for e, p in zip(epsilons, probs))

