"""Lattice bases, LLL reduction and exact enumeration.

Complex lattices are handled through their real image: a complex
coordinate ``z`` becomes the pair ``(Re z, Im z)`` and a complex basis
column ``c`` becomes the two real columns for ``1*c`` and ``i*c``. All
reduction and enumeration runs on real bases.

Enumeration is exact. When the node budget runs out an
:class:`EnumerationBudgetError` is raised rather than returning an
approximate answer.
"""

from dataclasses import dataclass, field

import numpy as np

from nldsim import _kernels

DEFAULT_DELTA = 0.75
DEFAULT_MAX_NODES = 10**8


class EnumerationBudgetError(RuntimeError):
    """The enumeration node budget was exhausted."""


def realify_matrix(G: np.ndarray) -> np.ndarray:
    """Real image of a complex matrix (or stack), shape ``(..., 2m, 2n)``."""
    G = np.asarray(G)
    m, n = G.shape[-2:]
    out = np.empty(G.shape[:-2] + (2 * m, 2 * n))
    re, im = G.real, G.imag
    out[..., 0::2, 0::2] = re
    out[..., 1::2, 0::2] = im
    out[..., 0::2, 1::2] = -im
    out[..., 1::2, 1::2] = re
    return out


def realify_vector(v: np.ndarray) -> np.ndarray:
    """Interleave real and imaginary parts along the last axis."""
    v = np.asarray(v)
    out = np.empty(v.shape[:-1] + (2 * v.shape[-1],))
    out[..., 0::2] = v.real
    out[..., 1::2] = v.imag
    return out


def complexify_vector(r: np.ndarray) -> np.ndarray:
    """Inverse of :func:`realify_vector`."""
    r = np.asarray(r)
    return r[..., 0::2] + 1j * r[..., 1::2]


@dataclass(frozen=True)
class LatticeBasis:
    """Full-rank generator; the columns are the basis vectors."""

    generator: np.ndarray
    reduced: bool = False

    def __post_init__(self):
        G = np.array(self.generator, dtype=complex if np.iscomplexobj(self.generator) else float)
        if G.ndim == 1:
            G = G[:, np.newaxis]
        if G.ndim != 2 or G.size == 0:
            raise ValueError(f"generator must be a nonempty matrix, got shape {G.shape}")
        if not np.all(np.isfinite(G)):
            raise ValueError("generator has non-finite entries")
        if G.shape[1] > G.shape[0]:
            raise ValueError("more basis vectors than ambient dimensions")
        sv = np.linalg.svd(G, compute_uv=False)
        if sv[-1] <= 1e-12 * sv[0]:
            raise ValueError("basis vectors are linearly dependent")
        G.setflags(write=False)
        object.__setattr__(self, "generator", G)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.generator)

    @property
    def ambient_dim(self) -> int:
        return self.generator.shape[0]

    @property
    def rank(self) -> int:
        return self.generator.shape[1]

    def real(self) -> "LatticeBasis":
        return self if self.is_real else realify(self)


@dataclass(frozen=True)
class LatticePoint:
    coeffs: np.ndarray
    embedding: np.ndarray = field(repr=False)

    @classmethod
    def of(cls, basis: LatticeBasis, coeffs) -> "LatticePoint":
        coeffs = np.asarray(coeffs, dtype=np.int64)
        return cls(coeffs, basis.generator @ coeffs)


def realify(basis: LatticeBasis) -> LatticeBasis:
    """Real basis of twice the rank spanning the same point set."""
    if basis.is_real:
        raise ValueError("basis is already real")
    return LatticeBasis(realify_matrix(basis.generator))


def volume(basis: LatticeBasis) -> float:
    """``det(G* G)^(1/2)`` for the generator ``G``."""
    # |det R| from a QR of G equals det(G* G)^(1/2) without squaring the
    # condition number
    R = np.linalg.qr(basis.generator, mode="r")
    return float(np.prod(np.abs(np.diag(R))))


def _real_target(basis: LatticeBasis, target) -> np.ndarray:
    t = np.asarray(target)
    if np.iscomplexobj(t) or not basis.is_real:
        t = realify_vector(np.asarray(t, dtype=complex))
    t = np.asarray(t, dtype=float)
    rb = basis.real()
    if t.shape != (rb.ambient_dim,):
        raise ValueError(f"target has shape {t.shape}, expected ({rb.ambient_dim},)")
    return t


def lll_reduce(basis: LatticeBasis, delta: float = DEFAULT_DELTA):
    """LLL-reduce a basis. Returns ``(reduced_basis, U)`` with ``reduced = basis @ U``."""
    if not 0.25 < delta < 1.0:
        raise ValueError(f"delta must lie in (0.25, 1), got {delta}")
    B = basis.real().generator
    _, U = _kernels.lll(np.ascontiguousarray(B), delta)
    return LatticeBasis(B @ U, reduced=True), U


def shortest_vector(basis: LatticeBasis, max_nodes: int = DEFAULT_MAX_NODES,
                    delta: float = DEFAULT_DELTA):
    """Exact shortest nonzero vector: ``(point, norm)``.

    Ties resolve to the lexicographically smallest coefficient vector.
    """
    rb = basis.real()
    coeffs, d2, status = _kernels.shortest_vector(np.ascontiguousarray(rb.generator), delta, max_nodes)
    if status == _kernels.BUDGET:
        raise EnumerationBudgetError(f"shortest_vector exceeded {max_nodes} nodes")
    return LatticePoint.of(rb, coeffs), float(np.sqrt(d2))


def closest_vector(basis: LatticeBasis, target, max_nodes: int = DEFAULT_MAX_NODES,
                   delta: float = DEFAULT_DELTA):
    """Exact closest lattice point to ``target``: ``(point, distance)``.

    Schnorr-Euchner enumeration on the LLL-reduced basis, seeded with the
    Babai point. Ties resolve to the lexicographically smallest coefficient
    vector.
    """
    rb = basis.real()
    t = _real_target(basis, target)
    n = rb.rank
    lo = np.full(n, -_kernels.UNBOUNDED, dtype=np.int64)
    hi = np.full(n, _kernels.UNBOUNDED, dtype=np.int64)
    coeffs, d2, status = _kernels.closest_point(np.ascontiguousarray(rb.generator), t, lo, hi,
                                                True, delta, max_nodes)
    if status == _kernels.BUDGET:
        raise EnumerationBudgetError(f"closest_vector exceeded {max_nodes} nodes")
    point = LatticePoint.of(rb, coeffs)
    return point, float(np.linalg.norm(point.embedding - t))


def babai_nearest_plane(basis: LatticeBasis, target) -> LatticePoint:
    """Babai's nearest-plane point in the given basis (no reduction applied)."""
    rb = basis.real()
    t = _real_target(basis, target)
    R, tq, _ = _kernels.qr_r(np.ascontiguousarray(rb.generator), t)
    n = rb.rank
    lo = np.full(n, -_kernels.UNBOUNDED, dtype=np.int64)
    hi = np.full(n, _kernels.UNBOUNDED, dtype=np.int64)
    x, _ = _kernels.babai(R, tq, lo, hi)
    return LatticePoint.of(rb, x)


def count_points_in_ball(basis: LatticeBasis, radius: float, max_nodes: int = DEFAULT_MAX_NODES) -> int:
    """Exact number of lattice points of norm at most ``radius``."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    reduced, _ = lll_reduce(basis)
    B = np.ascontiguousarray(reduced.generator)
    R, _, _ = _kernels.qr_r(B, np.zeros(B.shape[0]))
    count = _kernels.count_ball(R, float(radius) ** 2, max_nodes)
    if count < 0:
        raise EnumerationBudgetError(f"count_points_in_ball exceeded {max_nodes} nodes")
    return int(count)
