"""Space-time lattice codes: V-BLAST QAM and the 2x2 Golden code.

A code is a complex ``MT x MT`` generator ``L`` plus a hypercube of
coefficients. Each real coordinate of the (realified) information vector
takes the centered odd values ``{-(m-1), ..., -1, 1, ..., m-1}`` with
``m = sqrt(qam_order)``, so one complex coordinate is a square QAM symbol.
A codeword is ``X = unvec(power_scale * L z)``, filled column by column:
column ``t`` is what the ``M`` antennas send at channel use ``t``.
"""

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from nldsim.lattice import LatticeBasis, complexify_vector, realify_matrix, volume

MAX_CODEBOOK = 10**6


class CodebookTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class Codeword:
    coeffs: np.ndarray  # realified odd-integer coefficients, length 2MT
    signal: np.ndarray  # complex M x T


@dataclass(frozen=True)
class SpaceTimeCode:
    name: str
    M: int
    T: int
    lattice: LatticeBasis
    qam_order: int
    P: float = 1.0

    @property
    def levels(self) -> int:
        """Values per real coordinate."""
        return math.isqrt(self.qam_order)

    @property
    def dim(self) -> int:
        """Real dimension ``2MT`` of the coefficient vector."""
        return 2 * self.M * self.T

    @property
    def coeff_range(self) -> tuple[int, int]:
        """Inclusive range of each coefficient (odd values only)."""
        return -(self.levels - 1), self.levels - 1

    @property
    def codebook_size(self) -> int:
        return self.levels**self.dim

    @property
    def rate_bits(self) -> float:
        return self.dim * math.log2(self.levels)

    @property
    def volume(self) -> float:
        return volume(self.lattice)

    @property
    def mean_energy_unscaled(self) -> float:
        """Average ``||L z||^2`` per channel use over the codebook, before scaling.

        Coordinates are independent, zero mean and uniform, so the exact
        codebook average is ``E[u^2] * ||realify(L)||_F^2 / T``.
        """
        m = self.levels
        second_moment = (m * m - 1) / 3.0
        frob2 = 2.0 * float(np.sum(np.abs(self.lattice.generator) ** 2))
        return second_moment * frob2 / self.T

    @property
    def power_scale(self) -> float:
        """Amplitude factor giving average energy ``P`` per channel use."""
        return math.sqrt(self.P / self.mean_energy_unscaled)

    def with_power(self, P: float) -> "SpaceTimeCode":
        if P <= 0:
            raise ValueError("power must be positive")
        return replace(self, P=float(P))

    def real_generator(self) -> np.ndarray:
        """Realified generator ``realify(L)``, unscaled."""
        return realify_matrix(self.lattice.generator)

    def signal(self, coeffs) -> np.ndarray:
        """Scaled ``M x T`` signal matrix for one coefficient vector (or a stack)."""
        coeffs = np.asarray(coeffs)
        z = complexify_vector(coeffs.astype(float))
        v = self.power_scale * (z @ self.lattice.generator.T)
        # column-major unvec: first M entries are channel use 1
        return np.swapaxes(v.reshape(v.shape[:-1] + (self.T, self.M)), -1, -2)

    def codeword(self, coeffs) -> Codeword:
        coeffs = np.asarray(coeffs, dtype=np.int64)
        if coeffs.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} coefficients, got shape {coeffs.shape}")
        return Codeword(coeffs, self.signal(coeffs))


def _check_qam(qam_order: int) -> None:
    r = math.isqrt(qam_order)
    if qam_order < 4 or r * r != qam_order:
        raise ValueError(f"qam_order must be a perfect square >= 4, got {qam_order}")


def vblast_code(M: int, T: int = 1, qam_order: int = 4, P: float = 1.0) -> SpaceTimeCode:
    """Uncoded spatial multiplexing: identity generator over ``Z[i]^{MT}``."""
    _check_qam(qam_order)
    if M < 1 or T < 1:
        raise ValueError("M and T must be >= 1")
    lattice = LatticeBasis(np.eye(M * T, dtype=complex))
    return SpaceTimeCode("vblast", M, T, lattice, qam_order, float(P))


def golden_generator() -> np.ndarray:
    """Complex 4x4 generator mapping ``(a, b, c, d)`` to ``vec(X)`` of the Golden code.

    ``X = 1/sqrt(5) [[alpha (a + b theta), alpha (c + d theta)],
    [i alpha' (c + d theta'), alpha' (a + b theta')]]`` with the golden ratio
    ``theta``, its conjugate ``theta'``, ``alpha = 1 + i(1 - theta)`` and
    ``alpha' = 1 + i(1 - theta')``. The generator is unitary.
    """
    theta = (1 + math.sqrt(5)) / 2
    theta_c = (1 - math.sqrt(5)) / 2
    alpha = 1 + 1j * (1 - theta)
    alpha_c = 1 + 1j * (1 - theta_c)
    G = np.zeros((4, 4), dtype=complex)
    # rows: X11, X21, X12, X22; columns: a, b, c, d
    G[0, 0], G[0, 1] = alpha, alpha * theta
    G[3, 0], G[3, 1] = alpha_c, alpha_c * theta_c
    G[2, 2], G[2, 3] = alpha, alpha * theta
    G[1, 2], G[1, 3] = 1j * alpha_c, 1j * alpha_c * theta_c
    return G / math.sqrt(5)


def golden_code(qam_order: int = 4, P: float = 1.0) -> SpaceTimeCode:
    if qam_order not in (4, 16):
        raise ValueError(f"Golden code supports 4- and 16-QAM, got {qam_order}")
    G = golden_generator()
    G = G / abs(np.linalg.det(G)) ** (1 / G.shape[0])
    return SpaceTimeCode("golden", 2, 2, LatticeBasis(G), qam_order, float(P))


CODES = {"vblast": vblast_code, "golden": golden_code}


def make_code(name: str, M: int = 2, T: int = 1, qam_order: int = 4, P: float = 1.0) -> SpaceTimeCode:
    """Build a code from its CLI identifier."""
    if name == "vblast":
        return vblast_code(M, T, qam_order, P)
    if name == "golden":
        if (M, T) != (2, 2):
            raise ValueError("the Golden code needs M = T = 2")
        return golden_code(qam_order, P)
    raise ValueError(f"unknown code {name!r}; valid: {sorted(CODES)}")


def coefficient_values(code: SpaceTimeCode) -> np.ndarray:
    lo, hi = code.coeff_range
    return np.arange(lo, hi + 1, 2)


def enumerate_coeffs(code: SpaceTimeCode, max_size: int = MAX_CODEBOOK) -> np.ndarray:
    """All coefficient vectors in lexicographic order, shape ``(size, 2MT)``."""
    if code.codebook_size > max_size:
        raise CodebookTooLargeError(f"codebook has {code.codebook_size} words (limit {max_size})")
    vals = coefficient_values(code)
    return np.array(list(itertools.product(vals, repeat=code.dim)), dtype=np.int64)


def enumerate_codebook(code: SpaceTimeCode, max_size: int = MAX_CODEBOOK) -> list[Codeword]:
    coeffs = enumerate_coeffs(code, max_size)
    signals = code.signal(coeffs)
    return [Codeword(c, s) for c, s in zip(coeffs, signals)]


def in_region(code: SpaceTimeCode, coeffs) -> bool:
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (code.dim,):
        raise ValueError(f"expected {code.dim} coefficients, got shape {coeffs.shape}")
    lo, hi = code.coeff_range
    return bool(np.all((coeffs >= lo) & (coeffs <= hi) & (coeffs % 2 != 0)))


def min_difference_determinant(code: SpaceTimeCode, scaled: bool = False) -> float:
    """Smallest ``|det(X - X')|`` over distinct codewords of a square code.

    Differences of codewords are exactly the images of the even difference
    vectors ``2k`` with ``|k_j| <= m - 1``, so the scan runs over that set.
    """
    if code.M != code.T:
        raise ValueError("determinants need square codewords")
    m = code.levels
    steps = np.arange(-2 * (m - 1), 2 * (m - 1) + 1, 2)
    n_diff = len(steps) ** code.dim
    if n_diff > 20 * MAX_CODEBOOK:
        raise CodebookTooLargeError(f"{n_diff} difference vectors")
    diffs = np.array(list(itertools.product(steps, repeat=code.dim)), dtype=float)
    diffs = diffs[np.any(diffs != 0, axis=1)]
    z = complexify_vector(diffs)
    scale = code.power_scale if scaled else 1.0
    X = np.swapaxes((scale * (z @ code.lattice.generator.T)).reshape(-1, code.T, code.M), -1, -2)
    return float(np.min(np.abs(np.linalg.det(X))))
