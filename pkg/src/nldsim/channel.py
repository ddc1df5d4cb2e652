"""Quasi-static Rayleigh block fading with additive white Gaussian noise.

One ``N x M`` channel ``H`` is drawn per codeword block and stays fixed over
the block's ``T`` channel uses, so the block sees ``H_T = diag(H, ..., H)``.
SNR sweeps keep the noise variance at 1 and move the transmit power:
``rho = M P / sigma^2``.
"""

import math
from dataclasses import dataclass

import numpy as np

from nldsim.lattice import LatticeBasis, realify_matrix
from nldsim.linalg import block_diagonal_lift, sample_gaussian_matrix, singular_values
from nldsim.stcodes import Codeword, SpaceTimeCode


class SingularChannelError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelRealization:
    H: np.ndarray
    H_T: np.ndarray
    sigma: np.ndarray  # ascending singular values of H

    @classmethod
    def from_matrix(cls, H, T: int) -> "ChannelRealization":
        H = np.asarray(H, dtype=complex)
        return cls(H, block_diagonal_lift(H, T), singular_values(H))

    @property
    def N(self) -> int:
        return self.H.shape[0]

    @property
    def M(self) -> int:
        return self.H.shape[1]

    @property
    def T(self) -> int:
        return self.H_T.shape[1] // self.H.shape[1]


@dataclass(frozen=True)
class SnrPoint:
    rho: float
    P: float
    noise_var: float = 1.0

    @classmethod
    def from_rho(cls, rho: float, M: int, noise_var: float = 1.0) -> "SnrPoint":
        return cls(float(rho), rho * noise_var / M, float(noise_var))

    @classmethod
    def from_db(cls, snr_db: float, M: int, noise_var: float = 1.0) -> "SnrPoint":
        return cls.from_rho(10.0 ** (snr_db / 10.0), M, noise_var)

    @property
    def db(self) -> float:
        return 10.0 * math.log10(self.rho)


def draw_channel(M: int, N: int, T: int, rng: np.random.Generator) -> ChannelRealization:
    if M > N:
        raise ValueError(f"M = {M} > N = {N} is outside the modeled range")
    return ChannelRealization.from_matrix(sample_gaussian_matrix(N, M, rng), T)


def vec(X: np.ndarray) -> np.ndarray:
    """Stack the columns of ``X`` (or of each matrix in a stack)."""
    X = np.asarray(X)
    return np.swapaxes(X, -1, -2).reshape(X.shape[:-2] + (-1,))


def transmit(code: SpaceTimeCode, word: Codeword, chan: ChannelRealization, snr: SnrPoint,
             rng: np.random.Generator) -> np.ndarray:
    """Received block ``y = H_T vec(X) + w`` of length ``N T``.

    ``code`` must already carry the power of ``snr`` (see
    :meth:`SpaceTimeCode.with_power`).
    """
    if not math.isclose(code.P, snr.P, rel_tol=1e-12):
        raise ValueError(f"code power {code.P} does not match SNR point power {snr.P}")
    if chan.M != code.M or chan.T != code.T:
        raise ValueError("channel and code dimensions differ")
    y = chan.H_T @ vec(word.signal)
    if snr.noise_var > 0:
        y = y + math.sqrt(snr.noise_var) * sample_gaussian_matrix(len(y), 1, rng)[:, 0]
    return y


def received_lattice(code: SpaceTimeCode, chan: ChannelRealization) -> LatticeBasis:
    """Real basis of ``H_T (power_scale L)``."""
    G = chan.H_T @ (code.power_scale * code.lattice.generator)
    sv = np.linalg.svd(G, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise SingularChannelError("channel is numerically singular")
    return LatticeBasis(realify_matrix(G))


def received_generators(code: SpaceTimeCode, H: np.ndarray) -> np.ndarray:
    """Real received-lattice bases for a stack of channels ``(K, N, M)``."""
    H_T = block_diagonal_lift(H, code.T)
    return realify_matrix(H_T @ (code.power_scale * code.lattice.generator))
