"""The three receivers: exact ML, naive lattice decoding, and LLL-aided Babai.

All three work on the real image of the received block. A codeword's odd
coefficients are written ``u = 2k - (m - 1)`` so the code becomes the box
``0 <= k <= m - 1`` of the lattice spanned by ``2 B`` (``B`` the received
generator), shifted by ``-(m - 1) B 1``:

* ``ml`` searches that box exactly (a bounded Schnorr-Euchner sphere search
  on the unreduced basis);
* ``nld`` finds the exact closest point of the whole infinite lattice and
  declares an error when it falls outside the box;
* ``lll`` replaces the exact search by Babai's nearest plane on an
  LLL-reduced basis, with the same region rule.
"""

from dataclasses import dataclass

import numpy as np

from nldsim import _kernels
from nldsim.channel import ChannelRealization, received_lattice
from nldsim.lattice import DEFAULT_DELTA, DEFAULT_MAX_NODES, EnumerationBudgetError, realify_vector
from nldsim.stcodes import SpaceTimeCode, in_region

DECODERS = ("ml", "nld", "lll")


@dataclass(frozen=True)
class DecodeOutcome:
    decoder_id: str
    decoded_coeffs: np.ndarray
    out_of_region: bool
    is_error: bool | None  # None when the sent word was not supplied


def check_decoder(decoder_id: str) -> str:
    if decoder_id not in DECODERS:
        raise ValueError(f"unknown decoder {decoder_id!r}; valid: {', '.join(DECODERS)}")
    return decoder_id


def decode_batch(decoder_id: str, code: SpaceTimeCode, Bs: np.ndarray, ys: np.ndarray,
                 max_nodes: int = DEFAULT_MAX_NODES, delta: float = DEFAULT_DELTA) -> np.ndarray:
    """Decode a stack of received blocks.

    ``Bs`` holds the real received generators ``(K, 2NT, 2MT)`` (power scale
    included) and ``ys`` the realified received vectors ``(K, 2NT)``. Returns
    the decoded odd coefficient vectors ``(K, 2MT)``; for ``nld``/``lll``
    these may lie outside the code region.
    """
    check_decoder(decoder_id)
    m = code.levels
    n = Bs.shape[-1]
    shift = (m - 1) * Bs.sum(axis=-1)
    ts = np.ascontiguousarray(ys + shift)
    B2 = np.ascontiguousarray(2.0 * Bs)
    if decoder_id == "lll":
        k = _kernels.batch_lll_babai(B2, ts, delta)
    else:
        if decoder_id == "ml":
            lo = np.zeros(n, dtype=np.int64)
            hi = np.full(n, m - 1, dtype=np.int64)
        else:
            lo = np.full(n, -_kernels.UNBOUNDED, dtype=np.int64)
            hi = np.full(n, _kernels.UNBOUNDED, dtype=np.int64)
        k, status = _kernels.batch_closest(B2, ts, lo, hi, decoder_id == "nld", delta, max_nodes)
        bad = np.flatnonzero(status != _kernels.OK)
        if bad.size:
            err = EnumerationBudgetError(f"{decoder_id} search exceeded {max_nodes} nodes at batch row {bad[0]}")
            err.row = int(bad[0])
            raise err
    return 2 * k - (m - 1)


def _decode_one(decoder_id, code, chan, y, sent, max_nodes):
    if chan.M != code.M or chan.T != code.T:
        raise ValueError("channel and code dimensions differ")
    B = received_lattice(code, chan).generator
    u = decode_batch(decoder_id, code, B[np.newaxis], realify_vector(np.asarray(y, dtype=complex))[np.newaxis],
                     max_nodes=max_nodes)[0]
    outside = not in_region(code, u)
    if sent is None:
        err = True if outside else None
    else:
        err = outside or not np.array_equal(u, np.asarray(sent))
    return DecodeOutcome(decoder_id, u, outside, err)


def ml_decode(code: SpaceTimeCode, chan: ChannelRealization, y, sent=None,
              max_nodes: int = DEFAULT_MAX_NODES) -> DecodeOutcome:
    """Closest codeword of the finite code; ties go to the smaller coefficients."""
    return _decode_one("ml", code, chan, y, sent, max_nodes)


def naive_lattice_decode(code: SpaceTimeCode, chan: ChannelRealization, y, sent=None,
                         max_nodes: int = DEFAULT_MAX_NODES) -> DecodeOutcome:
    """Closest point of the infinite received lattice, then the region check."""
    return _decode_one("nld", code, chan, y, sent, max_nodes)


def lll_aided_decode(code: SpaceTimeCode, chan: ChannelRealization, y, sent=None) -> DecodeOutcome:
    """Babai nearest plane on the LLL-reduced received lattice, then the region check."""
    return _decode_one("lll", code, chan, y, sent, DEFAULT_MAX_NODES)


DECODE = {"ml": ml_decode, "nld": naive_lattice_decode, "lll": lll_aided_decode}
