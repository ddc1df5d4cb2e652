"""Naive lattice decoding versus ML for lattice space-time codes on Rayleigh MIMO channels."""

from nldsim.channel import ChannelRealization, SnrPoint, draw_channel, transmit
from nldsim.decoders import DECODERS, DecodeOutcome, lll_aided_decode, ml_decode, naive_lattice_decode
from nldsim.lattice import (
    EnumerationBudgetError,
    LatticeBasis,
    closest_vector,
    count_points_in_ball,
    lll_reduce,
    realify,
    shortest_vector,
    volume,
)
from nldsim.stcodes import SpaceTimeCode, golden_code, make_code, vblast_code

__version__ = "0.1.0"

__all__ = [
    "ChannelRealization",
    "DECODERS",
    "DecodeOutcome",
    "EnumerationBudgetError",
    "LatticeBasis",
    "SnrPoint",
    "SpaceTimeCode",
    "closest_vector",
    "count_points_in_ball",
    "draw_channel",
    "golden_code",
    "lll_aided_decode",
    "lll_reduce",
    "make_code",
    "ml_decode",
    "naive_lattice_decode",
    "realify",
    "shortest_vector",
    "transmit",
    "vblast_code",
    "volume",
]
