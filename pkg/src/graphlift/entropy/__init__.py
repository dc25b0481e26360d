"""Scanning and entropy coding of motion information."""

from .bilevel import bilevel_decode, bilevel_encode
from .hilbert import curve_order, delete_zeros, hilbert_scan, hilbert_unscan, reinsert_zeros, scan_order
from .rangecoder import CorruptStreamError, ac_decode, ac_encode

__all__ = [
    "CorruptStreamError",
    "ac_decode",
    "ac_encode",
    "bilevel_decode",
    "bilevel_encode",
    "curve_order",
    "delete_zeros",
    "hilbert_scan",
    "hilbert_unscan",
    "reinsert_zeros",
    "scan_order",
]
