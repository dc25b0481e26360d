"""Scalable lossless coding of integer volumes with graph-based MCTF.

Frame pairs are filtered along a per-pixel motion graph (Haar lifting with
the optimal update), the motion map is masked, subsampled and interpolated
at the decoder, and the LP/HP frames are coded losslessly.  The LP frames
alone form a half-frame-rate base layer.
"""

from ._accel import NUMBA_ENABLED
from .codec import CodecConfig, decode_volume, encode_volume, read_container
from .entropy.rangecoder import CorruptStreamError
from .graph_mc import ReducedAdjacency, estimate_motion
from .lifting import SubbandPair, haar_forward, haar_inverse, mctf_forward, mctf_inverse
from .metrics import psnr, psnr_lpt, rate_report
from .volume_io import Volume, load_volume, save_volume

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED",
    "CodecConfig",
    "CorruptStreamError",
    "ReducedAdjacency",
    "SubbandPair",
    "Volume",
    "decode_volume",
    "encode_volume",
    "estimate_motion",
    "haar_forward",
    "haar_inverse",
    "load_volume",
    "mctf_forward",
    "mctf_inverse",
    "psnr",
    "psnr_lpt",
    "rate_report",
    "read_container",
    "save_volume",
]
