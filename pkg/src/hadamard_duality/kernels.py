"""Select the compiled kernel backend when available.

Set ``HADAMARD_DUALITY_PURE_PYTHON=1`` to force the NumPy fallback.
"""
import os

from . import _pykernels

if os.environ.get("HADAMARD_DUALITY_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

mink_dot = _impl.mink_dot
hyp_dist = _impl.hyp_dist
hyp_log = _impl.hyp_log
hyp_exp = _impl.hyp_exp
spd_sqrt_pair = _impl.spd_sqrt_pair
spd_log_f = _impl.spd_log_f
spd_exp_f = _impl.spd_exp_f
spd_dist_f = _impl.spd_dist_f

__all__ = [
    "BACKEND", "mink_dot", "hyp_dist", "hyp_log", "hyp_exp",
    "spd_sqrt_pair", "spd_log_f", "spd_exp_f", "spd_dist_f",
]
