"""Backward-sweep kernels with backend selection at import.

The compiled extension (_sweep, built from _sweep.pyx) is preferred; the
numpy reference implementation is the fallback and the semantic ground
truth.  Both produce bit-identical results.  Set HEVOPT_PURE_PYTHON=1 to
force the fallback (used by the benchmark and the twin tests).
"""

from __future__ import annotations

import os

from .reference import (
    interp_value_1d,
    interp_value_2d,
    snap_to_axis,
    sweep_stage_soc_only as _py_sweep_stage_soc_only,
    sweep_stage_two_state as _py_sweep_stage_two_state,
)

__all__ = [
    "BACKEND",
    "sweep_stage_two_state",
    "sweep_stage_soc_only",
    "interp_value_1d",
    "interp_value_2d",
    "snap_to_axis",
    "available_backends",
]

_compiled = None
if not os.environ.get("HEVOPT_PURE_PYTHON"):
    try:
        from . import _sweep as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

if _compiled is not None:
    BACKEND = "compiled"
    sweep_stage_two_state = _compiled.sweep_stage_two_state
    sweep_stage_soc_only = _compiled.sweep_stage_soc_only
else:
    BACKEND = "python"
    sweep_stage_two_state = _py_sweep_stage_two_state
    sweep_stage_soc_only = _py_sweep_stage_soc_only


def available_backends() -> dict:
    """Map backend name -> (two_state, soc_only) kernel pair, for benchmarks/tests."""
    out = {"python": (_py_sweep_stage_two_state, _py_sweep_stage_soc_only)}
    if _compiled is not None:
        out["compiled"] = (_compiled.sweep_stage_two_state, _compiled.sweep_stage_soc_only)
    return out
