"""Successive-cancellation kernel backends.

Two implementations of the same contract live here: a Cython extension
(`_fast`) for production sweeps and a vectorised numpy reference
(`_reference`). The compiled module is preferred when importable; set
POLAROOK_BACKEND=py to force the reference, POLAROOK_BACKEND=c to require
the extension.

Contract (shared by both backends, natural codeword order, LLRs are
log(P[0]/P[1])):

``sc_pass(llr0, actions, forced, uniforms=None, exact_f=True, out_llr=None,
out_surprisal=None, out_error=None) -> u``
    One successive pass over all N positions. Per-position actions:
    FORCE (take forced[i]), DECIDE (sign of the decision LLR), RANDOM
    (draw against sigmoid(LLR) consuming uniforms[i]), GENIE (decide,
    record a mismatch against forced[i] in out_error, then take forced[i]).
    Optional outputs collect the decision LLR and the surprisal
    -log2 P(u_i | prefix) per position.

``mimic_pass(llr_channel, prior_llr_value, actions, forced, uniforms,
exact_f=True) -> u``
    Dual-recursion pass reconstructing rule-driven positions from the
    prior-only recursion (RANDOM, replaying uniforms) while DECIDE positions
    come from the channel recursion.

``scl_pass(llr0, actions, forced, list_size, exact_f=True,
exact_metric=True) -> (us, metrics)``
    List pass: BRANCH positions fork every path on both bit values, pruned
    to the `list_size` lowest metrics (ties by path rank, then bit); FORCE
    positions extend all paths with forced[i]. Returns surviving input
    vectors sorted by metric, ties by path rank.
"""

from __future__ import annotations

import os
import warnings

FORCE, DECIDE, RANDOM, GENIE = 0, 1, 2, 3
BRANCH = 1

_choice = os.environ.get("POLAROOK_BACKEND", "auto").lower()

if _choice in ("py", "python", "reference"):
    from . import _reference as _impl

    BACKEND = "python"
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        if _choice in ("c", "compiled", "fast"):
            raise ImportError(
                "POLAROOK_BACKEND=c requested but the compiled kernel is not "
                "built; run `pip install -e . --no-build-isolation`"
            )
        warnings.warn(
            "compiled polarook kernels unavailable; using the numpy reference "
            "backend (slow for FER sweeps)",
            RuntimeWarning,
            stacklevel=2,
        )
        from . import _reference as _impl

        BACKEND = "python"

sc_pass = _impl.sc_pass
mimic_pass = _impl.mimic_pass
scl_pass = _impl.scl_pass

__all__ = [
    "BACKEND",
    "FORCE",
    "DECIDE",
    "RANDOM",
    "GENIE",
    "BRANCH",
    "sc_pass",
    "mimic_pass",
    "scl_pass",
]
