"""Backend selection for the hot vector kernels.

The modular vector arithmetic (translation, affine compose/apply,
identity pair scans) sits in the innermost loops of table reduction and
loop detection, so it has a compiled implementation with a pure-Python
twin.  The compiled backend is used when built; set
``FLOWSPACE_BACKEND=pure`` or ``=compiled`` to force a side (the
benchmark uses this to compare both).
"""

import os

_requested = os.environ.get("FLOWSPACE_BACKEND", "").strip().lower()

if _requested == "pure":
    from flowspace._kernels import pure as _impl
elif _requested == "compiled":
    from flowspace._kernels import _speedups as _impl
elif _requested:
    raise ValueError(f"FLOWSPACE_BACKEND must be 'pure' or 'compiled', not {_requested!r}")
else:
    try:
        from flowspace._kernels import _speedups as _impl
    except ImportError:
        from flowspace._kernels import pure as _impl

BACKEND = "compiled" if _impl.__name__.endswith("_speedups") else "pure"

translate = _impl.translate
compose = _impl.compose
apply = _impl.apply
negate = _impl.negate
is_identity = _impl.is_identity
inverse_pairs = _impl.inverse_pairs
