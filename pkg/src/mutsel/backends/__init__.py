"""Numeric kernels with a compiled fast path.

The CART split search and the Pegasos update loop dominate runtime, so
both exist twice: ``_compiled`` (a Cython extension built at install
time) and ``py`` (pure numpy). They produce bit-identical results; the
compiled build disables FP contraction to keep it that way.

Selection happens once at import: the extension if it imported, numpy
otherwise. Set MUTSEL_BACKEND=python or MUTSEL_BACKEND=compiled to force
a choice (the latter raises if the extension is missing).
"""

import os

from . import py as _py

_requested = os.environ.get("MUTSEL_BACKEND", "auto").strip().lower()
_impl = None
if _requested in ("auto", "", "compiled"):
    try:
        from . import _compiled as _impl
    except ImportError:
        if _requested == "compiled":
            raise RuntimeError(
                "MUTSEL_BACKEND=compiled but the extension is not built"
            ) from None
        _impl = None
elif _requested != "python":
    raise RuntimeError(
        "MUTSEL_BACKEND must be auto, python or compiled, got %r"
        % _requested
    )
if _impl is None:
    _impl = _py

grow_tree = _impl.grow_tree
predict_tree = _impl.predict_tree
pegasos = _impl.pegasos


def backend_name():
    """'compiled' when the extension is active, else 'python'."""
    return "python" if _impl is _py else "compiled"
