"""Selects the compiled panel-summation kernel, falling back to numpy."""

try:
    from . import _panelsum as _impl

    COMPILED = True
except ImportError:  # extension not built; use the slow path
    from . import _panelsum_py as _impl

    COMPILED = False

accumulate = _impl.accumulate


def backend_name():
    return "compiled" if COMPILED else "numpy"
