"""Backend selection for the descent kernel.

Imports the compiled extension when present and falls back to the
pure-python twin otherwise.  Both expose the same descend/eval_potential
surface and implement the same arithmetic, so results agree to rounding.
"""

from . import _kernels_py as _pure

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_active = _compiled if _compiled is not None else _pure

CONVERGED = _pure.CONVERGED
MAXITER = _pure.MAXITER
STALLED = _pure.STALLED


def backend() -> str:
    """Name of the active backend: "compiled" or "python"."""
    return "python" if _active is _pure else "compiled"


def available_backends() -> tuple:
    return ("python",) if _compiled is None else ("compiled", "python")


def use_backend(name: str) -> str:
    """Switch backends (mainly for tests and benchmarks); returns the
    previously active name."""
    global _active
    previous = backend()
    if name == "python":
        _active = _pure
    elif name == "compiled":
        if _compiled is None:
            raise ValueError("compiled kernel is not available")
        _active = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous


def descend(v, w, u, gtol, max_iter):
    return _active.descend(v, w, u, gtol, max_iter)


def eval_potential(v, w, u):
    return _active.eval_potential(v, w, u)
