"""Kernel backend selection.

The two simulation kernels exist in a numba-jitted variant and a pure-numpy
variant. Which one backs the public API is decided once, at import time,
from the DUALRATE_BACKEND environment variable:

    auto   (default) use numba when importable, numpy otherwise
    numba  require numba, fail loudly if it is missing
    numpy  force the pure-numpy path
"""
import os

ENV_VAR = "DUALRATE_BACKEND"


def selected_backend() -> str:
    """Resolve the backend name, one of 'numba' or 'numpy'."""
    value = os.environ.get(ENV_VAR, "auto").strip().lower() or "auto"
    if value == "numpy":
        return "numpy"
    if value == "numba":
        import numba  # noqa: F401  — fail here if unavailable
        return "numba"
    if value == "auto":
        try:
            import numba  # noqa: F401
        except ImportError:
            return "numpy"
        return "numba"
    raise ValueError(
        f"unknown {ENV_VAR}={value!r}; expected 'auto', 'numba' or 'numpy'"
    )
