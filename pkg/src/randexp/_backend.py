"""Kernel backend selection.

The compiled ``_ckernels`` module is used when it was built; otherwise, or when
the environment variable ``RANDEXP_PURE_PYTHON`` is set to a non-empty value,
the pure-Python ``_pykernels`` module is used.  Both expose the same functions.
"""

import importlib
import os

BACKENDS = ("cython", "python")
_MODULES = {"cython": "randexp._ckernels", "python": "randexp._pykernels"}


def load(name):
    """Import and return the kernel module for backend ``name``."""
    if name not in _MODULES:
        raise ValueError(f"unknown backend {name!r}; choose from {BACKENDS}")
    return importlib.import_module(_MODULES[name])


def available():
    """Names of the backends importable in this installation."""
    names = []
    for name in BACKENDS:
        try:
            load(name)
        except ImportError:
            continue
        names.append(name)
    return names


def _select():
    if not os.environ.get("RANDEXP_PURE_PYTHON"):
        try:
            return "cython", load("cython")
        except ImportError:
            pass
    return "python", load("python")


NAME, kernels = _select()
