"""Learning Hamiltonian vector fields from noisy data.

The package fits vector fields f(x) = J grad H(x) to (state, state
derivative) samples by vector-valued kernel ridge regression.  Structural
knowledge enters through the kernel: curl-free and symplectic
operator-valued kernels constrain every candidate field to be a gradient
or a Hamiltonian field, and odd/even parity transforms encode reflection
symmetry.  Each kernel has a random Fourier feature approximation for
large sample counts.

Submodules are imported lazily so the command line entry point can pin
BLAS thread counts before numpy loads.
"""

from importlib import import_module

__version__ = "0.1.0"

_SUBMODULES = (
    "cli",
    "config",
    "errors",
    "experiments",
    "features",
    "io",
    "kernels",
    "metrics",
    "model",
    "plots",
    "sim",
    "systems",
    "tuning",
)

__all__ = list(_SUBMODULES) + ["__version__"]


def __getattr__(name):
    if name in _SUBMODULES:
        module = import_module(f".{name}", __name__)
        globals()[name] = module
        return module
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(__all__)
