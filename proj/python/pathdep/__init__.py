"""Simulation and statistical verification of path-dependent SDEs with jumps."""

try:
    # installed layout: the extension lives inside the package
    from ._pathdep import *  # noqa: F401,F403
    from ._pathdep import __version__  # noqa: F401
except ImportError:
    # build-tree layout: the extension sits on sys.path
    from _pathdep import *  # noqa: F401,F403
    from _pathdep import __version__  # noqa: F401
