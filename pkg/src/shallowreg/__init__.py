"""Penalized two-layer network regression toolkit.

Library surface:

* :mod:`shallowreg.data` -- seeded synthetic datasets (sphere, ball,
  zero-noise and two-term sphere models).
* :mod:`shallowreg.netcore` -- networks, penalties, truncation and the
  exact 1-D piecewise-linear ReLU interpolant.
* :mod:`shallowreg.fit` -- alternating ridge (ReLU, summed L2 penalty) and
  the lasso/gradient block scheme (sigmoid, outer L1 penalty).
* :mod:`shallowreg.complexity` -- Monte-Carlo Rademacher/Gaussian
  complexity estimates of penalty balls.
* :mod:`shallowreg.theory` -- closed-form risk-bound curves, shape
  classification and breakpoints.
* :mod:`shallowreg.metrics` -- empirical/prediction errors, aggregation.
* :mod:`shallowreg.cli` -- the ``shallowreg`` experiment harness.

The hot kernels run on a compiled extension when available; see
``shallowreg.backend()``.
"""

from . import _kernels

__version__ = "0.1.0"


def backend() -> str:
    """Name of the active kernel backend ('c-ext' or 'numpy')."""
    return _kernels.BACKEND
