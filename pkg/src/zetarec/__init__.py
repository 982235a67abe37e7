"""Numerical experiments on self-approximation of the Riemann zeta function.

Submodules
----------
primes     prime tables and exact factorizations
zetaeval   zeta / truncated Euler product evaluation with tracked error
mollifier  smoothed Dirichlet series and the mean-approximation gap
torus      Haar sampling of unit-phase assignments, support witnesses
kronecker  simultaneous phase windows: scans, lattice search, densities
scanner    recurrence density estimates and ensemble comparisons
cli        command-line front end and result persistence
kernels    compiled/NumPy hot loops (backend chosen at import)
"""

__version__ = "0.1.0"

from .kernels import BACKEND as KERNEL_BACKEND

__all__ = ["KERNEL_BACKEND", "__version__"]
