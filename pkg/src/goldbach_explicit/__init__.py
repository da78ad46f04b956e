"""Numerical checks of explicit formulas for Goldbach averages.

Modules: ``arith`` (sieves, characters), ``specfun`` (Gamma, Hurwitz zeta,
L-values), ``zeros`` (zeta and Dirichlet L zeros), ``goldbach`` (psi_2 and
the averages G_q, F_q), ``explicit`` (zero sums and residual records) and
``cli``.
"""

__version__ = "0.1.0"
