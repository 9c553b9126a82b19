"""Explicit uniform bounds in the central limit theorem for fixed and random sums.

Submodules: ``specfun`` (incomplete gamma), ``dists`` (summand laws),
``functionals`` (Lindeberg/Lyapunov fractions), ``constants`` (minimax
constants and their tables), ``limitlaws`` (normal, Laplace, variance-gamma,
Student and general mixtures), ``bounds`` (the bound evaluators),
``randomsums`` (exact and simulated ground truth) and ``cli``.
"""

__version__ = "0.1.0"
