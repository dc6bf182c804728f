"""Noncolliding diffusions, random-matrix ensembles, determinantal kernels,
and Fredholm/Tracy-Widom numerics."""

__version__ = "0.1.0"
