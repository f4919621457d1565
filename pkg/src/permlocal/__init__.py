"""Local limits of uniform 231- and 321-avoiding permutations: exact laws,
samplers and Monte Carlo diagnostics."""

__version__ = "0.1.0"
