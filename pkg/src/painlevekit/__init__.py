"""High-precision Painleve V model problems, limiting kernels and finite-n oracles."""

__version__ = "0.1.0"
