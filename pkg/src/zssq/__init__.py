"""Zero-sum squares in {-1,+1} matrices: checking, search, SAT verification."""

__version__ = "0.1.0"
