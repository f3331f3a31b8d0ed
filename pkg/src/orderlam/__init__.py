"""Order-induced branched surfaces and order-division laminations, computed combinatorially."""

__version__ = "0.1.0"
