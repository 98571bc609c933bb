"""erdset - random affine-copy-avoiding sets in [0,1]^d, built and checked at desk scale."""

__version__ = "1.0.0"
