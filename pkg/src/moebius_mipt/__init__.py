"""Non-unitary Gaussian circuits as per-momentum Moebius maps."""

__version__ = "0.1.0"
