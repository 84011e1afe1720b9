"""Joint BS / pinching-antenna transmission: placement, beamforming, SNR analysis."""

__version__ = "0.1.0"
