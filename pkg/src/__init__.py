"""Kinetic-wave ISP - forcing-term reconstruction from final-time wave data."""
__version__ = "1.0.0"
