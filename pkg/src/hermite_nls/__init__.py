"""Hermite-spectral tools for the harmonic oscillator and cubic NLS with random data."""
__version__ = "0.1.0"
