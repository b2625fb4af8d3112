"""Variational quantum imaginary-time evolution for the 1D Maxwell equations."""
