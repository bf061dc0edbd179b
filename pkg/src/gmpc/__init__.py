"""Simulator and protocol library for the server-plus-weak-users MPC model."""
__version__ = "0.1.0"
