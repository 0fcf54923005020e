"""Exact certification of Duistermaat-Heckman log-concavity for complexity-two actions."""

__version__ = "1.0.0"
