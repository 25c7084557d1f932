"""Closed-form dynamics and nonclassicality diagnostics for a cavity
optomechanical system with a two-level atom."""

__version__ = "0.1.0"
