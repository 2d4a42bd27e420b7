"""Time-scale calculus and numerical checks of monotonicity rules for quotients."""

__version__ = "0.1.0"
