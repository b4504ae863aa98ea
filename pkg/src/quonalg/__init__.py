"""Quon algebra with operator parameter: Wick normal ordering and a Fock-space model."""
__version__ = "0.1.0"
