"""Exact integer algorithms under a unit-cost RAM with division and bitwise AND."""

__version__ = "0.1.0"
COST_MODEL_REVISION = 1
