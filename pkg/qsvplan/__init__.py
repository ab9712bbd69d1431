"""Sample-complexity planner and verifier for quantum state verification."""

__version__ = "0.1.0"
