"""Simulator and verification harness for oblivious transfer by single-qubit rotations."""

__version__ = "0.1.0"
