"""Lattice QED on qubits: Pauli-string Hamiltonians, resources, circuits, dynamics."""

from lgt.pauli import PauliOperator, PauliString

__all__ = ["PauliOperator", "PauliString"]
__version__ = "0.1.0"
