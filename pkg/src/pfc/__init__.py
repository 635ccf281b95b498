"""Compile ZX diagrams to deterministically runnable Pauli Fusion procedures."""
