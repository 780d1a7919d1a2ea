"""qkc: a retargetable quantum-kernel compiler and hybrid runtime."""

__version__ = "0.1.0"
