"""Kernel languages, instantiation and the runtime kernel registry."""

from .ast import KernelDef, KernelSignature, Param, ParamType, SourceLanguage
from .decompose import decompose_unitary
from .interpreter import DeferredBit, Interpreter, QReg, instantiate
from .parser import parse_kernels, parse_path, parse_qasm_file
from .registry import KernelHandle, KernelRegistry, default_registry, get_kernel, invoke, jit_compile
from .stdlib import iqft_instructions, qft_instructions

__all__ = [
    "KernelDef", "KernelSignature", "Param", "ParamType", "SourceLanguage", "decompose_unitary",
    "DeferredBit", "Interpreter", "QReg", "instantiate", "parse_kernels", "parse_path",
    "parse_qasm_file", "KernelHandle", "KernelRegistry", "default_registry", "get_kernel",
    "invoke", "jit_compile", "iqft_instructions", "qft_instructions",
]
