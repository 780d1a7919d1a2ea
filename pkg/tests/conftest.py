import pytest

from qkc.frontend import KernelRegistry

from helpers import KERNELS


@pytest.fixture
def registry() -> KernelRegistry:
    """A registry holding every kernel shipped in kernels/."""
    reg = KernelRegistry()
    for path in sorted(KERNELS.glob("*.qk")):
        reg.load_file(path)
    return reg
