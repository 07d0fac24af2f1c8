"""Numerics for scalar fields on Moyal space.

Subpackages cover the truncated matrix base (`algebra`), grid sampling and
the FFT star product (`grid`), the Grosse-Wulkenhaar model (`gw`), Noether
currents and tensors (`noether`), mollifier smoothing (`mollifier`), the
trajectory-space constrained dynamics (`hamiltonian`) and a reporting CLI
(`cli`).
"""

from .algebra import AlgebraSpec, MatrixField
from .grid import GridSpec, GridField
from .gw import GWParams

__all__ = ["AlgebraSpec", "MatrixField", "GridSpec", "GridField", "GWParams"]

__version__ = "0.1.0"
