"""Partial sums of Fourier coefficients of level-one cusp forms.

Exact and floating-point q-expansions, Dirichlet series built from the
coefficients and their partial sums, vertical-line quadrature for the
identities relating them, and the smoothed second-moment experiment.
"""

__version__ = "0.1.0"

from .errors import CuspsumError  # noqa: E402
from .qseries import QExpansion, delta_qexp, eigenform, eisenstein  # noqa: E402
from .sums import PartialSumSeries, partial_sums  # noqa: E402

__all__ = [
    "CuspsumError", "QExpansion", "PartialSumSeries", "delta_qexp", "eigenform",
    "eisenstein", "partial_sums", "__version__",
]
