"""Split-form SBP discretizations of the GLM-MHD equations with
staggered-flux subcell limiting."""

__version__ = "0.1.0"

from .operators import (  # noqa: F401
    SbpOperator1D,
    ValidationReport,
    build_fd_sbp_operator,
    build_lgl_operator,
    verify_sbp,
)
from .physics import AdmissibilityError, EquationParams  # noqa: F401
from .mesh import Mesh2D, MetricData  # noqa: F401
