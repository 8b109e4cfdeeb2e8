"""Rational homotopy K-theory and K-regularity of simplicial toric varieties."""

__version__ = "0.1.0"

from .fan import Cone, Fan, make_projective_space_fan, make_wps_fan  # noqa: E402
from .kh import compare_kh, kh_multiplicities  # noqa: E402
from .regularity import regularity_report  # noqa: E402

__all__ = ["Cone", "Fan", "make_projective_space_fan", "make_wps_fan", "compare_kh",
           "kh_multiplicities", "regularity_report", "__version__"]
