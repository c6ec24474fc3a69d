__version__ = "0.1.0"

from diffeo_certifier.certify import (  # noqa: E402
    CertifyOptions,
    Certifier,
    DiffeoReport,
    DiffeoVerdict,
    coercivity_verdict,
    diffeomorphism_verdict,
)
from diffeo_certifier.polynomial_parser import parse_polynomial  # noqa: E402
from diffeo_certifier.polynomials import Polynomial, PolynomialMap, RationalMatrix  # noqa: E402
