from typing import Dict, List

from diffeo_certifier.circuits import CircuitNumber, WeightAssignment
from diffeo_certifier.common import Exponent
from diffeo_certifier.polynomials import Polynomial


class WeightingStrategy:
    """Chooses w(alpha*) > 0 for every degenerate exponent, with sum(w) <= 1."""

    name = "base"

    def assign(
        self, f: Polynomial, candidates: Dict[Exponent, List[CircuitNumber]]
    ) -> WeightAssignment:
        raise NotImplementedError
