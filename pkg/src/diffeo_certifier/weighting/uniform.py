from fractions import Fraction
from typing import Dict, List

from diffeo_certifier.circuits import CircuitNumber, WeightAssignment
from diffeo_certifier.common import Exponent
from diffeo_certifier.polynomials import Polynomial
from diffeo_certifier.weighting.base import WeightingStrategy


class UniformWeights(WeightingStrategy):
    """w(alpha*) = 1 / |D(f)|."""

    name = "default"

    def assign(
        self, f: Polynomial, candidates: Dict[Exponent, List[CircuitNumber]]
    ) -> WeightAssignment:
        if not candidates:
            return WeightAssignment(strategy=self.name)
        share = Fraction(1, len(candidates))
        return WeightAssignment.of({alpha: share for alpha in candidates}, strategy=self.name)
