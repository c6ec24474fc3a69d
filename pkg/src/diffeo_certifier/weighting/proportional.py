from fractions import Fraction
from typing import Dict, List

from diffeo_certifier.circuits import CircuitNumber, WeightAssignment, sufficient_inequality
from diffeo_certifier.common import Exponent, is_even, logger
from diffeo_certifier.polynomials import Polynomial
from diffeo_certifier.weighting.base import WeightingStrategy
from diffeo_certifier.weighting.uniform import UniformWeights

_FLOOR = Fraction(1, 10**9)


class ProportionalWeights(WeightingStrategy):
    """Give each alpha* the weight it needs, then spread the slack evenly.

    alpha* needs w > |f_a*| / Theta (nothing if alpha* is even and
    f_a* >= 0). The ratios are estimated from the float hints, rounded to
    rationals, and the result is re-checked exactly; if the check fails, or
    the needs already exceed 1, the uniform assignment is returned instead.
    """

    name = "proportional"

    def assign(
        self, f: Polynomial, candidates: Dict[Exponent, List[CircuitNumber]]
    ) -> WeightAssignment:
        uniform = UniformWeights().assign(f, candidates)
        if not candidates:
            return uniform
        needs: Dict[Exponent, float] = {}
        for alpha, circuits in candidates.items():
            coeff = f.coefficient(alpha)
            if is_even(alpha) and coeff >= 0:
                needs[alpha] = 0.0
            else:
                needs[alpha] = min(float(abs(coeff)) / c.float_hint for c in circuits)
        total = sum(needs.values())
        if total >= 1:
            logger.debug(f"weight needs sum to {total:.6g}; keeping uniform weights")
            return uniform
        slack = (1 - total) / len(needs)
        weights = {
            alpha: max(Fraction(need + slack).limit_denominator(10**9), _FLOOR)
            for alpha, need in needs.items()
        }
        weight_sum = sum(weights.values())
        if weight_sum > 1:
            weights = {alpha: w / weight_sum for alpha, w in weights.items()}
        for alpha, circuits in candidates.items():
            if not any(
                sufficient_inequality(f, c, weights[alpha], is_even(alpha)) for c in circuits
            ):
                logger.debug(f"proportional weight for {alpha} fails the exact check")
                return uniform
        return WeightAssignment.of(weights, strategy=self.name)
