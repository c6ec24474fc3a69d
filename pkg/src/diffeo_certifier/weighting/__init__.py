from typing import Dict, Type

from diffeo_certifier.common import logger
from diffeo_certifier.exceptions import UnknownStrategyError
from diffeo_certifier.weighting.base import WeightingStrategy
from diffeo_certifier.weighting.proportional import ProportionalWeights
from diffeo_certifier.weighting.uniform import UniformWeights

WEIGHT_STRATEGY_MAP: Dict[str, Type[WeightingStrategy]] = {
    "default": UniformWeights,
    "uniform": UniformWeights,
    "proportional": ProportionalWeights,
}


def get_weighting(name: str) -> WeightingStrategy:
    strategy_class = WEIGHT_STRATEGY_MAP.get(name)
    if strategy_class is None:
        raise UnknownStrategyError(
            f"Weight strategy '{name}' is not implemented; "
            f"choose one of {sorted(WEIGHT_STRATEGY_MAP)}"
        )
    logger.debug(f"Using {strategy_class.__name__} weights")
    return strategy_class()
