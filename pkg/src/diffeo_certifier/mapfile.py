"""Map files: the components of F as text, with named parameters left open.

Line format::

    # name: t-family
    # any other comment
    n = 2
    F1 = x1 + x1^3 - t*x2^3
    F2 = x2 + x1^3 + x2^3

``.yaml``/``.yml`` files carry the same data under the keys ``name``, ``n``,
``components``, ``comments`` and an optional ``parameters`` mapping of
default values.
"""

import re
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import yaml
from pydantic import ValidationError, model_validator

from diffeo_certifier.common import FrozenModel, Rational, logger, parse_rational
from diffeo_certifier.exceptions import MapFileError
from diffeo_certifier.polynomial_parser import (
    PARAMETER_NAME,
    find_parameters,
    parse_polynomial,
    substitute_parameters,
)
from diffeo_certifier.polynomials import PolynomialMap

_DIMENSION_LINE = re.compile(r"^n\s*=\s*(\d+)$")
_COMPONENT_LINE = re.compile(r"^F(\d+)\s*=\s*(.+)$")
_NAME_COMMENT = re.compile(r"^#\s*name\s*:\s*(.+)$")


class MapFile(FrozenModel):
    dimension: int
    components: Tuple[str, ...]
    name: Optional[str] = None
    comments: Tuple[str, ...] = ()
    defaults: Dict[str, Rational] = {}
    source: Optional[str] = None

    @model_validator(mode="after")
    def _shape(self):
        if self.dimension < 1:
            raise ValueError("n must be at least 1")
        if len(self.components) != self.dimension:
            raise ValueError(f"{len(self.components)} components given for n = {self.dimension}")
        for key in self.defaults:
            if not PARAMETER_NAME.match(key):
                raise ValueError(f"invalid parameter name {key!r}")
        return self

    @property
    def parameters(self) -> List[str]:
        names: List[str] = []
        for text in self.components:
            for name in find_parameters(text):
                if name not in names:
                    names.append(name)
        return names

    @classmethod
    def load(cls, path: Union[str, Path]) -> "MapFile":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise MapFileError(f"cannot read map file {path}: {e}") from e
        if path.suffix in (".yaml", ".yml"):
            return cls.from_yaml(text, source=str(path))
        return cls.from_text(text, source=str(path))

    @classmethod
    def from_text(cls, text: str, source: Optional[str] = None) -> "MapFile":
        dimension = None
        name = None
        comments: List[str] = []
        components: Dict[int, str] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                match = _NAME_COMMENT.match(line)
                if match:
                    name = match.group(1).strip()
                else:
                    comments.append(line[1:].strip())
                continue
            match = _DIMENSION_LINE.match(line)
            if match:
                if dimension is not None:
                    raise MapFileError(f"line {number}: n is given twice")
                dimension = int(match.group(1))
                continue
            match = _COMPONENT_LINE.match(line)
            if match:
                index = int(match.group(1))
                if index in components:
                    raise MapFileError(f"line {number}: F{index} is given twice")
                components[index] = match.group(2).strip()
                continue
            raise MapFileError(f"line {number}: expected 'n = <int>' or 'F<i> = <polynomial>', got {line!r}")
        if dimension is None:
            raise MapFileError("map file has no 'n = <int>' line")
        missing = [i for i in range(1, dimension + 1) if i not in components]
        extra = [i for i in components if not 1 <= i <= dimension]
        if missing or extra:
            raise MapFileError(f"components must be F1..F{dimension}; missing {missing}, unexpected {extra}")
        return cls._build(
            dimension=dimension,
            components=tuple(components[i] for i in range(1, dimension + 1)),
            name=name,
            comments=tuple(comments),
            source=source,
        )

    @classmethod
    def from_yaml(cls, text: str, source: Optional[str] = None) -> "MapFile":
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise MapFileError(f"invalid YAML map file: {e}") from e
        if not isinstance(data, dict):
            raise MapFileError("a YAML map file must be a mapping")
        components = data.get("components") or []
        if not isinstance(components, list):
            raise MapFileError("'components' must be a list of polynomial strings")
        parameters = data.get("parameters") or {}
        try:
            defaults = {str(k): parse_rational(str(v)) for k, v in parameters.items()}
        except (TypeError, ValueError, AttributeError) as e:
            raise MapFileError(f"invalid parameter defaults: {e}") from e
        return cls._build(
            dimension=data.get("n", len(components)),
            components=tuple(str(c) for c in components),
            name=data.get("name"),
            comments=tuple(str(c) for c in data.get("comments") or ()),
            defaults=defaults,
            source=source,
        )

    @classmethod
    def _build(cls, **fields) -> "MapFile":
        try:
            return cls(**fields)
        except ValidationError as e:
            raise MapFileError(f"invalid map file: {e.errors()[0]['msg']}") from e

    def bindings(self, overrides: Optional[Mapping[str, Fraction]] = None) -> Dict[str, Fraction]:
        merged = dict(self.defaults)
        merged.update(overrides or {})
        return merged

    def resolved_components(self, overrides: Optional[Mapping[str, Fraction]] = None) -> Tuple[str, ...]:
        bindings = self.bindings(overrides)
        return tuple(substitute_parameters(text, bindings) for text in self.components)

    def resolve(self, overrides: Optional[Mapping[str, Fraction]] = None) -> PolynomialMap:
        """Bind every parameter and parse the components into F."""
        texts = self.resolved_components(overrides)
        logger.debug(f"resolved {self.name or self.source}: {texts}")
        return PolynomialMap([parse_polynomial(text, self.dimension) for text in texts])
