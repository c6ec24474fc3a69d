"""Exact sparse multivariate polynomials over the rationals.

A polynomial in n variables is a mapping from exponent tuples to nonzero
``Fraction`` coefficients, so the key set of the mapping is the support A(f).
Every constructor and operation prunes zero coefficients.

    x1^2*x2 + 3   (n = 2)   ->   {(2, 1): 1, (0, 0): 3}
"""

from fractions import Fraction
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union

from pydantic import field_validator

from diffeo_certifier.common import (
    Exponent,
    FrozenModel,
    Rational,
    format_rational,
    grlex_key,
    sort_grlex,
)
from diffeo_certifier.exceptions import (
    DimensionMismatchError,
    SingularMatrixError,
    VariableIndexError,
)
from diffeo_certifier import linear_algebra

Scalar = Union[int, Fraction]


class Polynomial:
    __slots__ = ("dimension", "_terms", "_hash")

    def __init__(self, dimension: int, terms: Mapping[Sequence[int], Scalar] = None):
        if dimension < 1:
            raise DimensionMismatchError(f"dimension must be >= 1, got {dimension}")
        self.dimension = dimension
        collected: Dict[Exponent, Fraction] = {}
        for alpha, coeff in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != dimension:
                raise DimensionMismatchError(
                    f"exponent {alpha} does not have length {dimension}"
                )
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent in {alpha}")
            collected[alpha] = collected.get(alpha, Fraction(0)) + Fraction(coeff)
        self._terms = {a: c for a, c in collected.items() if c != 0}
        self._hash = None

    @classmethod
    def _trusted(cls, dimension: int, terms: Dict[Exponent, Fraction]) -> "Polynomial":
        # callers guarantee tuple keys of the right length; zeros still pruned
        poly = cls.__new__(cls)
        poly.dimension = dimension
        poly._terms = {a: c for a, c in terms.items() if c != 0}
        poly._hash = None
        return poly

    @classmethod
    def zero(cls, dimension: int) -> "Polynomial":
        return cls._trusted(dimension, {})

    @classmethod
    def constant(cls, dimension: int, value: Scalar) -> "Polynomial":
        return cls._trusted(dimension, {(0,) * dimension: Fraction(value)})

    @classmethod
    def variable(cls, dimension: int, index: int) -> "Polynomial":
        """The coordinate x_index (1-based)."""
        return cls.monomial(dimension, unit_vector(dimension, index))

    @classmethod
    def monomial(cls, dimension: int, alpha: Sequence[int], coeff: Scalar = 1) -> "Polynomial":
        return cls(dimension, {tuple(alpha): coeff})

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return MappingProxyType(self._terms)

    @property
    def support(self) -> Tuple[Exponent, ...]:
        """A(f), graded-lexicographically sorted."""
        return sort_grlex(self._terms)

    def support_with_origin(self) -> Tuple[Exponent, ...]:
        """A_0(f) = A(f) together with the origin."""
        return sort_grlex(set(self._terms) | {(0,) * self.dimension})

    def coefficient(self, alpha: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(alpha), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self._terms), default=0)

    def restrict(self, exponents: Iterable[Sequence[int]]) -> "Polynomial":
        """f^W: the terms of f whose exponents lie in W."""
        keep = {tuple(a) for a in exponents}
        return Polynomial._trusted(
            self.dimension, {a: c for a, c in self._terms.items() if a in keep}
        )

    def __iter__(self) -> Iterator[Tuple[Exponent, Fraction]]:
        for alpha in sorted(self._terms, key=grlex_key, reverse=True):
            yield alpha, self._terms[alpha]

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.dimension == other.dimension and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.dimension, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dimension, frozenset(self._terms.items())))
        return self._hash

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out = dict(self._terms)
        for alpha, coeff in other._terms.items():
            out[alpha] = out.get(alpha, Fraction(0)) + coeff
        return Polynomial._trusted(self.dimension, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._trusted(self.dimension, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return scale(self, other)
        return multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative powers are not polynomials")
        result = Polynomial.constant(self.dimension, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = multiply(result, base)
            exponent >>= 1
            if exponent:
                base = multiply(base, base)
        return result

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            _check_same_dimension(self, other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.dimension, other)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __call__(self, point: Sequence[Scalar]) -> Fraction:
        return evaluate(self, point)

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial(n={self.dimension}, {format_polynomial(self)!r})"


class PolynomialMap:
    """F = (F_1, ..., F_n) with every component in n variables."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[Polynomial]):
        components = tuple(components)
        if not components:
            raise DimensionMismatchError("a polynomial map needs at least one component")
        n = len(components)
        for i, component in enumerate(components, start=1):
            if component.dimension != n:
                raise DimensionMismatchError(
                    f"component F{i} lives in {component.dimension} variables, "
                    f"but the map has {n} components"
                )
        self.components: Tuple[Polynomial, ...] = components

    @property
    def dimension(self) -> int:
        return len(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[Polynomial]:
        return iter(self.components)

    def __getitem__(self, index: int) -> Polynomial:
        return self.components[index]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolynomialMap):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __call__(self, point: Sequence[Scalar]) -> Tuple[Fraction, ...]:
        return tuple(evaluate(component, point) for component in self.components)

    def __str__(self) -> str:
        return "; ".join(f"F{i} = {c}" for i, c in enumerate(self.components, start=1))

    def __repr__(self) -> str:
        return f"PolynomialMap({self})"


class RationalMatrix(FrozenModel):
    entries: Tuple[Tuple[Rational, ...], ...]

    @field_validator("entries")
    @classmethod
    def _square(cls, entries):
        n = len(entries)
        if n == 0 or any(len(row) != n for row in entries):
            raise ValueError("a RationalMatrix must be square and nonempty")
        return entries

    @classmethod
    def of(cls, rows: Sequence[Sequence[Scalar]]) -> "RationalMatrix":
        return cls(entries=tuple(tuple(Fraction(v) for v in row) for row in rows))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls.of([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def size(self) -> int:
        return len(self.entries)

    def determinant(self) -> Fraction:
        return linear_algebra.determinant(self.entries)

    def is_regular(self) -> bool:
        return self.determinant() != 0

    def inverse(self) -> "RationalMatrix":
        inv = linear_algebra.inverse(self.entries)
        if inv is None:
            raise SingularMatrixError(f"matrix {self.rows()} is singular")
        return RationalMatrix.of(inv)

    def apply(self, vector: Sequence[Scalar]) -> Tuple[Fraction, ...]:
        if len(vector) != self.size:
            raise DimensionMismatchError(
                f"vector of length {len(vector)} for a {self.size}x{self.size} matrix"
            )
        return tuple(
            sum((a * Fraction(v) for a, v in zip(row, vector)), Fraction(0))
            for row in self.entries
        )

    def rows(self) -> List[List[str]]:
        return [[format_rational(v) for v in row] for row in self.entries]


def unit_vector(dimension: int, index: int) -> Exponent:
    """e_index (1-based)."""
    if not 1 <= index <= dimension:
        raise VariableIndexError(f"variable x{index} is out of range for n={dimension}")
    return tuple(1 if k == index - 1 else 0 for k in range(dimension))


def _check_same_dimension(f: Polynomial, g: Polynomial):
    if f.dimension != g.dimension:
        raise DimensionMismatchError(
            f"polynomials in {f.dimension} and {g.dimension} variables"
        )


def format_polynomial(f: Polynomial) -> str:
    """Canonical text, highest graded-lexicographic term first; parseable."""
    if f.is_zero():
        return "0"
    pieces = []
    for alpha, coeff in f:
        factors = [
            f"x{i}" if a == 1 else f"x{i}^{a}"
            for i, a in enumerate(alpha, start=1)
            if a
        ]
        magnitude = abs(coeff)
        if not factors:
            body = format_rational(magnitude)
        elif magnitude == 1:
            body = "*".join(factors)
        else:
            body = "*".join([format_rational(magnitude)] + factors)
        if not pieces:
            pieces.append(f"-{body}" if coeff < 0 else body)
        else:
            pieces.append(f"- {body}" if coeff < 0 else f"+ {body}")
    return " ".join(pieces)


def evaluate(f: Polynomial, x: Sequence[Scalar]) -> Fraction:
    """Exact value of f at a rational point, with 0^0 = 1."""
    if len(x) != f.dimension:
        raise DimensionMismatchError(
            f"point of length {len(x)} for a polynomial in {f.dimension} variables"
        )
    point = [Fraction(v) for v in x]
    total = Fraction(0)
    for alpha, coeff in f.terms.items():
        term = coeff
        for value, a in zip(point, alpha):
            if a:
                term *= value**a
        total += term
    return total


def scale(f: Polynomial, factor: Scalar) -> Polynomial:
    factor = Fraction(factor)
    return Polynomial._trusted(f.dimension, {a: c * factor for a, c in f.terms.items()})


def multiply(f: Polynomial, g: Polynomial) -> Polynomial:
    """Convolution of the two term mappings."""
    _check_same_dimension(f, g)
    out: Dict[Exponent, Fraction] = {}
    for alpha, a in f.terms.items():
        for beta, b in g.terms.items():
            gamma = tuple(x + y for x, y in zip(alpha, beta))
            out[gamma] = out.get(gamma, Fraction(0)) + a * b
    return Polynomial._trusted(f.dimension, out)


def sos(F: PolynomialMap) -> Polynomial:
    """||F||_2^2 = F_1^2 + ... + F_n^2."""
    total = Polynomial.zero(F.dimension)
    for component in F:
        total = total + multiply(component, component)
    return total


def partial_derivative(f: Polynomial, i: int) -> Polynomial:
    """d f / d x_i (1-based index)."""
    if not 1 <= i <= f.dimension:
        raise VariableIndexError(f"variable x{i} is out of range for n={f.dimension}")
    k = i - 1
    out: Dict[Exponent, Fraction] = {}
    for alpha, coeff in f.terms.items():
        if alpha[k] == 0:
            continue
        beta = alpha[:k] + (alpha[k] - 1,) + alpha[k + 1 :]
        out[beta] = coeff * alpha[k]
    return Polynomial._trusted(f.dimension, out)


def _linear_forms(Ainv: RationalMatrix) -> List[Polynomial]:
    n = Ainv.size
    return [
        Polynomial(n, {unit_vector(n, j + 1): Ainv.entries[i][j] for j in range(n)})
        for i in range(n)
    ]


def substitute_linear(f: Polynomial, Ainv: RationalMatrix) -> Polynomial:
    """f(A^{-1} y) as a polynomial in y."""
    if Ainv.size != f.dimension:
        raise DimensionMismatchError(
            f"{Ainv.size}x{Ainv.size} matrix for a polynomial in {f.dimension} variables"
        )
    if not Ainv.is_regular():
        raise SingularMatrixError(f"matrix {Ainv.rows()} is singular")
    return _substitute(f, _linear_forms(Ainv), {})


def _substitute(
    f: Polynomial,
    forms: List[Polynomial],
    power_cache: Dict[Tuple[int, int], Polynomial],
) -> Polynomial:
    n = f.dimension
    result = Polynomial.zero(n)
    for alpha, coeff in f.terms.items():
        term = Polynomial.constant(n, coeff)
        for k, a in enumerate(alpha):
            if not a:
                continue
            key = (k, a)
            if key not in power_cache:
                power_cache[key] = forms[k] ** a
            term = multiply(term, power_cache[key])
        result = result + term
    return result


def compose_linear(F: PolynomialMap, Ainv: RationalMatrix) -> PolynomialMap:
    """F o A^{-1}: substitute x = A^{-1} y into every component."""
    if Ainv.size != F.dimension:
        raise DimensionMismatchError(
            f"{Ainv.size}x{Ainv.size} matrix for a map with {F.dimension} components"
        )
    if not Ainv.is_regular():
        raise SingularMatrixError(f"matrix {Ainv.rows()} is singular")
    forms = _linear_forms(Ainv)
    cache: Dict[Tuple[int, int], Polynomial] = {}
    return PolynomialMap([_substitute(component, forms, cache) for component in F])
