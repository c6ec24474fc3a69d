import re
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from diffeo_certifier.common import format_rational, logger
from diffeo_certifier.exceptions import (
    PolynomialSyntaxError,
    UnboundParameterError,
    VariableIndexError,
)
from diffeo_certifier.polynomials import Polynomial

_TOKEN = re.compile(r"(?P<number>\d+)|x(?P<index>\d+)|(?P<op>[-+*/^])")
_IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_VARIABLE = re.compile(r"x\d+")
_POWERED_IDENTIFIER = re.compile(r"(?P<name>[A-Za-z][A-Za-z0-9_]*)(?:\s*\^\s*(?P<power>\d+))?")
PARAMETER_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            match = _TOKEN.match(text, pos)
            if not match:
                raise PolynomialSyntaxError(f"unexpected character {text[pos]!r}", pos)
            if match.group("number") is not None:
                self.items.append(("number", match.group("number"), pos))
            elif match.group("index") is not None:
                self.items.append(("var", match.group("index"), pos))
            else:
                self.items.append(("op", match.group("op"), pos))
            pos = match.end()
        self.cursor = 0

    def peek(self) -> Optional[Tuple[str, str, int]]:
        if self.cursor < len(self.items):
            return self.items[self.cursor]
        return None

    def take(self) -> Tuple[str, str, int]:
        token = self.peek()
        if token is None:
            raise PolynomialSyntaxError("unexpected end of input", len(self.text))
        self.cursor += 1
        return token

    def at_op(self, *ops: str) -> bool:
        token = self.peek()
        return token is not None and token[0] == "op" and token[1] in ops


def parse_polynomial(text: str, n: int) -> Polynomial:
    """Parse ``2*x1^3*x2 - 1/2*x2^6 + 3`` style text into a Polynomial in n variables.

    Terms are separated by ``+``/``-``; a term is a product of rational
    coefficients (``k`` or ``p/q``) and powers ``x<i>^<k>``. Signs may repeat
    (``x1 - -2*x2``), which is what textual parameter substitution produces.
    """
    tokens = _Tokens(text)
    terms: Dict[Tuple[int, ...], Fraction] = {}
    if tokens.peek() is None:
        raise PolynomialSyntaxError("empty polynomial", 0)
    first = True
    while tokens.peek() is not None:
        sign = 1
        if not first:
            token = tokens.take()
            if token[0] != "op" or token[1] not in "+-":
                raise PolynomialSyntaxError(f"expected '+' or '-', found {token[1]!r}", token[2])
            if token[1] == "-":
                sign = -1
        first = False
        while tokens.at_op("+", "-"):
            if tokens.take()[1] == "-":
                sign = -sign
        coeff, alpha = _parse_term(tokens, n)
        terms[alpha] = terms.get(alpha, Fraction(0)) + sign * coeff
    poly = Polynomial(n, terms)
    logger.debug(f"Parsed {text!r} into {len(poly)} terms")
    return poly


def _parse_term(tokens: _Tokens, n: int) -> Tuple[Fraction, Tuple[int, ...]]:
    coeff = Fraction(1)
    exponents = [0] * n
    expecting_factor = True
    while True:
        token = tokens.peek()
        if expecting_factor:
            if token is None:
                raise PolynomialSyntaxError("missing factor", len(tokens.text))
            factor_sign = 1
            while token is not None and token[0] == "op" and token[1] in "+-":
                tokens.take()
                factor_sign = -factor_sign if token[1] == "-" else factor_sign
                token = tokens.peek()
            if token is None:
                raise PolynomialSyntaxError("missing factor", len(tokens.text))
            if token[0] == "number":
                coeff *= factor_sign * _parse_rational_literal(tokens)
            elif token[0] == "var":
                coeff *= factor_sign
                index, power = _parse_power(tokens, n)
                exponents[index] += power
            else:
                raise PolynomialSyntaxError(f"unexpected {token[1]!r}", token[2])
            expecting_factor = False
            continue
        if token is None or (token[0] == "op" and token[1] in "+-"):
            return coeff, tuple(exponents)
        if token[0] == "op" and token[1] == "*":
            tokens.take()
            expecting_factor = True
        elif token[0] in ("number", "var"):
            # implicit multiplication: "2x1" or "x1x2"
            expecting_factor = True
        else:
            raise PolynomialSyntaxError(f"unexpected {token[1]!r}", token[2])


def _parse_rational_literal(tokens: _Tokens) -> Fraction:
    _, numerator, _ = tokens.take()
    value = Fraction(int(numerator))
    if tokens.at_op("/"):
        slash = tokens.take()
        token = tokens.peek()
        if token is None or token[0] != "number":
            raise PolynomialSyntaxError("expected a denominator after '/'", slash[2])
        tokens.take()
        if int(token[1]) == 0:
            raise PolynomialSyntaxError("zero denominator", token[2])
        value /= int(token[1])
    return value


def _parse_power(tokens: _Tokens, n: int) -> Tuple[int, int]:
    _, index_text, position = tokens.take()
    index = int(index_text)
    if not 1 <= index <= n:
        raise VariableIndexError(f"variable x{index} is out of range for n={n}", position)
    power = 1
    if tokens.at_op("^"):
        caret = tokens.take()
        token = tokens.peek()
        if token is None or token[0] != "number":
            raise PolynomialSyntaxError("expected a nonnegative integer exponent", caret[2])
        tokens.take()
        power = int(token[1])
    return index - 1, power


def find_parameters(text: str) -> List[str]:
    """Identifiers in the text that are not variables x<i>, in first-seen order."""
    seen: List[str] = []
    for match in _IDENTIFIER.finditer(text):
        name = match.group(0)
        if _VARIABLE.fullmatch(name):
            continue
        if name not in seen:
            seen.append(name)
    return seen


def substitute_parameters(text: str, bindings: Mapping[str, Fraction]) -> str:
    """Replace named parameters by rational literals before parsing.

    A ``*`` is inserted where the parameter was juxtaposed with a factor, so
    ``2t`` with t = -1 becomes ``2*-1`` and not ``2-1``. A power of a
    parameter is evaluated here: ``t^2`` with t = -1 becomes ``1``.
    """

    def replace(match: re.Match) -> str:
        name = match.group("name")
        if _VARIABLE.fullmatch(name):
            return match.group(0)
        if name not in bindings:
            raise UnboundParameterError(f"parameter {name!r} is not bound; use --set {name}=VALUE")
        value = Fraction(bindings[name])
        if match.group("power") is not None:
            value = value ** int(match.group("power"))
        literal = format_rational(value)
        before = text[: match.start()].rstrip()
        after = text[match.end() :].lstrip()
        if before and (before[-1].isalnum() or before[-1] == "_"):
            literal = "*" + literal
        if after and (after[0].isalnum() or after[0] == "_"):
            literal = literal + "*"
        return literal

    return _POWERED_IDENTIFIER.sub(replace, text)
