"""Sparse multivariate polynomials.

Provides:
- :class:`Polynomial`: exponent -> coefficient map over ``n`` variables
- :func:`parse_polynomial`: text grammar ``term (('+'|'-') term)*``
- :class:`ScaledPolynomial` / :func:`tilde_rescale`: dyadic rescaling at a vertex
- :func:`lambda0_split`: the split by terms vanishing on the zero coordinates

Exponents are exact integers, coefficients are floats. Polynomials are
immutable; evaluation accepts arrays of shape ``(..., n)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from newton_maximal.errors import PolynomialSyntaxError

Exponent = tuple[int, ...]

MAX_DIMENSION = 4

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<var>t(?P<index>\d+))"
    r"|(?P<op>[-+*^/])"
    r")"
)


@dataclass(frozen=True)
class Polynomial:
    """P(t) = sum of a_m t^m over the support.

    ``terms`` is kept sorted by exponent. A polynomial with no terms is
    allowed only as the remainder of :func:`lambda0_split`; parsed
    polynomials always have a nonempty support.
    """

    n: int
    terms: tuple[tuple[Exponent, float], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        seen: set[Exponent] = set()
        for exponent, coefficient in self.terms:
            if len(exponent) != self.n:
                raise ValueError(f"exponent {exponent} does not have {self.n} components")
            if any((not isinstance(m, int)) or m < 0 for m in exponent):
                raise ValueError(f"exponent {exponent} must be nonnegative integers")
            if coefficient == 0 or not math.isfinite(coefficient):
                raise ValueError(f"coefficient of {exponent} must be finite and nonzero")
            if exponent in seen:
                raise ValueError(f"duplicate exponent {exponent}")
            seen.add(exponent)
        object.__setattr__(self, "terms", tuple(sorted(self.terms)))

    @classmethod
    def from_mapping(cls, n: int, coefficients: Mapping[Sequence[int], float]) -> "Polynomial":
        """Build from a mapping, dropping zero coefficients."""

        terms = tuple(
            (tuple(int(m) for m in exponent), float(value))
            for exponent, value in coefficients.items()
            if value != 0
        )
        return cls(n, terms)

    @property
    def support(self) -> tuple[Exponent, ...]:
        return tuple(exponent for exponent, _ in self.terms)

    @property
    def coefficients(self) -> dict[Exponent, float]:
        return dict(self.terms)

    def coefficient(self, exponent: Sequence[int]) -> float:
        return self.coefficients.get(tuple(exponent), 0.0)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    @property
    def degree(self) -> int:
        return max((sum(exponent) for exponent in self.support), default=0)

    @cached_property
    def _exponent_array(self) -> np.ndarray:
        return np.array(self.support, dtype=np.int64).reshape(len(self.terms), self.n)

    @cached_property
    def _coefficient_array(self) -> np.ndarray:
        return np.array([c for _, c in self.terms], dtype=float)

    def _as_points(self, t) -> np.ndarray:
        points = np.asarray(t, dtype=float)
        if points.shape[-1:] != (self.n,):
            raise ValueError(f"expected points with last axis {self.n}, got shape {points.shape}")
        return points

    def evaluate(self, t):
        """Evaluate at one point (shape ``(n,)``) or a batch (shape ``(..., n)``)."""

        points = self._as_points(t)
        monomials = np.prod(points[..., None, :] ** self._exponent_array, axis=-1)
        values = monomials @ self._coefficient_array
        return float(values) if points.ndim == 1 else values

    def gradient(self, t) -> np.ndarray:
        """Term-wise exact gradient; returns shape ``(..., n)``."""

        points = self._as_points(t)
        exponents = self._exponent_array
        components = []
        for i in range(self.n):
            factor = self._coefficient_array * exponents[:, i]
            lowered = exponents.copy()
            lowered[:, i] = np.maximum(lowered[:, i] - 1, 0)
            monomials = np.prod(points[..., None, :] ** lowered, axis=-1)
            components.append(monomials @ factor)
        return np.stack(components, axis=-1)

    def bound_on_box(self, lo: float, hi: float) -> float:
        """Interval-arithmetic bound of max |P| on [lo, hi]^n, 0 <= lo <= hi."""

        return float(sum(abs(c) * hi ** sum(exponent) for exponent, c in self.terms))

    def restricted_to(self, exponents: Iterable[Sequence[int]]) -> "Polynomial":
        keep = {tuple(e) for e in exponents}
        return Polynomial(self.n, tuple(term for term in self.terms if term[0] in keep))

    def scaled(self, factor: float) -> "Polynomial":
        if factor == 0:
            raise ValueError("scale factor must be nonzero")
        return Polynomial(self.n, tuple((e, c * factor) for e, c in self.terms))

    def restrict_variables(self, keep: Sequence[int]) -> "Polynomial":
        """Drop the variables outside ``keep``; their exponents must all be zero."""

        keep = tuple(sorted(keep))
        if not keep:
            raise ValueError("at least one variable must be kept")
        dropped = [i for i in range(self.n) if i not in keep]
        terms = []
        for exponent, coefficient in self.terms:
            if any(exponent[i] for i in dropped):
                raise ValueError(f"term {exponent} depends on a dropped variable")
            terms.append((tuple(exponent[i] for i in keep), coefficient))
        return Polynomial(len(keep), tuple(terms))

    def to_text(self) -> str:
        """Render in the grammar accepted by :func:`parse_polynomial`."""

        if self.is_zero:
            return "0"
        pieces: list[str] = []
        for position, (exponent, coefficient) in enumerate(self.terms):
            sign = "-" if coefficient < 0 else "+"
            factors = [
                f"t{i + 1}" if m == 1 else f"t{i + 1}^{m}"
                for i, m in enumerate(exponent)
                if m > 0
            ]
            magnitude = abs(coefficient)
            if magnitude != 1 or not factors:
                factors.insert(0, _format_coefficient(magnitude))
            body = "*".join(factors)
            if position == 0:
                pieces.append(body if sign == "+" else f"-{body}")
            else:
                pieces.append(f"{sign} {body}")
        return " ".join(pieces)


def _format_coefficient(value: float) -> str:
    if value.is_integer() and value < 1e15:
        return str(int(value))
    return repr(value)


class _Parser:
    """Recursive-descent parser over a token list."""

    def __init__(self, text: str, n: int) -> None:
        self.text = text
        self.n = n
        self.tokens = self._tokenize(text)
        self.position = 0

    @staticmethod
    def _tokenize(text: str) -> list[tuple[str, str, int]]:
        tokens: list[tuple[str, str, int]] = []
        cursor = 0
        while cursor < len(text):
            if text[cursor:].strip() == "":
                break
            match = _TOKEN_RE.match(text, cursor)
            if match is None:
                offset = cursor + (len(text[cursor:]) - len(text[cursor:].lstrip()))
                raise PolynomialSyntaxError(f"unexpected character {text[offset]!r}", offset)
            kind = next(name for name in ("number", "var", "op") if match.group(name) is not None)
            start = match.start(kind)
            tokens.append((kind, match.group(kind), start))
            cursor = match.end()
        return tokens

    def _peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.position] if self.position < len(self.tokens) else None

    def _next(self, expected: str) -> tuple[str, str, int]:
        token = self._peek()
        if token is None:
            raise PolynomialSyntaxError(f"expected {expected}, got end of input", len(self.text))
        self.position += 1
        return token

    def parse(self) -> dict[Exponent, float]:
        if not self.tokens:
            raise PolynomialSyntaxError("empty polynomial text", 0)
        collected: dict[Exponent, float] = {}
        sign = 1.0
        token = self._peek()
        if token is not None and token[0] == "op" and token[1] in "+-":
            sign = -1.0 if token[1] == "-" else 1.0
            self.position += 1
        while True:
            exponent, coefficient = self._term()
            collected[exponent] = collected.get(exponent, 0.0) + sign * coefficient
            token = self._peek()
            if token is None:
                return collected
            if token[0] != "op" or token[1] not in "+-":
                raise PolynomialSyntaxError(f"expected '+' or '-', got {token[1]!r}", token[2])
            sign = -1.0 if token[1] == "-" else 1.0
            self.position += 1

    def _term(self) -> tuple[Exponent, float]:
        exponent = [0] * self.n
        coefficient = 1.0
        while True:
            kind, text, start = self._next("a coefficient or variable")
            if kind == "number":
                coefficient *= self._number(text, start)
            elif kind == "var":
                index = int(text[1:])
                if index < 1 or index > self.n:
                    raise PolynomialSyntaxError(
                        f"variable {text} outside t1..t{self.n}", start
                    )
                exponent[index - 1] += self._power()
            else:
                raise PolynomialSyntaxError(f"unexpected operator {text!r}", start)
            token = self._peek()
            if token is None or token[1] != "*":
                return tuple(exponent), coefficient
            self.position += 1

    def _number(self, text: str, start: int) -> float:
        token = self._peek()
        if token is not None and token[1] == "/":
            self.position += 1
            kind, denominator, where = self._next("a denominator")
            if kind != "number":
                raise PolynomialSyntaxError("expected a number after '/'", where)
            try:
                return float(Fraction(text) / Fraction(denominator))
            except ZeroDivisionError:
                raise PolynomialSyntaxError("zero denominator", where) from None
        return float(text)

    def _power(self) -> int:
        token = self._peek()
        if token is None or token[1] != "^":
            return 1
        self.position += 1
        kind, text, start = self._next("an exponent")
        if kind == "op" and text == "-":
            raise PolynomialSyntaxError("negative exponent", start)
        if kind != "number" or not text.isdigit():
            raise PolynomialSyntaxError(f"exponent must be a nonnegative integer, got {text!r}", start)
        return int(text)


def parse_polynomial(text: str, n: int) -> Polynomial:
    """Parse ``text`` into a polynomial in variables ``t1..tn``.

    Args:
        text: Polynomial text, e.g. ``"t1^2*t2 + t1*t2^3"``.
        n: Number of variables.

    Returns:
        Parsed polynomial with like terms collected.

    Raises:
        PolynomialSyntaxError: On malformed text, out-of-range variables,
            negative exponents, or an empty support after collection.
    """

    if n < 1 or n > MAX_DIMENSION:
        raise ValueError(f"dimension must be within 1..{MAX_DIMENSION}, got {n}")
    collected = _Parser(text, n).parse()
    polynomial = Polynomial.from_mapping(n, collected)
    if polynomial.is_zero:
        raise PolynomialSyntaxError("empty support after collection", len(text))
    return polynomial


@dataclass(frozen=True)
class ScaledPolynomial:
    """P~(t) with 2^{-q.v} P~(t) = P(2^{-q} t) for a vertex v of P.

    Multiplier exponents ``q.(m - vertex)`` are stored exactly as integers.
    """

    base: Polynomial
    vertex: Exponent
    index: tuple[int, ...]

    @cached_property
    def shifts(self) -> dict[Exponent, int]:
        return {
            exponent: sum(q * (m - v) for q, m, v in zip(self.index, exponent, self.vertex))
            for exponent in self.base.support
        }

    @property
    def multipliers(self) -> dict[Exponent, float]:
        return {exponent: math.ldexp(1.0, -shift) for exponent, shift in self.shifts.items()}

    @property
    def scale_exponent(self) -> int:
        """q . vertex, the exponent of the prefactor 2^{-q.v}."""

        return sum(q * v for q, v in zip(self.index, self.vertex))

    @cached_property
    def polynomial(self) -> Polynomial:
        """Coefficients multiplied out; terms underflowing to zero are dropped."""

        multipliers = self.multipliers
        return Polynomial.from_mapping(
            self.base.n,
            {exponent: c * multipliers[exponent] for exponent, c in self.base.terms},
        )

    def evaluate(self, t):
        return self.polynomial.evaluate(t)

    def gradient(self, t) -> np.ndarray:
        return self.polynomial.gradient(t)

    def vertex_part(self) -> Polynomial:
        """The vertex monomial a_v t^v (multiplier exactly 1)."""

        return self.polynomial.restricted_to([self.vertex])


def tilde_rescale(p: Polynomial, vertex: Sequence[int], q: Sequence[int]) -> ScaledPolynomial:
    """Rescale ``p`` by the dyadic index ``q`` relative to ``vertex``.

    Raises:
        ValueError: If ``vertex`` is not in the support of ``p`` or ``q`` has
            the wrong length.
    """

    vertex = tuple(int(m) for m in vertex)
    if vertex not in p.coefficients:
        raise ValueError(f"vertex {vertex} is not in the support")
    if len(q) != p.n:
        raise ValueError(f"index {tuple(q)} does not have {p.n} components")
    return ScaledPolynomial(p, vertex, tuple(int(x) for x in q))


def zero_coordinates(vertex: Sequence[int]) -> frozenset[int]:
    """A = {i : vertex_i = 0} (0-based)."""

    return frozenset(i for i, m in enumerate(vertex) if m == 0)


def lambda0_split(
    p: Polynomial, vertex: Sequence[int], zero_set: Iterable[int]
) -> tuple[Polynomial, Polynomial]:
    """Split ``p`` into its terms with m_i = 0 for all i in A and the rest.

    Raises:
        ValueError: If ``zero_set`` differs from the zero coordinates of ``vertex``.
    """

    zero_set = frozenset(zero_set)
    if zero_set != zero_coordinates(vertex):
        raise ValueError(
            f"zero set {sorted(zero_set)} is inconsistent with vertex {tuple(vertex)}"
        )
    inside = [e for e in p.support if all(e[i] == 0 for i in zero_set)]
    outside = [e for e in p.support if any(e[i] != 0 for i in zero_set)]
    return p.restricted_to(inside), p.restricted_to(outside)
