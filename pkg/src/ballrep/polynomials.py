"""Sparse homogeneous and generalized polynomials on rational exponent lattices.

A polynomial of positive rational degree d in n variables is stored as a
sparse map from exponent numerators (integer tuples) to real coefficients.
All exponents share one lattice denominator q, so the exponent of x_i in a
term keyed by ``alpha`` is ``alpha[i] / q``.  Ordinary homogeneous
polynomials are the special case q = 1 with d an even integer; they are
evaluated with signed powers x**alpha.  Every other case is a generalized
polynomial evaluated with |x|**alpha, positively homogeneous of degree d.

Two coefficient conventions are supported.  In the monomial convention the
stored coefficient multiplies x**alpha directly.  In the multinomial
convention (q = 1 only) the stored coefficient g_alpha belongs to the term
c_alpha * g_alpha * x**alpha with c_alpha = d! / (alpha_1! ... alpha_n!),
the natural coordinates for the weighted norm sum(c_alpha * g_alpha**2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

MONOMIAL = "monomial"
MULTINOMIAL = "multinomial"

Exponent = tuple[int, ...]


def enumerate_indices(n: int, total: int, q: int = 1) -> list[Exponent]:
    """All length-n tuples of non-negative integers summing to ``total``.

    The order is graded lexicographic, descending on the numerators, e.g.
    (4,0) > (3,1) > (2,2) > (1,3) > (0,4).  This is the canonical basis
    order used everywhere (coefficient vectors, Gram matrices, CSV rows).
    With denominator q the tuple ``alpha`` stands for the exponent vector
    ``alpha / q`` of total degree ``total / q``.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if total < 0:
        raise ValueError(f"total degree numerator must be >= 0, got {total}")
    if q < 1:
        raise ValueError(f"lattice denominator must be >= 1, got {q}")
    if n == 1:
        return [(total,)]
    out: list[Exponent] = []
    for head in range(total, -1, -1):
        for tail in enumerate_indices(n - 1, total - head):
            out.append((head,) + tail)
    return out


def count_indices(n: int, total: int) -> int:
    """Stars-and-bars count C(n - 1 + total, total) of enumerate_indices."""
    return math.comb(n - 1 + total, total)


def multinomial_coefficient(alpha: Iterable[int]) -> int:
    """c_alpha = (sum alpha)! / (alpha_1! ... alpha_n!) for integer exponents."""
    if isinstance(alpha, ExponentVector):
        if alpha.q != 1:
            raise ValueError("multinomial coefficients need integer exponents (q = 1)")
        alpha = alpha.numerators
    parts = tuple(int(a) for a in alpha)
    if any(a < 0 for a in parts):
        raise ValueError(f"negative exponent in {parts}")
    out = math.factorial(sum(parts))
    for a in parts:
        out //= math.factorial(a)
    return out


@dataclass(frozen=True)
class ExponentVector:
    """A multi-index with entries on the lattice (1/q) * Z_{>=0}."""

    numerators: Exponent
    q: int = 1

    def __post_init__(self):
        object.__setattr__(self, "numerators", tuple(int(a) for a in self.numerators))
        if len(self.numerators) < 1:
            raise ValueError("exponent vector needs at least one entry")
        if any(a < 0 for a in self.numerators):
            raise ValueError(f"negative exponent numerator in {self.numerators}")
        if self.q < 1:
            raise ValueError(f"lattice denominator must be >= 1, got {self.q}")

    @property
    def n(self) -> int:
        return len(self.numerators)

    @property
    def degree(self) -> Fraction:
        return Fraction(sum(self.numerators), self.q)

    def exponents(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.q) for a in self.numerators)


@dataclass(frozen=True)
class NormReport:
    """Coefficient norms of one polynomial or Gram form.

    l0 and l1 are taken over monomial-convention coefficients,
    l2_weighted_sq is sum(c_alpha * g_alpha**2) over multinomial-convention
    coefficients (None when q != 1, where the weights are undefined), and
    trace is the Gram trace (None for plain polynomials).
    """

    l0: int
    l1: float
    l2_weighted_sq: float | None = None
    trace: float | None = None


@dataclass(frozen=True)
class GeneralizedPolynomial:
    """Finite sum of terms coeff * x**(alpha/q) with all alpha/q summing to d."""

    n: int
    degree: Fraction
    q: int = 1
    terms: Mapping[Exponent, float] = field(default_factory=dict)
    convention: str = MONOMIAL

    def __post_init__(self):
        degree = Fraction(self.degree)
        object.__setattr__(self, "degree", degree)
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if self.q < 1:
            raise ValueError(f"lattice denominator must be >= 1, got {self.q}")
        if degree <= 0:
            raise ValueError(f"degree must be positive, got {degree}")
        if self.convention not in (MONOMIAL, MULTINOMIAL):
            raise ValueError(f"unknown convention {self.convention!r}")
        if self.convention == MULTINOMIAL and self.q != 1:
            raise ValueError("multinomial convention is only defined for q = 1")
        target = degree * self.q
        if target.denominator != 1:
            raise ValueError(f"degree {degree} does not lie on the 1/{self.q} lattice")
        clean: dict[Exponent, float] = {}
        for alpha, coeff in self.terms.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.n:
                raise ValueError(f"exponent {alpha} has length != n = {self.n}")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent numerator in {alpha}")
            if sum(alpha) != target:
                raise ValueError(
                    f"exponent {alpha} sums to {sum(alpha)}, expected d*q = {target}"
                )
            clean[alpha] = float(coeff)
        # read-only view: instances are shared freely across workers
        object.__setattr__(self, "terms", MappingProxyType(clean))

    # -- structure ---------------------------------------------------------

    @property
    def is_classical(self) -> bool:
        """True when this is an ordinary homogeneous polynomial of even degree."""
        return self.q == 1 and self.degree.denominator == 1 and self.degree % 2 == 0

    @property
    def degree_float(self) -> float:
        return float(self.degree)

    def support(self, cutoff: float = 0.0) -> list[Exponent]:
        """Exponents whose coefficient magnitude exceeds ``cutoff``, canonical order."""
        keys = [a for a, c in self.terms.items() if abs(c) > cutoff]
        return sorted(keys, reverse=True)

    def has_even_support(self) -> bool:
        """True when every stored exponent numerator is even.

        For classical polynomials this makes the sublevel set invariant
        under per-coordinate sign flips, which zeroes every moment with an
        odd exponent exactly.
        """
        return all(all(a % 2 == 0 for a in alpha) for alpha in self.terms)

    # -- algebra -----------------------------------------------------------

    def monomial_coefficient(self, alpha: Exponent) -> float:
        """Coefficient of x**(alpha/q) in the monomial convention."""
        coeff = self.terms.get(tuple(alpha), 0.0)
        if self.convention == MULTINOMIAL:
            coeff *= multinomial_coefficient(alpha)
        return coeff

    def to_convention(self, convention: str) -> "GeneralizedPolynomial":
        if convention == self.convention:
            return self
        if self.q != 1:
            raise ValueError("convention changes are only defined for q = 1")
        if convention == MONOMIAL:
            terms = {a: c * multinomial_coefficient(a) for a, c in self.terms.items()}
        elif convention == MULTINOMIAL:
            terms = {a: c / multinomial_coefficient(a) for a, c in self.terms.items()}
        else:
            raise ValueError(f"unknown convention {convention!r}")
        return GeneralizedPolynomial(self.n, self.degree, self.q, terms, convention)

    def rescale(self, lam: float) -> "GeneralizedPolynomial":
        """Multiply every coefficient by lam > 0 (degree and lattice unchanged)."""
        if not lam > 0:
            raise ValueError(f"scale factor must be positive, got {lam}")
        terms = {a: lam * c for a, c in self.terms.items()}
        return GeneralizedPolynomial(self.n, self.degree, self.q, terms, self.convention)

    def evaluate(self, x) -> float | np.ndarray:
        """Evaluate at one point of shape (n,) or a batch of shape (..., n).

        Classical polynomials use signed powers, all other cases use
        |x|**alpha.  0**0 is taken to be 1, so boundary axes need no
        special casing.
        """
        arr = np.asarray(x, dtype=float)
        if arr.shape[-1] != self.n:
            raise ValueError(f"point has dimension {arr.shape[-1]}, expected {self.n}")
        classical = self.is_classical
        base = arr if classical else np.abs(arr)
        out = np.zeros(arr.shape[:-1], dtype=float)
        for alpha, coeff in self.terms.items():
            if self.convention == MULTINOMIAL:
                coeff = coeff * multinomial_coefficient(alpha)
            if coeff == 0.0:
                continue
            if classical:
                term = np.prod(base ** np.asarray(alpha, dtype=int), axis=-1)
            else:
                exps = np.asarray(alpha, dtype=float) / self.q
                term = np.prod(base ** exps, axis=-1)
            out = out + coeff * term
        if out.ndim == 0:
            return float(out)
        return out

    def __call__(self, x):
        return self.evaluate(x)


def ld_polynomial(n: int, degree, q: int = 1, convention: str = MONOMIAL) -> GeneralizedPolynomial:
    """The axis-power polynomial sum_i |x_i|**d on the lattice with denominator q."""
    degree = Fraction(degree)
    target = degree * q
    if target.denominator != 1:
        raise ValueError(f"degree {degree} does not lie on the 1/{q} lattice")
    total = int(target)
    terms: dict[Exponent, float] = {}
    for i in range(n):
        alpha = [0] * n
        alpha[i] = total
        terms[tuple(alpha)] = 1.0
    return GeneralizedPolynomial(n, degree, q, terms, convention)


def from_coefficient_vector(
    n: int,
    degree,
    q: int,
    basis: Iterable[Exponent],
    coefficients,
    convention: str = MONOMIAL,
) -> GeneralizedPolynomial:
    """Build a polynomial from an ordered basis and a coefficient vector."""
    basis = [tuple(a) for a in basis]
    vec = np.asarray(coefficients, dtype=float)
    if vec.shape != (len(basis),):
        raise ValueError(f"coefficient vector has shape {vec.shape}, expected ({len(basis)},)")
    terms = {a: float(c) for a, c in zip(basis, vec)}
    return GeneralizedPolynomial(n, Fraction(degree), q, terms, convention)


def coefficient_vector(g: GeneralizedPolynomial, basis: Iterable[Exponent]) -> np.ndarray:
    """Coefficients of g on an ordered basis (missing entries are 0)."""
    return np.array([g.terms.get(tuple(a), 0.0) for a in basis], dtype=float)


@dataclass(frozen=True, eq=False)
class GramForm:
    """Symmetric matrix Q defining g_Q(x) = v(x)^T Q v(x).

    v(x) is the vector of degree d/2 monomials ordered by
    ``enumerate_indices(n, d // 2)``, so g_Q is homogeneous of even degree d.
    """

    n: int
    degree: int
    Q: np.ndarray

    _SYMMETRY_RTOL = 1e-12

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if self.degree < 2 or self.degree % 2 != 0:
            raise ValueError(f"Gram degree must be an even integer >= 2, got {self.degree}")
        Q = np.array(self.Q, dtype=float)
        size = count_indices(self.n, self.degree // 2)
        if Q.shape != (size, size):
            raise ValueError(f"Q has shape {Q.shape}, expected ({size}, {size})")
        scale = max(1.0, float(np.abs(Q).max()))
        if np.abs(Q - Q.T).max() > self._SYMMETRY_RTOL * scale:
            raise ValueError("Q is not symmetric within 1e-12 relative tolerance")
        Q = 0.5 * (Q + Q.T)
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)

    @property
    def basis(self) -> list[Exponent]:
        return enumerate_indices(self.n, self.degree // 2)

    @property
    def trace(self) -> float:
        return float(np.trace(self.Q))

    def rescale(self, lam: float) -> "GramForm":
        if not lam > 0:
            raise ValueError(f"scale factor must be positive, got {lam}")
        return GramForm(self.n, self.degree, lam * np.asarray(self.Q))

    def expand(self) -> GeneralizedPolynomial:
        return expand_gram(self)

    def evaluate(self, x) -> float | np.ndarray:
        return self.expand().evaluate(x)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GramForm)
            and self.n == other.n
            and self.degree == other.degree
            and np.array_equal(self.Q, other.Q)
        )


def expand_gram(gram: GramForm) -> GeneralizedPolynomial:
    """Expand v(x)^T Q v(x) into a monomial-convention polynomial.

    The coefficient of x**gamma is the sum of Q[a, b] over ordered index
    pairs with a + b = gamma.
    """
    basis = gram.basis
    Q = gram.Q
    terms: dict[Exponent, float] = {}
    for i, a in enumerate(basis):
        for j in range(i, len(basis)):
            b = basis[j]
            weight = Q[i, j] if i == j else 2.0 * Q[i, j]
            gamma = tuple(ai + bi for ai, bi in zip(a, b))
            terms[gamma] = terms.get(gamma, 0.0) + weight
    terms = {a: c for a, c in terms.items() if c != 0.0}
    return GeneralizedPolynomial(gram.n, Fraction(gram.degree), 1, terms, MONOMIAL)


def norms(obj: GeneralizedPolynomial | GramForm) -> NormReport:
    """NormReport of a polynomial or a Gram form (see NormReport docs)."""
    if isinstance(obj, GramForm):
        report = norms(obj.expand())
        return NormReport(report.l0, report.l1, report.l2_weighted_sq, obj.trace)
    mono = obj.to_convention(MONOMIAL) if obj.q == 1 else obj
    values = list(mono.terms.values())
    l0 = sum(1 for c in values if c != 0.0)
    l1 = float(sum(abs(c) for c in values))
    l2 = None
    if obj.q == 1:
        multi = obj.to_convention(MULTINOMIAL)
        l2 = float(
            sum(multinomial_coefficient(a) * c * c for a, c in multi.terms.items())
        )
    return NormReport(l0, l1, l2, None)
