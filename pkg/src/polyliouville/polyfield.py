"""Exact multivariate polynomial calculus over the rationals.

Polynomials live in n variables with rational coefficients and support the
iterated Laplacian, translation, exact ball/sphere moment averages, the
Pizzetti ball-average identity, and a seeded generator of Almansi-type
polyharmonic polynomials sum_k |x|^{2k} h_k with each h_k harmonic.

Sphere average of a monomial x^alpha over S^{n-1}(R), all alpha_i even::

    prod_i (alpha_i - 1)!!  /  [ n (n+2) ... (n + |alpha| - 2) ]  *  R^{|alpha|}

and zero when any alpha_i is odd. The ball average carries the extra factor
n / (n + |alpha|).

Exact arithmetic uses gmpy2.mpq when available (several times faster than
fractions.Fraction) and falls back to the stdlib otherwise. Both types
interoperate and compare equal, so callers may pass either.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .exactconst import double_factorial, pizzetti_coefficients

try:
    from gmpy2 import mpq as _RAT
except ImportError:  # pragma: no cover - environment without gmpy2
    _RAT = Fraction

_ZERO = _RAT(0)
_ONE = _RAT(1)


def _rat(x) -> "_RAT":
    if isinstance(x, float):
        raise TypeError("polyfield is exact, floats are not accepted")
    if isinstance(x, Fraction):
        return _RAT(x.numerator, x.denominator)
    return _RAT(x)


class PolynomialND:
    """Polynomial in n variables, stored as {exponent tuple: coefficient}.

    Instances are immutable in spirit: all operations return new objects and
    zero coefficients are dropped on construction.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = n
        clean = {}
        for mono, coeff in (terms or {}).items():
            c = _rat(coeff)
            if c != 0:
                if len(mono) != n or any(e < 0 for e in mono):
                    raise ValueError(f"bad exponent tuple {mono} for n={n}")
                clean[tuple(mono)] = c
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "PolynomialND":
        return cls(n, {})

    @classmethod
    def constant(cls, n: int, c) -> "PolynomialND":
        return cls(n, {(0,) * n: c})

    @classmethod
    def monomial(cls, n: int, alpha, coeff=1) -> "PolynomialND":
        return cls(n, {tuple(alpha): coeff})

    @classmethod
    def rsq(cls, n: int) -> "PolynomialND":
        """|x|^2 as a polynomial."""
        terms = {}
        for i in range(n):
            e = [0] * n
            e[i] = 2
            terms[tuple(e)] = 1
        return cls(n, terms)

    # -- basics --------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree, -1 for the zero polynomial."""
        return max((sum(a) for a in self.terms), default=-1)

    def __eq__(self, other):
        return isinstance(other, PolynomialND) and self.n == other.n \
            and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __repr__(self):
        if self.is_zero:
            return "0"
        bits = []
        for alpha in sorted(self.terms, key=lambda a: (sum(a), a), reverse=True):
            c = self.terms[alpha]
            mono = "*".join(f"x{i}^{e}" for i, e in enumerate(alpha) if e)
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(bits)

    # -- ring operations ------------------------------------------------

    def __add__(self, other: "PolynomialND") -> "PolynomialND":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, _ZERO) + c
        return PolynomialND(self.n, out)

    def __sub__(self, other: "PolynomialND") -> "PolynomialND":
        return self + (other * -1)

    def __mul__(self, other):
        if not isinstance(other, PolynomialND):
            c = _rat(other)
            return PolynomialND(self.n, {a: v * c for a, v in self.terms.items()})
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        out = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, _ZERO) + ca * cb
        return PolynomialND(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "PolynomialND":
        if k < 0:
            raise ValueError("negative power")
        out = PolynomialND.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    # -- calculus --------------------------------------------------------

    def partial(self, i: int) -> "PolynomialND":
        out = {}
        for a, c in self.terms.items():
            if a[i] == 0:
                continue
            b = list(a)
            b[i] -= 1
            out[tuple(b)] = out.get(tuple(b), _ZERO) + c * a[i]
        return PolynomialND(self.n, out)

    def laplacian(self) -> "PolynomialND":
        out = {}
        for a, c in self.terms.items():
            for i in range(self.n):
                if a[i] >= 2:
                    b = list(a)
                    b[i] -= 2
                    key = tuple(b)
                    out[key] = out.get(key, _ZERO) + c * (a[i] * (a[i] - 1))
        return PolynomialND(self.n, out)

    def iterated_laplacian(self, j: int) -> "PolynomialND":
        out = self
        for _ in range(j):
            out = out.laplacian()
        return out

    def evaluate(self, point) -> "_RAT":
        pt = [_rat(x) for x in point]
        total = _ZERO
        for a, c in self.terms.items():
            v = c
            for x, e in zip(pt, a):
                if e:
                    v = v * x ** e
            total += v
        return total

    def translate(self, shift) -> "PolynomialND":
        """P(x) -> P(x + shift), exact, one variable at a time."""
        shift = [_rat(s) for s in shift]
        if len(shift) != self.n:
            raise ValueError("shift length mismatch")
        poly = self
        for i, a in enumerate(shift):
            if a != 0:
                poly = poly._shift_one(i, a)
        return poly

    def _shift_one(self, i: int, a) -> "PolynomialND":
        # group terms by the exponents of the other variables, then do a
        # univariate Taylor shift (Horner with (x + a)) per group
        groups: dict[tuple, dict[int, "_RAT"]] = {}
        for alpha, c in self.terms.items():
            rest = alpha[:i] + alpha[i + 1:]
            groups.setdefault(rest, {})[alpha[i]] = c
        out = {}
        for rest, uni in groups.items():
            d = max(uni)
            coeffs = [uni.get(k, _ZERO) for k in range(d + 1)]
            shifted = [_ZERO] * (d + 1)
            for c in reversed(coeffs):
                # shifted <- shifted * (x + a) + c
                prev = shifted
                nxt = [_ZERO] * (d + 1)
                for k in range(d):
                    nxt[k + 1] += prev[k]
                for k in range(d + 1):
                    nxt[k] += prev[k] * a
                nxt[0] += c
                shifted = nxt
            for k, c in enumerate(shifted):
                if c != 0:
                    alpha = rest[:i] + (k,) + rest[i:]
                    out[alpha] = out.get(alpha, _ZERO) + c
        return PolynomialND(self.n, out)

    def homogeneous_part(self, d: int) -> "PolynomialND":
        return PolynomialND(self.n, {a: c for a, c in self.terms.items() if sum(a) == d})


# -- moments ------------------------------------------------------------


@dataclass(frozen=True)
class MomentValue:
    """Exact average of x^alpha as coefficient * R^exponent."""

    coefficient: Fraction
    exponent: int
    radius: Fraction | None = None

    @property
    def value(self) -> Fraction:
        if self.radius is None:
            raise ValueError("no numeric radius attached")
        return Fraction(self.coefficient) * Fraction(self.radius) ** self.exponent


def moment_average(alpha, n: int, domain: str = "ball", radius=None) -> MomentValue:
    """Exact average of the monomial x^alpha over a ball or sphere of radius R.

    Parameters
    ----------
    alpha : multi-index (length n)
    n : ambient dimension
    domain : "ball" averages over B_R, "sphere" over S^{n-1}(R)
    radius : optional rational radius; when given, .value is available

    Returns zero (as a MomentValue) when any entry of alpha is odd.
    """
    if len(alpha) != n:
        raise ValueError("alpha length must equal n")
    if domain not in ("ball", "sphere"):
        raise ValueError("domain must be 'ball' or 'sphere'")
    deg = sum(alpha)
    rad = None if radius is None else Fraction(radius)
    if any(a % 2 for a in alpha):
        return MomentValue(Fraction(0), deg, rad)
    num = 1
    for a in alpha:
        num *= double_factorial(a - 1)
    den = 1
    for k in range(1, deg // 2 + 1):
        den *= n + 2 * k - 2
    coeff = Fraction(num, den)
    if domain == "ball":
        coeff *= Fraction(n, n + deg)
    return MomentValue(coeff, deg, rad)


def ball_average(P: PolynomialND, x0, R) -> Fraction:
    """Exact average of P over the ball B_R(x0), via translation + moments."""
    Q = P.translate(x0)
    R = Fraction(R)
    total = Fraction(0)
    for alpha, c in Q.terms.items():
        mv = moment_average(alpha, P.n, "ball", R)
        if mv.coefficient != 0:
            total += Fraction(c) * mv.value
    return total


# -- Pizzetti check -------------------------------------------------------


@dataclass(frozen=True)
class PizzettiReport:
    lhs: Fraction
    rhs: Fraction
    residual: Fraction

    @property
    def exact(self) -> bool:
        return self.residual == 0


def pizzetti_check(P: PolynomialND, m: int, x0, R) -> PizzettiReport:
    """Compare the exact ball average of P with the m-term Pizzetti sum.

    lhs  = average of P over B_R(x0)
    rhs  = sum_{i=0}^{m-1} c_i R^{2i} (Delta^i P)(x0)

    The residual is exactly zero whenever Delta^m P = 0, and equals
    c_m R^{2m} (Delta^m P)(x0) for any P of degree <= 2m.
    """
    R = Fraction(R)
    lhs = ball_average(P, x0, R)
    cs = pizzetti_coefficients(P.n, m)
    rhs = Fraction(0)
    Q = P
    for i in range(m):
        rhs += cs[i] * R ** (2 * i) * Fraction(Q.evaluate(x0))
        Q = Q.laplacian()
    return PizzettiReport(lhs=lhs, rhs=rhs, residual=lhs - rhs)


# -- harmonic projection and Almansi generator ----------------------------


def _fischer_solve(g: PolynomialND, c: int) -> PolynomialND:
    """Solve c*u + |x|^2 Delta(u) = g for homogeneous g, exactly.

    The recursion reduces the degree by two each step: with d = deg g,
    u = (g - |x|^2 t) / c where t solves the same equation for Delta(g)
    with constant c + 2n + 4(d-2). Terminates because Delta eventually
    annihilates g.
    """
    if g.is_zero:
        return g
    d = g.degree()
    t = _fischer_solve(g.laplacian(), c + 2 * g.n + 4 * (d - 2))
    return (g - PolynomialND.rsq(g.n) * t) * Fraction(1, c)


def harmonic_projection(q: PolynomialND) -> PolynomialND:
    """Harmonic component of q in the Fischer decomposition, exactly.

    Each homogeneous part q_k is written q_k = h_k + |x|^2 w with
    Delta h_k = 0; the |x|^2-multiple is subtracted. The result is the sum
    of the harmonic components over all degrees.
    """
    out = PolynomialND.zero(q.n)
    for d in range(q.degree() + 1):
        qd = q.homogeneous_part(d)
        if qd.is_zero:
            continue
        if d <= 1:
            out = out + qd
            continue
        g = qd.laplacian()
        if g.is_zero:
            out = out + qd
            continue
        w = _fischer_solve(g, 2 * q.n + 4 * (d - 2))
        out = out + qd - PolynomialND.rsq(q.n) * w
    return out


def _random_homogeneous(rng: random.Random, n: int, d: int) -> PolynomialND:
    terms = {}
    for _ in range(1 + rng.randrange(2)):
        cuts = sorted(rng.randrange(d + 1) for _ in range(n - 1)) if n > 1 else []
        alpha = tuple(b - a for a, b in zip([0] + cuts, cuts + [d]))
        num = rng.choice([c for c in range(-5, 6) if c])
        den = rng.choice([1, 1, 2, 3])
        terms[alpha] = terms.get(alpha, _ZERO) + _RAT(num, den)
    return PolynomialND(n, terms)


def almansi_random(m: int, n: int, d: int, seed: int) -> PolynomialND:
    """Seeded random polyharmonic polynomial P = sum_k |x|^{2k} h_k, k < m.

    Each h_k is the harmonic projection of a random sparse polynomial of
    degree <= d; draws are retried (a bounded number of times) until every
    component is nonzero, which guarantees Delta^j P != 0 for j < m while
    Delta^m P = 0.
    """
    if m < 1 or n < 1 or d < 0:
        raise ValueError("need m >= 1, n >= 1, d >= 0")
    rng = random.Random(seed)
    rsq = PolynomialND.rsq(n)
    total = PolynomialND.zero(n)
    for k in range(m):
        h = PolynomialND.zero(n)
        for _ in range(60):
            dk = rng.randint(0, d)
            h = harmonic_projection(_random_homogeneous(rng, n, dk))
            if not h.is_zero:
                break
        if h.is_zero:  # pragma: no cover - d = 0 draws cannot be zero
            h = PolynomialND.constant(n, 1)
        total = total + rsq ** k * h
    return total
