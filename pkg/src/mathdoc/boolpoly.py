"""Exact arithmetic in the boolean ring B_n = F2[x1..xn]/(xi^2 + xi).

Monomials are squarefree by construction and stored as int bitmasks
(bit i set <=> variable i occurs), so a monomial fits one machine word;
the context size is capped at 64 for that reason.  A polynomial is a
set of monomials in algebraic normal form: XOR of AND-conjunctions,
all coefficients 1 over GF(2).

Points of {0,1}^n use the same bitmask convention, which makes
evaluation of a monomial at a point a single subset test.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

from .errors import DomainError

MAX_VARIABLES = 64

Monomial = int  # bitmask over context indices; 0 is the monomial 1
PointMask = int  # bitmask of coordinate values


class ContextMismatch(DomainError):
    code = "context_mismatch"


class UnknownVariable(DomainError):
    code = "unknown_variable"


class PolySyntaxError(DomainError):
    code = "poly_syntax_error"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})", position=position)
        self.position = position


class ZeroPolynomial(DomainError):
    code = "zero_polynomial"


class ZeroDivisorInBasis(DomainError):
    code = "zero_divisor_in_basis"


class ContextTooLarge(DomainError):
    code = "context_too_large"


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class VariableContext:
    """Ordered, named variables; index i refers to names[i].

    Names must be identifier-like so rendered polynomials parse back
    unambiguously (the grammar reserves "0" and "1" for literals).
    """

    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not 1 <= len(names) <= MAX_VARIABLES:
            raise ContextTooLarge(
                f"context must have between 1 and {MAX_VARIABLES} variables, got {len(names)}"
            )
        if len(set(names)) != len(names):
            raise UnknownVariable("variable names must be unique")
        for name in names:
            if not _NAME_RE.fullmatch(name):
                raise UnknownVariable(f"invalid variable name {name!r}")

    @property
    def size(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariable(f"unknown variable {name!r}") from None

    def full_mask(self) -> int:
        return (1 << self.size) - 1


def point_mask(bits: Sequence[int], ctx: VariableContext) -> PointMask:
    """Pack a 0/1 sequence aligned to the context into a bitmask."""
    if len(bits) != ctx.size:
        raise ContextMismatch(f"point has {len(bits)} coordinates, context has {ctx.size}")
    mask = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ContextMismatch(f"coordinate {i} is {b!r}, expected 0 or 1")
        mask |= b << i
    return mask


def point_bits(mask: PointMask, ctx: VariableContext) -> tuple[int, ...]:
    return tuple((mask >> i) & 1 for i in range(ctx.size))


class TermOrder(Enum):
    """Monomial orders restricted to squarefree exponent vectors.

    Variable precedence follows context order: names[0] is the largest
    variable.  All three are total, have 1 as the minimum, and respect
    divisibility (a subset monomial never compares greater).
    """

    LEX = "lex"
    DEGLEX = "deglex"
    DEGREVLEX = "degrevlex"

    def sort_key(self, n: int) -> Callable[[Monomial], tuple]:
        """Key function: ascending sort = ascending order."""
        if self is TermOrder.LEX:
            return lambda m: (_revbits(m, n),)
        if self is TermOrder.DEGLEX:
            return lambda m: (_popcount(m), _revbits(m, n))
        # degrevlex: within a degree, the monomial holding the *last*
        # differing variable is the smaller one, i.e. larger mask = smaller.
        return lambda m: (_popcount(m), -m)


def _popcount(m: int) -> int:
    return bin(m).count("1")


def _revbits(m: int, n: int) -> int:
    r = 0
    for i in range(n):
        if m >> i & 1:
            r |= 1 << (n - 1 - i)
    return r


def compare_monomials(a: Monomial, b: Monomial, order: TermOrder, ctx: VariableContext) -> int:
    """Return -1, 0 or 1 for a < b, a = b, a > b under the order."""
    key = order.sort_key(ctx.size)
    ka, kb = key(a), key(b)
    return (ka > kb) - (ka < kb)


class BoolPoly:
    """Immutable boolean-ring polynomial in algebraic normal form."""

    __slots__ = ("context", "monomials")

    def __init__(self, ctx: VariableContext, monomials: Iterable[Monomial] = ()):
        object.__setattr__(self, "context", ctx)
        mons = frozenset(monomials)
        full = ctx.full_mask()
        for m in mons:
            if m & ~full:
                raise ContextMismatch(f"monomial {m:#x} uses variables outside the context")
        object.__setattr__(self, "monomials", mons)

    def __setattr__(self, name, value):
        raise AttributeError("BoolPoly is immutable")

    @classmethod
    def zero(cls, ctx: VariableContext) -> "BoolPoly":
        return cls(ctx)

    @classmethod
    def one(cls, ctx: VariableContext) -> "BoolPoly":
        return cls(ctx, (0,))

    @classmethod
    def variable(cls, ctx: VariableContext, name: str) -> "BoolPoly":
        return cls(ctx, (1 << ctx.index(name),))

    def is_zero(self) -> bool:
        return not self.monomials

    def is_one(self) -> bool:
        return self.monomials == frozenset((0,))

    def __bool__(self) -> bool:
        return bool(self.monomials)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BoolPoly)
            and self.context == other.context
            and self.monomials == other.monomials
        )

    def __hash__(self) -> int:
        return hash((self.context, self.monomials))

    def _check_context(self, other: "BoolPoly") -> None:
        if self.context != other.context:
            raise ContextMismatch("polynomials belong to different variable contexts")

    def __add__(self, other: "BoolPoly") -> "BoolPoly":
        self._check_context(other)
        return BoolPoly(self.context, self.monomials ^ other.monomials)

    def __mul__(self, other: "BoolPoly") -> "BoolPoly":
        self._check_context(other)
        acc: set[Monomial] = set()
        for a in self.monomials:
            for b in other.monomials:
                acc ^= {a | b}
        return BoolPoly(self.context, acc)

    def evaluate(self, point: PointMask) -> int:
        """XOR over monomials of the AND of their variable bits."""
        if point & ~self.context.full_mask():
            raise ContextMismatch("point uses coordinates outside the context")
        value = 0
        for m in self.monomials:
            if point & m == m:
                value ^= 1
        return value

    def leading_monomial(self, order: TermOrder) -> Monomial:
        if not self.monomials:
            raise ZeroPolynomial("the zero polynomial has no leading monomial")
        return max(self.monomials, key=order.sort_key(self.context.size))

    def __repr__(self) -> str:
        return f"BoolPoly({render_poly(self, TermOrder.DEGREVLEX)!r})"


def add(f: BoolPoly, g: BoolPoly) -> BoolPoly:
    return f + g


def mul(f: BoolPoly, g: BoolPoly) -> BoolPoly:
    return f * g


def eval_poly(f: BoolPoly, point: PointMask) -> int:
    return f.evaluate(point)


def leading_monomial(f: BoolPoly, order: TermOrder) -> Monomial:
    return f.leading_monomial(order)


# ---------------------------------------------------------------------------
# parsing / rendering

_TOKEN_RE = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<lit>[01])|(?P<op>[+*]))")


def parse_poly(text: str, ctx: VariableContext) -> BoolPoly:
    """Parse a sum of products of variable names and the literals 0/1.

    Products use an explicit "*"; juxtaposition of names is not a
    product (it reads as one longer name).  Repeated variables inside a
    product collapse (idempotency) and identical monomials cancel.
    """
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise PolySyntaxError(f"unexpected character {stripped[0]!r}", at)
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()

    if not tokens:
        raise PolySyntaxError("empty polynomial", 0)

    monomials: set[Monomial] = set()
    term_mask = 0
    term_zero = False
    expect_factor = True

    def close_term():
        nonlocal term_mask, term_zero
        if not term_zero:
            monomials.symmetric_difference_update((term_mask,))
        term_mask = 0
        term_zero = False

    for kind, value, at in tokens:
        if expect_factor:
            if kind == "name":
                term_mask |= 1 << ctx.index(value)
            elif kind == "lit":
                if value == "0":
                    term_zero = True
            else:
                raise PolySyntaxError(f"expected a variable or literal, got {value!r}", at)
            expect_factor = False
        else:
            if kind == "op" and value == "*":
                expect_factor = True
            elif kind == "op" and value == "+":
                close_term()
                expect_factor = True
            else:
                raise PolySyntaxError(f"expected '+' or '*', got {value!r}", at)
    if expect_factor:
        last = tokens[-1]
        raise PolySyntaxError("dangling operator", last[2])
    close_term()
    return BoolPoly(ctx, monomials)


def render_monomial(m: Monomial, ctx: VariableContext) -> str:
    if m == 0:
        return "1"
    return "*".join(ctx.names[i] for i in range(ctx.size) if m >> i & 1)


def render_poly(f: BoolPoly, order: TermOrder = TermOrder.DEGREVLEX) -> str:
    """Monomials in strictly descending order joined by " + ".

    Round-trip stable: parse_poly(render_poly(f), f.context) == f.
    """
    if not f.monomials:
        return "0"
    key = order.sort_key(f.context.size)
    ordered = sorted(f.monomials, key=key, reverse=True)
    return " + ".join(render_monomial(m, f.context) for m in ordered)


# ---------------------------------------------------------------------------
# reduction and vanishing-ideal Groebner bases

def normal_form(f: BoolPoly, basis: Sequence[BoolPoly], order: TermOrder) -> BoolPoly:
    """Fully reduce f modulo the basis.

    Each step rewrites the largest reducible monomial m as q*g with
    q = m \\ LM(g).  Because q is disjoint from LM(g), every monomial
    q|t introduced for a tail monomial t < LM(g) satisfies q|t < m in
    any of the supported orders, so the step strictly shrinks the
    reduced monomial and the loop terminates.
    """
    ctx = f.context
    lms = []
    for g in basis:
        if g.is_zero():
            raise ZeroDivisorInBasis("basis contains the zero polynomial")
        if g.context != ctx:
            raise ContextMismatch("basis polynomial in a different context")
        lms.append(g.leading_monomial(order))

    key = order.sort_key(ctx.size)
    work = set(f.monomials)
    reduced: set[Monomial] = set()
    while work:
        m = max(work, key=key)
        work.remove(m)
        for g, lm in zip(basis, lms):
            if m & lm == lm:
                q = m & ~lm
                for t in g.monomials:
                    if t != lm:
                        work.symmetric_difference_update((q | t,))
                break
        else:
            reduced.add(m)
    return BoolPoly(ctx, reduced)


@dataclass(frozen=True)
class GroebnerResult:
    """Reduced Groebner basis of a vanishing ideal plus its quotient data."""

    context: VariableContext
    order: TermOrder
    basis: tuple[BoolPoly, ...]
    standard_monomials: tuple[Monomial, ...]


def buchberger_moeller(
    points: Iterable[PointMask], order: TermOrder, ctx: VariableContext
) -> GroebnerResult:
    """Reduced Groebner basis of the vanishing ideal of a point set.

    Candidate squarefree monomials are processed in increasing order.
    Each candidate's evaluation vector over the (deduplicated, sorted)
    points is Gaussian-eliminated against the vectors of the accepted
    standard monomials; a dependency yields a basis element whose tail
    is exactly the eliminating combination, independence yields a new
    standard monomial whose variable extensions join the pool.

    Output is canonical: independent of input point order and
    bit-identical across runs.
    """
    full = ctx.full_mask()
    pts = sorted({p for p in points})
    for p in pts:
        if p & ~full:
            raise ContextMismatch("point uses coordinates outside the context")

    n = ctx.size
    key = order.sort_key(n)

    basis: list[BoolPoly] = []
    basis_lms: list[Monomial] = []
    standard: list[Monomial] = []
    # pivot rows of the elimination: bit -> (reduced vector, combination)
    rows: dict[int, tuple[int, frozenset[Monomial]]] = {}

    heap: list[tuple[tuple, Monomial]] = [(key(0), 0)]
    seen = {0}

    while heap:
        _, m = heapq.heappop(heap)
        if any(m & lm == lm for lm in basis_lms):
            continue

        vec = 0
        for j, p in enumerate(pts):
            if p & m == m:
                vec |= 1 << j
        rep = {m}
        while vec:
            pivot = vec & -vec
            row = rows.get(pivot)
            if row is None:
                break
            vec ^= row[0]
            rep ^= row[1]

        if vec == 0:
            poly = BoolPoly(ctx, rep)
            basis.append(poly)
            basis_lms.append(m)
        else:
            rows[vec & -vec] = (vec, frozenset(rep))
            standard.append(m)
            for i in range(n):
                ext = m | (1 << i)
                if ext == m or ext in seen:
                    continue
                if any(ext & lm == lm for lm in basis_lms):
                    continue
                seen.add(ext)
                heapq.heappush(heap, (key(ext), ext))

    basis_sorted = sorted(basis, key=lambda g: key(g.leading_monomial(order)))
    standard.sort(key=key)
    return GroebnerResult(ctx, order, tuple(basis_sorted), tuple(standard))


def indicator_poly(point: PointMask, ctx: VariableContext) -> BoolPoly:
    """Characteristic polynomial of a point: prod_i (x_i + p_i + 1).

    Expands to the sum of ones(p) | T over all subsets T of the zero
    coordinates; evaluates to 1 exactly at the point.
    """
    full = ctx.full_mask()
    if point & ~full:
        raise ContextMismatch("point uses coordinates outside the context")
    ones = point
    zeros = full & ~point
    monomials = []
    t = zeros
    while True:
        monomials.append(ones | t)
        if t == 0:
            break
        t = (t - 1) & zeros
    return BoolPoly(ctx, monomials)


@dataclass(frozen=True)
class GbCheckReport:
    """Per-check outcome of the exhaustive Groebner-basis oracle."""

    vanishing: bool
    completeness: bool
    standard_count: bool
    reducedness: bool
    failures: tuple[str, ...]

    def all_passed(self) -> bool:
        return self.vanishing and self.completeness and self.standard_count and self.reducedness


def verify_gb_oracle(
    points: Iterable[PointMask], result: GroebnerResult, max_vars: int = 12
) -> GbCheckReport:
    """Independently certify a GroebnerResult against its point set.

    Checks, by exhaustive enumeration of {0,1}^n:
      (a) every basis element vanishes on every point;
      (b) the indicator of every point NOT in the set reduces to 0,
          which pins the ideal from above (in B_n membership in the
          vanishing ideal is the same as vanishing on the points);
      (c) the standard monomials are exactly the monomials outside the
          leading-term ideal and count |distinct points|;
      (d) the basis is reduced: leading monomials pairwise distinct and
          non-divisible, and no monomial of one element is divisible by
          the leading monomial of another.
    """
    ctx = result.context
    n = ctx.size
    if n > max_vars:
        raise ContextTooLarge(f"oracle enumerates 2^n points; n={n} exceeds cap {max_vars}")
    pts = sorted({p for p in points})
    failures: list[str] = []

    vanishing = True
    for g in result.basis:
        for p in pts:
            if g.evaluate(p) != 0:
                vanishing = False
                failures.append(
                    f"basis element {render_poly(g, result.order)} is 1 at point {p:#x}"
                )

    completeness = True
    pt_set = set(pts)
    for q in range(1 << n):
        if q in pt_set:
            continue
        if not normal_form(indicator_poly(q, ctx), result.basis, result.order).is_zero():
            completeness = False
            failures.append(f"indicator of off-point {q:#x} does not reduce to 0")

    lms = [g.leading_monomial(result.order) for g in result.basis]
    expected_standard = [
        m for m in range(1 << n) if not any(m & lm == lm for lm in lms)
    ]
    key = result.order.sort_key(n)
    expected_standard.sort(key=key)
    standard_count = (
        list(result.standard_monomials) == expected_standard
        and len(expected_standard) == len(pts)
    )
    if not standard_count:
        failures.append(
            f"standard monomials mismatch: {len(result.standard_monomials)} reported, "
            f"{len(expected_standard)} outside the leading-term ideal, {len(pts)} points"
        )

    reducedness = len(set(lms)) == len(lms)
    if not reducedness:
        failures.append("duplicate leading monomials")
    for i, g in enumerate(result.basis):
        for j, lm in enumerate(lms):
            if i == j:
                continue
            if any(m & lm == lm for m in g.monomials):
                reducedness = False
                failures.append(
                    f"element {i} contains a monomial divisible by leading monomial {j}"
                )

    return GbCheckReport(vanishing, completeness, standard_count, reducedness, tuple(failures))
