"""Mine logical rules from binary object datasets.

A dataset of objects x properties is distilled to a point set in
{0,1}^n; the reduced Groebner basis of its vanishing ideal is computed
and every basis element is translated into a human-readable logical
statement.  Each translation case is an exact algebraic identity, so a
rule holds on a row exactly when its polynomial evaluates to 0 there.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from collections import Counter
from dataclasses import dataclass
from typing import Sequence, Union

from . import boolpoly
from .boolpoly import (
    BoolPoly,
    ContextMismatch,
    Monomial,
    TermOrder,
    VariableContext,
)
from .errors import DomainError


class BadHeader(DomainError):
    code = "bad_header"


class NonBinaryCell(DomainError):
    code = "non_binary_cell"

    def __init__(self, row: int, col: int, value: str):
        super().__init__(
            f"cell at data row {row}, column {col} is {value!r}, expected 0 or 1",
            row=row,
            col=col,
        )


class RaggedRow(DomainError):
    code = "ragged_row"


class DuplicateObjectId(DomainError):
    code = "duplicate_object_id"


class EmptyDataset(DomainError):
    code = "empty_dataset"


class DigestMismatch(DomainError):
    code = "digest_mismatch"


class NameMissing(DomainError):
    code = "name_missing"


class ContradictionPolynomial(DomainError):
    code = "contradiction_polynomial"


@dataclass(frozen=True)
class Dataset:
    """Validated binary object x property matrix."""

    property_names: tuple[str, ...]
    rows: tuple[tuple[str, int], ...]  # (object_id, point bitmask)
    source_digest: str  # sha256 of the ingested bytes

    @property
    def context(self) -> VariableContext:
        return VariableContext(self.property_names)

    def content_digest(self) -> str:
        """Digest of the distilled content: property names plus the
        multiset of row bitmasks.  Invariant under row order and
        object-id renaming, so mining output stays reproducible."""
        h = hashlib.sha256()
        h.update("\x1f".join(self.property_names).encode())
        for mask in sorted(mask for _, mask in self.rows):
            h.update(b"\x00" + mask.to_bytes(8, "little"))
        return h.hexdigest()

    def distinct_points(self) -> tuple[int, ...]:
        return tuple(sorted({mask for _, mask in self.rows}))


def load_csv(data: bytes) -> Dataset:
    """Parse a UTF-8 CSV: header "object_id,<prop>,..."; cells 0 or 1."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise BadHeader(f"input is not valid UTF-8: {exc}") from None
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise BadHeader("input has no header row") from None
    if not header or header[0] != "object_id":
        raise BadHeader('first header column must be "object_id"')
    names = header[1:]
    if not names:
        raise BadHeader("no property columns")
    if len(set(names)) != len(names):
        raise BadHeader("duplicate property names")
    try:
        ctx = VariableContext(tuple(names))
    except DomainError as exc:
        raise BadHeader(f"invalid property name: {exc}") from None

    rows: list[tuple[str, int]] = []
    seen_ids: set[str] = set()
    for row_idx, row in enumerate(reader):
        if not row:
            continue  # tolerate trailing blank lines
        if len(row) != len(header):
            raise RaggedRow(
                f"data row {row_idx} has {len(row)} cells, header has {len(header)}"
            )
        object_id = row[0]
        if object_id in seen_ids:
            raise DuplicateObjectId(f"object id {object_id!r} appears more than once")
        seen_ids.add(object_id)
        mask = 0
        for col, cell in enumerate(row[1:]):
            if cell == "1":
                mask |= 1 << col
            elif cell != "0":
                raise NonBinaryCell(row_idx, col + 1, cell)
        rows.append((object_id, mask))
    if not rows:
        raise EmptyDataset("dataset has no data rows")
    digest = hashlib.sha256(data).hexdigest()
    del ctx
    return Dataset(tuple(names), tuple(rows), digest)


# ---------------------------------------------------------------------------
# rule forms

@dataclass(frozen=True)
class AlwaysPresent:
    monomial: Monomial
    tag = "always_present"


@dataclass(frozen=True)
class NeverPresent:
    monomial: Monomial  # single variable
    tag = "never_present"


@dataclass(frozen=True)
class Exclusion:
    monomial: Monomial  # two or more variables never jointly present
    tag = "exclusion"


@dataclass(frozen=True)
class Implication:
    antecedent: Monomial
    consequent: Monomial  # disjoint from the antecedent
    tag = "implication"


@dataclass(frozen=True)
class Equivalence:
    left: Monomial
    right: Monomial
    tag = "equivalence"


@dataclass(frozen=True)
class Conditional:
    condition: Monomial  # common factor of every monomial
    residual: "RuleForm"
    tag = "conditional"


@dataclass(frozen=True)
class GeneralXor:
    monomials: tuple[Monomial, ...]  # ascending by degree, then reading order
    tag = "general_xor"


RuleForm = Union[AlwaysPresent, NeverPresent, Exclusion, Implication, Equivalence, Conditional, GeneralXor]


def classify_rule(f: BoolPoly, order: TermOrder = TermOrder.DEGREVLEX) -> RuleForm:
    """Map a vanishing polynomial to its logical shape.

    Decision ladder over the ANF monomial set; each case corresponds to
    an exact factorization, so the statement is equivalent to "f = 0".
    """
    if f.is_zero():
        raise boolpoly.ZeroPolynomial("cannot classify the zero polynomial")
    if f.is_one():
        raise ContradictionPolynomial("the constant 1 cannot vanish on a nonempty point set")
    mons = f.monomials
    if len(mons) == 1:
        (m,) = mons
        if _degree(m) == 1:
            return NeverPresent(m)
        return Exclusion(m)
    if len(mons) == 2:
        a, b = sorted(mons, key=order.sort_key(f.context.size), reverse=True)
        if b == 0:
            return AlwaysPresent(a)
        if b & a == b:  # b strictly divides a: b * ((a \ b) + 1)
            return Implication(b, a & ~b)
        return Equivalence(a, b)
    common = f.context.full_mask()
    for m in mons:
        common &= m
    if common:
        residual = BoolPoly(f.context, (m & ~common for m in mons))
        return Conditional(common, classify_rule(residual, order))
    return GeneralXor(tuple(sorted(mons, key=lambda m: (_degree(m), m))))


def _degree(m: Monomial) -> int:
    return bin(m).count("1")


def form_holds(form: RuleForm, point: int) -> bool:
    """Truth value of the logical statement at a 0/1 assignment."""
    def conj(m: Monomial) -> bool:
        return point & m == m

    if isinstance(form, AlwaysPresent):
        return conj(form.monomial)
    if isinstance(form, NeverPresent):
        return not conj(form.monomial)
    if isinstance(form, Exclusion):
        return not conj(form.monomial)
    if isinstance(form, Implication):
        return not conj(form.antecedent) or conj(form.consequent)
    if isinstance(form, Equivalence):
        return conj(form.left) == conj(form.right)
    if isinstance(form, Conditional):
        return not conj(form.condition) or form_holds(form.residual, point)
    if isinstance(form, GeneralXor):
        acc = 0
        for m in form.monomials:
            acc ^= 1 if conj(m) else 0
        return acc == 0
    raise TypeError(f"unknown rule form {form!r}")


def _conj_text(m: Monomial, names: Sequence[str], sep: str = " ∧ ") -> str:
    if m == 0:
        return "1"
    parts = []
    i = 0
    rest = m
    while rest:
        if rest & 1:
            if i >= len(names) or not names[i]:
                raise NameMissing(f"no name for variable index {i}")
            parts.append(names[i])
        rest >>= 1
        i += 1
    return sep.join(parts)


def render_form(form: RuleForm, names: Sequence[str]) -> str:
    if isinstance(form, AlwaysPresent):
        return _conj_text(form.monomial, names)
    if isinstance(form, NeverPresent):
        return "¬" + _conj_text(form.monomial, names)
    if isinstance(form, Exclusion):
        return "¬(" + _conj_text(form.monomial, names) + ")"
    if isinstance(form, Implication):
        return _conj_text(form.antecedent, names) + " → " + _conj_text(form.consequent, names)
    if isinstance(form, Equivalence):
        left = _conj_text(form.left, names)
        right = _conj_text(form.right, names)
        if _degree(form.left) > 1:
            left = f"({left})"
        if _degree(form.right) > 1:
            right = f"({right})"
        return f"{left} ⇔ {right}"
    if isinstance(form, Conditional):
        return _conj_text(form.condition, names) + " → (" + render_form(form.residual, names) + ")"
    if isinstance(form, GeneralXor):
        return " ⊕ ".join(_conj_text(m, names, sep="∧") for m in form.monomials) + " = 0"
    raise TypeError(f"unknown rule form {form!r}")


@dataclass(frozen=True)
class Rule:
    polynomial: BoolPoly
    form: RuleForm
    text: str
    support: int  # rows on which the rule is non-vacuous


def rule_support(f: BoolPoly, ds: Dataset) -> int:
    """Rows where at least one monomial of f evaluates to 1."""
    count = 0
    for _, mask in ds.rows:
        if any(mask & m == m for m in f.monomials):
            count += 1
    return count


def render_rule(rule: Rule, names: Sequence[str]) -> str:
    return render_form(rule.form, names)


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    order: TermOrder
    property_names: tuple[str, ...]
    dataset_digest: str  # content digest of the mined dataset
    distinct_point_count: int
    duplicate_count: int

    def form_counts(self) -> dict[str, int]:
        return dict(sorted(Counter(r.form.tag for r in self.rules).items()))


def mine_rules(ds: Dataset, order: TermOrder = TermOrder.DEGREVLEX) -> RuleSet:
    """Rule set of a dataset: one rule per reduced-basis element,
    ordered by ascending leading monomial."""
    if not ds.rows:
        raise EmptyDataset("cannot mine an empty dataset")
    ctx = ds.context
    points = ds.distinct_points()
    result = boolpoly.buchberger_moeller(points, order, ctx)
    rules = []
    for g in result.basis:
        form = classify_rule(g, order)
        rules.append(
            Rule(
                polynomial=g,
                form=form,
                text=render_form(form, ds.property_names),
                support=rule_support(g, ds),
            )
        )
    return RuleSet(
        rules=tuple(rules),
        order=order,
        property_names=ds.property_names,
        dataset_digest=ds.content_digest(),
        distinct_point_count=len(points),
        duplicate_count=len(ds.rows) - len(points),
    )


@dataclass(frozen=True)
class RuleCheck:
    text: str
    polynomial: str
    support: int
    violations: int
    violating_object_ids: tuple[str, ...]


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[RuleCheck, ...]
    total_violations: int

    def clean(self) -> bool:
        return self.total_violations == 0


def validate_rules(rs: RuleSet, ds: Dataset, override: bool = False) -> ValidationReport:
    """Check every rule against every row of a dataset.

    On the training dataset (matching content digest) the violation
    count must be 0 by construction; against a different dataset the
    report names the violating objects.
    """
    if rs.property_names != ds.property_names:
        raise ContextMismatch("rule set and dataset use different property names")
    if not override and rs.dataset_digest != ds.content_digest():
        raise DigestMismatch(
            "dataset content digest does not match the rule set; pass override to validate anyway"
        )
    checks = []
    total = 0
    for rule in rs.rules:
        violators = tuple(
            object_id for object_id, mask in ds.rows if rule.polynomial.evaluate(mask) != 0
        )
        total += len(violators)
        checks.append(
            RuleCheck(
                text=rule.text,
                polynomial=boolpoly.render_poly(rule.polynomial, rs.order),
                support=rule_support(rule.polynomial, ds),
                violations=len(violators),
                violating_object_ids=violators,
            )
        )
    return ValidationReport(tuple(checks), total)


RULES_SCHEMA = "mathdoc-rules/1"


def export_rules_json(rs: RuleSet) -> bytes:
    """Canonical JSON rendering: stable key order, byte-identical
    across runs for the same mined content."""
    doc = {
        "schema": RULES_SCHEMA,
        "metadata": {
            "order": rs.order.value,
            "property_names": list(rs.property_names),
            "dataset_digest": rs.dataset_digest,
            "distinct_point_count": rs.distinct_point_count,
            "duplicate_count": rs.duplicate_count,
            "rule_count": len(rs.rules),
            "form_counts": rs.form_counts(),
        },
        "rules": [
            {
                "polynomial": boolpoly.render_poly(r.polynomial, rs.order),
                "form": r.form.tag,
                "text": r.text,
                "support": r.support,
            }
            for r in rs.rules
        ],
    }
    return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode()


class RulesSchemaViolation(DomainError):
    code = "rules_schema_violation"


def import_rules_json(data: bytes) -> RuleSet:
    """Inverse of export_rules_json; forms are re-derived from the
    polynomials and cross-checked against the stored tags."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise RulesSchemaViolation(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("schema") != RULES_SCHEMA:
        raise RulesSchemaViolation(f"unknown schema {doc.get('schema')!r}")
    try:
        meta = doc["metadata"]
        order = TermOrder(meta["order"])
        names = tuple(meta["property_names"])
        ctx = VariableContext(names)
        rules = []
        for idx, entry in enumerate(doc["rules"]):
            poly = boolpoly.parse_poly(entry["polynomial"], ctx)
            form = classify_rule(poly, order)
            if form.tag != entry["form"]:
                raise RulesSchemaViolation(
                    f"rules[{idx}]: stored form {entry['form']!r} does not match polynomial"
                )
            rules.append(Rule(poly, form, entry["text"], int(entry["support"])))
        return RuleSet(
            rules=tuple(rules),
            order=order,
            property_names=names,
            dataset_digest=meta["dataset_digest"],
            distinct_point_count=int(meta["distinct_point_count"]),
            duplicate_count=int(meta["duplicate_count"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise RulesSchemaViolation(f"malformed rules document: {exc}") from None
