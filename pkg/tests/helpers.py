"""Shared test utilities: random generators, the documentation fixture
flow, and the synthetic dataset generator with planted implications."""

from __future__ import annotations

import json
import random
from pathlib import Path

from mathdoc.boolpoly import BoolPoly, TermOrder, VariableContext
from mathdoc.metafetch import Resolver, ResolverConfig
from mathdoc.modelkg import KnowledgeGraph, sequential_id_factory
from mathdoc.workflowdoc import (
    DocumentationSession,
    default_template,
    new_session,
    set_answer,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
FIXED_CLOCK = lambda: 1754700000.0  # 2026-08-09T00:40:00Z

ALL_ORDERS = (TermOrder.LEX, TermOrder.DEGLEX, TermOrder.DEGREVLEX)


def small_context(n: int) -> VariableContext:
    return VariableContext(tuple(f"x{i + 1}" for i in range(n)))


def random_poly(rng: random.Random, ctx: VariableContext, max_monomials: int = 6) -> BoolPoly:
    count = rng.randint(0, max_monomials)
    full = ctx.full_mask()
    return BoolPoly(ctx, {rng.randint(0, full) for _ in range(count)})


def random_points(rng: random.Random, n: int, count: int) -> list[int]:
    return [rng.randint(0, (1 << n) - 1) for _ in range(count)]


def offline_resolver() -> Resolver:
    return Resolver(ResolverConfig(fixtures_path=FIXTURES))


# shared with the frontend integration test
FIXTURE_ANSWERS = [
    (qid, value)
    for qid, value in json.loads((FIXTURES / "session_answers.json").read_text())["answers"]
]


def fixture_session(kg: KnowledgeGraph) -> DocumentationSession:
    """A fully answered documentation session for the demo workflow."""
    template = default_template()
    session = new_session(template, id_factory=lambda: "sess-demo0001", clock=FIXED_CLOCK)
    for qid, value in FIXTURE_ANSWERS:
        set_answer(session, template, qid, value, kg=kg, clock=FIXED_CLOCK)
    return session


def fixture_graph() -> KnowledgeGraph:
    """Deterministic knowledge graph produced by exporting the fixture
    session into an empty graph."""
    from mathdoc.workflowdoc import export_to_kg

    kg = KnowledgeGraph(id_factory=sequential_id_factory())
    session = fixture_session(kg)
    export_to_kg(session, default_template(), kg, resolver=offline_resolver())
    return kg


def synthetic_dataset(
    rows: int = 333,
    props: int = 16,
    seed: int = 20260809,
    planted: tuple[tuple[int, int], ...] = ((0, 1), (2, 3), (4, 5), (6, 7), (8, 9)),
) -> tuple[bytes, tuple[tuple[int, int], ...]]:
    """Seeded binary dataset embedding implication rules col_a -> col_b.

    Free columns are uniform; for each planted pair the consequent is
    forced to 1 whenever the antecedent is 1 and stays random (biased
    low) otherwise, so the converse implication does not sneak in.
    """
    rng = random.Random(seed)
    planted_cols = {a for a, _ in planted} | {b for _, b in planted}
    names = [f"p{i:02d}" for i in range(props)]
    lines = ["object_id," + ",".join(names)]
    for r in range(rows):
        bits = [0] * props
        for col in range(props):
            if col not in planted_cols:
                bits[col] = rng.randint(0, 1)
        for a, b in planted:
            bits[a] = 1 if rng.random() < 0.35 else 0
            if bits[a]:
                bits[b] = 1
            else:
                bits[b] = 1 if rng.random() < 0.30 else 0
        lines.append(f"OBJ{r:04d}," + ",".join(str(b) for b in bits))
    return ("\n".join(lines) + "\n").encode(), planted
