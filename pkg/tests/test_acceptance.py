"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``)."""

import random
import time

from fastapi.testclient import TestClient

from mathdoc import modelkg, rulemine, workflowdoc
from mathdoc.boolpoly import (
    TermOrder,
    buchberger_moeller,
    normal_form,
    verify_gb_oracle,
)
from mathdoc.modelkg import (
    CycleIntroduced,
    DomainRangeViolation,
    DuplicateEntity,
    EntityKind,
    InvalidKind,
    KnowledgeGraph,
    MissingEntity,
    RELATION_TABLE,
    sequential_id_factory,
)
from mathdoc.rulemine import Implication, form_holds
from mathdoc.service import ServiceConfig, create_app

from helpers import (
    ALL_ORDERS,
    FIXTURES,
    FIXTURE_ANSWERS,
    offline_resolver,
    random_points,
    random_poly,
    small_context,
    synthetic_dataset,
)


def report(name: str, ok: bool, extra: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({extra})" if extra else ""
    print(f"{status}: {name}{suffix}")
    assert ok, name


def test_criterion_gb_oracle_exhaustive_n3():
    started = time.perf_counter()
    ctx = small_context(3)
    checked = 0
    ok = True
    for bits in range(256):
        points = [p for p in range(8) if bits >> p & 1]
        for order in ALL_ORDERS:
            result = buchberger_moeller(points, order, ctx)
            if not verify_gb_oracle(points, result).all_passed():
                ok = False
            checked += 1
    elapsed = time.perf_counter() - started
    report(
        "GB oracle, exhaustive: all 256 subsets of {0,1}^3 x 3 orders",
        ok and elapsed < 5.0,
        f"{checked} runs in {elapsed:.2f}s",
    )


def test_criterion_gb_oracle_randomized_n4_n5():
    started = time.perf_counter()
    rng = random.Random(40405)
    ok = True
    runs = 0
    for n, count in ((4, 200), (5, 50)):
        ctx = small_context(n)
        universe = list(range(1 << n))
        for _ in range(count):
            points = rng.sample(universe, rng.randint(0, 1 << n))
            for order in ALL_ORDERS:
                result = buchberger_moeller(points, order, ctx)
                if not verify_gb_oracle(points, result).all_passed():
                    ok = False
                runs += 1
    elapsed = time.perf_counter() - started
    report(
        "GB oracle, randomized: 200 subsets of {0,1}^4 + 50 of {0,1}^5",
        ok and elapsed < 30.0,
        f"{runs} runs in {elapsed:.2f}s",
    )


def test_criterion_membership_iff_vanishing():
    rng = random.Random(1000)
    counterexamples = 0
    for _ in range(1000):
        n = rng.randint(1, 4)
        ctx = small_context(n)
        points = set(random_points(rng, n, rng.randint(0, 1 << n)))
        order = rng.choice(ALL_ORDERS)
        basis = buchberger_moeller(points, order, ctx).basis
        f = random_poly(rng, ctx, max_monomials=8)
        vanishes = all(f.evaluate(p) == 0 for p in points)
        if normal_form(f, basis, order).is_zero() != vanishes:
            counterexamples += 1
    report(
        "Membership iff vanishing: 1000 random polynomials, n <= 4",
        counterexamples == 0,
        f"{counterexamples} counterexamples",
    )


def test_criterion_rule_faithfulness():
    rng = random.Random(777)
    mismatches = 0
    rules_checked = 0
    for _ in range(120):
        n = rng.randint(2, 4)
        names = [f"v{i}" for i in range(n)]
        row_count = rng.randint(1, 10)
        lines = ["object_id," + ",".join(names)]
        for r in range(row_count):
            lines.append(f"R{r}," + ",".join(str(rng.randint(0, 1)) for _ in range(n)))
        dataset = rulemine.load_csv(("\n".join(lines) + "\n").encode())
        for order in ALL_ORDERS:
            ruleset = rulemine.mine_rules(dataset, order)
            for rule in ruleset.rules:
                rules_checked += 1
                for p in range(1 << n):
                    holds = form_holds(rule.form, p)
                    if holds != (rule.polynomial.evaluate(p) == 0):
                        mismatches += 1
    report(
        "Rule faithfulness: rendered statements match polynomial zero sets",
        mismatches == 0,
        f"{rules_checked} rules exhaustively checked, {mismatches} mismatches",
    )


def test_criterion_paper_scale_smoke():
    csv_bytes, planted = synthetic_dataset(rows=333, props=16)
    started = time.perf_counter()
    dataset = rulemine.load_csv(csv_bytes)
    ruleset = rulemine.mine_rules(dataset)
    elapsed = time.perf_counter() - started
    assert len(dataset.rows) == 333 and len(dataset.property_names) == 16

    mined_implications = {
        (rule.form.antecedent, rule.form.consequent)
        for rule in ruleset.rules
        if isinstance(rule.form, Implication)
    }
    missing = [
        (a, b) for a, b in planted if (1 << a, 1 << b) not in mined_implications
    ]

    baseline = rulemine.export_rules_json(ruleset)
    rerun_identical = all(
        rulemine.export_rules_json(rulemine.mine_rules(rulemine.load_csv(csv_bytes))) == baseline
        for _ in range(2)
    )
    header, *rows = csv_bytes.decode().strip().split("\n")
    rng = random.Random(5)
    rng.shuffle(rows)
    shuffled = ("\n".join([header] + rows) + "\n").encode()
    shuffle_identical = (
        rulemine.export_rules_json(rulemine.mine_rules(rulemine.load_csv(shuffled))) == baseline
    )

    report(
        "Paper-scale smoke: 333x16 synthetic dataset with planted implications",
        elapsed < 10.0 and not missing and rerun_identical and shuffle_identical,
        f"mined {len(ruleset.rules)} rules in {elapsed:.2f}s; planted implications found: "
        f"{len(planted) - len(missing)}/{len(planted)}",
    )


def _random_valid_mutation(rng, kg):
    kinds = list(EntityKind)
    if rng.random() < 0.5 or len(kg.entities) < 4:
        kind = rng.choice(kinds)
        new_id = kg.create_entity(kind, f"{kind.value}-{rng.randint(0, 60)}", dedup_policy="reuse")
        if kind is EntityKind.QUANTITY:
            # keep the report literally empty: a quantity warns until it has a kind
            kind_id = kg.create_entity(EntityKind.QUANTITY_KIND, f"kind-{rng.randint(0, 9)}")
            kg.add_relation(new_id, "hasQuantityKind", kind_id)
        return True
    relation = rng.choice(list(RELATION_TABLE))
    domain, range_ = RELATION_TABLE[relation]
    srcs = sorted(e.id for e in kg.entities.values() if e.kind == domain)
    dsts = sorted(e.id for e in kg.entities.values() if e.kind == range_)
    if not srcs or not dsts:
        return False
    src, dst = rng.choice(srcs), rng.choice(dsts)
    if relation is modelkg.RelationKind.GENERALIZES and (
        src == dst or kg._reaches(dst, src, relation)
    ):
        return False
    kg.add_relation(src, relation, dst)
    return True


def _random_invalid_mutation(rng, kg):
    """Attempt one invalid mutation; returns True when it was rejected
    with the documented error and left the graph untouched."""
    choice = rng.randrange(5)
    version = kg.version
    try:
        if choice == 0:
            kg.create_entity("MathematicalModel", "")
            return False
        if choice == 1:
            kg.create_entity("NotAKind", "x")
            return False
        if choice == 2:
            models = [e.id for e in kg.entities.values() if e.kind is EntityKind.MATHEMATICAL_MODEL]
            problems = [e.id for e in kg.entities.values() if e.kind is EntityKind.RESEARCH_PROBLEM]
            if not models or not problems:
                kg.add_relation("ghost-src", "addressesProblem", "ghost-dst")
                return False
            kg.add_relation(sorted(problems)[0], "addressesProblem", sorted(models)[0])
            return False
        if choice == 3:
            kg.add_relation("ghost", "generalizes", "ghost")
            return False
        existing = sorted(kg.entities.values(), key=lambda e: e.id)
        if not existing:
            kg.create_entity("MathematicalModel", "")
            return False
        entity = rng.choice(existing)
        kg.create_entity(entity.kind, entity.label, dedup_policy="strict")
        return False
    except (InvalidKind, DomainRangeViolation, MissingEntity, DuplicateEntity, CycleIntroduced):
        return kg.version == version


def test_criterion_kg_integrity():
    rng = random.Random(606)
    kg = KnowledgeGraph(id_factory=sequential_id_factory())
    applied = 0
    rejected = 0
    healthy = True
    while applied < 1000 or rejected < 200:
        if (applied >= 1000 or rng.random() < 0.2) and rejected < 200:
            if _random_invalid_mutation(rng, kg):
                rejected += 1
            else:
                healthy = False
                break
        else:
            if _random_valid_mutation(rng, kg):
                applied += 1
            else:
                continue
        if not kg.validate().empty():
            healthy = False
            break

    round_trips_ok = True
    for seed in range(50):
        g = KnowledgeGraph(id_factory=sequential_id_factory())
        sub_rng = random.Random(seed)
        for _ in range(sub_rng.randint(1, 40)):
            _random_valid_mutation(sub_rng, g)
        data = modelkg.export_json(g)
        if modelkg.export_json(modelkg.import_json(data)) != data:
            round_trips_ok = False

    report(
        "KG integrity: 1000 valid + 200 invalid mutations, 50 round-trips",
        healthy and round_trips_ok,
        f"{applied} applied, {rejected} rejected",
    )


def test_criterion_end_to_end_fixture(data_dir):
    template = workflowdoc.default_template()
    kg = KnowledgeGraph(id_factory=sequential_id_factory())
    resolver = offline_resolver()
    session = workflowdoc.new_session(template, id_factory=lambda: "sess-accept", clock=lambda: 0.0)
    for qid, value in FIXTURE_ANSWERS:
        workflowdoc.set_answer(session, template, qid, value, kg=kg, clock=lambda: 0.0)
    workflowdoc.mark_complete(session, template)
    page = workflowdoc.render_wiki(session, template)
    golden = (data_dir / "golden_wiki.md").read_text()

    export = workflowdoc.export_to_kg(session, template, kg, resolver=resolver)

    model = kg.find_entities(kind="MathematicalModel")[0]
    card = kg.model_card(model.id)
    shape_ok = (
        {f["label"] for f in card["formulations"]}
        == {"Boolean Ring Formulation", "Vanishing Ideal Formulation"}
        and card["tasks"][0]["label"] == "Extraction of Logical Rules"
        and [q["label"] for q in card["tasks"][0]["input_quantities"]] == ["encoded object vector"]
        and [q["label"] for q in card["tasks"][0]["output_quantities"]] == ["logical rules"]
        and card["problems"][0]["label"] == "Identification of Destruction Rules"
        and card["problems"][0]["fields"][0]["label"] == "Egyptology"
        and any(
            q["label"] == "object property" and [k["label"] for k in q["quantity_kinds"]] == ["boolean"]
            for f in card["formulations"]
            for q in f["quantities"]
        )
    )
    re_export = workflowdoc.export_to_kg(session, template, kg, resolver=resolver)

    report(
        "End-to-end fixture: golden wiki, Fig-shaped export, idempotent re-export",
        page.markdown == golden and shape_ok and re_export.created == (),
        f"{len(export.created)} entities created, re-export created {len(re_export.created)}",
    )


def test_criterion_api_equivalence(tmp_path, data_dir):
    fixture_bytes = (data_dir / "golden_kg_fixture.json").read_bytes()
    store_dir = tmp_path / "store"
    store_dir.mkdir()
    (store_dir / "kg.json").write_bytes(fixture_bytes)
    config = ServiceConfig(data_dir=store_dir, fixtures_path=FIXTURES)
    library_kg = modelkg.import_json(fixture_bytes, id_factory=sequential_id_factory())
    template = workflowdoc.default_template()
    resolver = offline_resolver()
    checks = []

    with TestClient(create_app(config, id_factory=sequential_id_factory())) as client:
        checks.append(client.get("/api/template").json() == template.to_dict())
        checks.append(client.get("/api/kg/export").content == modelkg.export_json(library_kg))
        checks.append(
            client.get("/api/kg/export", params={"format": "triples"}).content
            == modelkg.export_triples(library_kg, "https://example.org/mathdoc/")
        )
        model = library_kg.find_entities(kind="MathematicalModel")[0]
        checks.append(client.get(f"/api/kg/entities/{model.id}").json() == model.to_dict())
        checks.append(
            client.get(f"/api/kg/entities/{model.id}/card").json() == library_kg.model_card(model.id)
        )
        checks.append(
            client.get("/api/kg/entities", params={"kind": "Quantity"}).json()["entities"]
            == [e.to_dict() for e in library_kg.find_entities(kind="Quantity")]
        )
        checks.append(
            client.get("/api/kg/validate").json()["empty"] == library_kg.validate().empty()
        )

        # session lifecycle: the restored session must behave identically
        session_id = client.post("/api/sessions").json()["session_id"]
        for qid, value in FIXTURE_ANSWERS:
            client.put(f"/api/sessions/{session_id}/answers/{qid}", json={"value": value})
        api_session = client.get(f"/api/sessions/{session_id}").json()
        restored = workflowdoc.session_from_dict(api_session, template)
        checks.append(
            client.get(f"/api/sessions/{session_id}/completeness").json()["missing"]
            == workflowdoc.completeness(restored, template)
        )
        api_suggest = client.get(
            f"/api/sessions/{session_id}/suggest/general.publication"
        ).json()["candidates"]
        lib_suggest = [
            c.to_dict()
            for c in workflowdoc.suggest(
                restored, template, "general.publication", kg=library_kg, resolver=resolver
            )
        ]
        checks.append(api_suggest == lib_suggest)

        api_export = client.post(f"/api/sessions/{session_id}/export", json={}).json()
        lib_report = workflowdoc.export_to_kg(restored, template, library_kg, resolver=resolver)
        lib_page = workflowdoc.render_wiki(restored, template)
        checks.append(api_export["wiki_markdown"] == lib_page.markdown)
        checks.append(api_export["export_report"] == lib_report.to_dict())
        checks.append(client.get("/api/kg/export").content == modelkg.export_json(library_kg))

        # entities and relations after the export continue the same id sequence
        created = client.post(
            "/api/kg/entities", json={"kind": "Software", "label": "CAS shell"}
        ).json()
        lib_id = library_kg.create_entity("Software", "CAS shell")
        checks.append(created["id"] == lib_id)
        checks.append(created["entity"] == library_kg.get(lib_id).to_dict())
        workflow_id = api_export["export_report"]["workflow_id"]
        client.post(
            "/api/kg/relations",
            json={"src": workflow_id, "kind": "workflowUsesSoftware", "dst": created["id"]},
        )
        library_kg.add_relation(lib_report.workflow_id, "workflowUsesSoftware", lib_id)
        checks.append(client.get("/api/kg/export").content == modelkg.export_json(library_kg))

        # analysis job equals the direct mining pipeline
        csv_bytes = (FIXTURES / "datasets" / "two_rows.csv").read_bytes()
        job_id = client.post(
            "/api/analysis/jobs",
            files={"file": ("two_rows.csv", csv_bytes, "text/csv")},
            data={"order": "deglex"},
        ).json()["job_id"]
        deadline = time.time() + 10
        while time.time() < deadline:
            if client.get(f"/api/analysis/jobs/{job_id}").json()["state"] in ("done", "failed"):
                break
            time.sleep(0.02)
        direct = rulemine.export_rules_json(
            rulemine.mine_rules(rulemine.load_csv(csv_bytes), TermOrder.DEGLEX)
        )
        checks.append(client.get(f"/api/analysis/jobs/{job_id}/rules").content == direct)

    report(
        "API equivalence: documented routes match direct library results",
        all(checks),
        f"{sum(checks)}/{len(checks)} route checks equal",
    )
