import random

import pytest

from mathdoc.boolpoly import (
    BoolPoly,
    ContextTooLarge,
    GroebnerResult,
    TermOrder,
    buchberger_moeller,
    normal_form,
    parse_poly,
    verify_gb_oracle,
)

from helpers import ALL_ORDERS, random_poly, random_points, small_context

CTX2 = small_context(2)


class TestSpecExamples:
    def test_diagonal_pair(self):
        result = buchberger_moeller([0b00, 0b11], TermOrder.DEGLEX, CTX2)
        assert [g for g in result.basis] == [parse_poly("x1 + x2", CTX2)]
        assert result.standard_monomials == (0, 0b10)
        assert verify_gb_oracle([0b00, 0b11], result).all_passed()

    def test_full_cube_gives_zero_ideal(self):
        result = buchberger_moeller(range(4), TermOrder.DEGLEX, CTX2)
        assert result.basis == ()
        assert result.standard_monomials == (0, 0b10, 0b01, 0b11)
        assert verify_gb_oracle(range(4), result).all_passed()

    def test_single_point_ideal(self):
        point = 0b01  # (1, 0)
        result = buchberger_moeller([point], TermOrder.DEGLEX, CTX2)
        assert set(result.basis) == {parse_poly("x1 + 1", CTX2), parse_poly("x2", CTX2)}
        assert result.standard_monomials == (0,)
        for g in result.basis:
            assert g.evaluate(point) == 0
        assert verify_gb_oracle([point], result).all_passed()

    def test_empty_point_set_gives_unit_ideal(self):
        for order in ALL_ORDERS:
            result = buchberger_moeller([], order, CTX2)
            assert result.basis == (BoolPoly.one(CTX2),)
            assert result.standard_monomials == ()


class TestInvariants:
    def test_every_subset_of_two_cube_passes_oracle(self):
        for bits in range(16):
            points = [p for p in range(4) if bits >> p & 1]
            for order in ALL_ORDERS:
                result = buchberger_moeller(points, order, CTX2)
                report = verify_gb_oracle(points, result)
                assert report.all_passed(), report.failures

    def test_standard_count_equals_distinct_points(self):
        rng = random.Random(3)
        ctx = small_context(4)
        for _ in range(30):
            points = random_points(rng, 4, rng.randint(0, 20))
            result = buchberger_moeller(points, TermOrder.DEGREVLEX, ctx)
            assert len(result.standard_monomials) == len(set(points))

    def test_deterministic_and_point_order_independent(self):
        rng = random.Random(5)
        ctx = small_context(4)
        points = random_points(rng, 4, 9)
        for order in ALL_ORDERS:
            first = buchberger_moeller(points, order, ctx)
            again = buchberger_moeller(points, order, ctx)
            shuffled = list(points)
            rng.shuffle(shuffled)
            third = buchberger_moeller(shuffled + [points[0]], order, ctx)
            assert first == again == third

    def test_membership_iff_vanishing_exhaustive_n3(self):
        ctx = small_context(3)
        rng = random.Random(9)
        for bits in range(256):
            points = [p for p in range(8) if bits >> p & 1]
            result = buchberger_moeller(points, TermOrder.DEGREVLEX, ctx)
            for _ in range(3):
                f = random_poly(rng, ctx)
                vanishes = all(f.evaluate(p) == 0 for p in points)
                reduced = normal_form(f, result.basis, result.order)
                assert reduced.is_zero() == vanishes

    def test_nf_agreement_and_support(self):
        ctx = small_context(4)
        rng = random.Random(13)
        for _ in range(40):
            points = set(random_points(rng, 4, rng.randint(1, 12)))
            result = buchberger_moeller(points, TermOrder.DEGLEX, ctx)
            f = random_poly(rng, ctx)
            nf = normal_form(f, result.basis, result.order)
            # f + NF(f) lies in the ideal, hence vanishes on the points
            assert all((f + nf).evaluate(p) == 0 for p in points)
            assert set(nf.monomials) <= set(result.standard_monomials)


class TestOracleDetectsDefects:
    def test_non_vanishing_basis_fails_check_a(self):
        bogus = GroebnerResult(
            CTX2, TermOrder.DEGLEX, (parse_poly("x1", CTX2),), (0,)
        )
        report = verify_gb_oracle([0b01], bogus)
        assert not report.vanishing

    def test_incomplete_basis_fails_check_b(self):
        bogus = GroebnerResult(CTX2, TermOrder.DEGLEX, (), (0, 0b01, 0b10, 0b11))
        report = verify_gb_oracle([0b01], bogus)
        assert not report.completeness

    def test_wrong_standard_monomials_fail_check_c(self):
        good = buchberger_moeller([0b00, 0b11], TermOrder.DEGLEX, CTX2)
        tampered = GroebnerResult(CTX2, good.order, good.basis, (0,))
        report = verify_gb_oracle([0b00, 0b11], tampered)
        assert not report.standard_count

    def test_redundant_basis_fails_reducedness(self):
        good = buchberger_moeller([0b01], TermOrder.DEGLEX, CTX2)
        # x1*x2 + x2 is in the ideal but reducible by x2
        extra = parse_poly("x1*x2 + x2", CTX2)
        bloated = GroebnerResult(
            CTX2, good.order, good.basis + (extra,), good.standard_monomials
        )
        report = verify_gb_oracle([0b01], bloated)
        assert not report.reducedness

    def test_oracle_rejects_oversized_contexts(self):
        ctx = small_context(13)
        result = buchberger_moeller([0], TermOrder.LEX, ctx)
        with pytest.raises(ContextTooLarge):
            verify_gb_oracle([0], result)


class TestModerateScale:
    def test_oracle_on_random_n4_subsets(self):
        rng = random.Random(21)
        ctx = small_context(4)
        universe = list(range(16))
        for _ in range(25):
            points = rng.sample(universe, rng.randint(0, 16))
            for order in ALL_ORDERS:
                result = buchberger_moeller(points, order, ctx)
                assert verify_gb_oracle(points, result).all_passed()

    def test_sixteen_variable_run_is_exact(self):
        ctx = small_context(16)
        rng = random.Random(33)
        points = [rng.getrandbits(16) for _ in range(120)]
        result = buchberger_moeller(points, TermOrder.DEGREVLEX, ctx)
        assert len(result.standard_monomials) == len(set(points))
        for g in result.basis:
            assert all(g.evaluate(p) == 0 for p in points)
