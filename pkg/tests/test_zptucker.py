import itertools
import random

import pytest

from conftest import brute_alt
from kneserdiv.errors import ContractError, SizeCapError, SolverExhausted
from kneserdiv.kneser import seeded_coloring, verify_hyperedge
from kneserdiv.sets import FamilyDescriptor, Subset
from kneserdiv.zptucker import (TuckerInstance, alt, chain_solve,
                                check_chain_solution, check_equivariance,
                                extract_from_chain, instance_from_table,
                                lambda_almost_stable, lambda_general,
                                omega_mul, preceq, random_instance,
                                random_table, reduce_astab_to_tucker,
                                reduce_kneser_to_tucker, table_from_json,
                                table_to_json)

# sign conventions for p = 2: "+" is the identity w^2 = 2, "-" is w^1 = 1
PLUS, MINUS = 2, 1


def nonzero_vectors(n, p):
    for x in itertools.product(range(p + 1), repeat=n):
        if any(x):
            yield x


class TestBasics:
    def test_preceq(self):
        assert preceq((PLUS, 0, 0), (PLUS, MINUS, 0))
        assert not preceq((PLUS, 0, 0), (MINUS, MINUS, 0))
        assert preceq((PLUS, 0, MINUS), (PLUS, 0, MINUS))
        with pytest.raises(ContractError):
            preceq((1, 0), (1, 0, 0))

    def test_omega_mul(self):
        # p = 2: rotation flips signs, twice is the identity
        x = (PLUS, 0, MINUS)
        assert omega_mul(1, x, 2) == (MINUS, 0, PLUS)
        assert omega_mul(2, x, 2) == x
        # p = 3 spec example (signs w^1, 0, w^3) -> (w^2, 0, w^1)
        assert omega_mul(1, (1, 0, 3), 3) == (2, 0, 1)
        with pytest.raises(ContractError):
            omega_mul(1, (0, 0), 2)

    def test_alt_spec_examples(self):
        assert alt((PLUS, MINUS, PLUS)) == 3
        assert alt((PLUS, PLUS, 0, PLUS)) == 1
        assert alt((1, 2, 2, 1, 0, 3)) == 4
        assert alt((0, 0)) == 0

    def test_alt_greedy_matches_bruteforce(self):
        for p in (2, 3):
            for n in (4, 5, 6):
                rng = random.Random(p * 100 + n)
                for _ in range(120):
                    x = tuple(rng.randrange(0, p + 1) for _ in range(n))
                    assert alt(x) == brute_alt(x), x

    def test_alt_exhaustive_small(self):
        for x in nonzero_vectors(5, 2):
            assert alt(x) == brute_alt(x)

    def test_alt_is_rotation_invariant(self):
        rng = random.Random(0)
        for p in (2, 3, 5):
            for _ in range(100):
                x = tuple(rng.randrange(0, p + 1) for _ in range(6))
                if not any(x):
                    continue
                for t in range(1, p + 1):
                    assert alt(omega_mul(t, x, p)) == alt(x)


class TestLambdaGeneral:
    def setup_method(self):
        self.fam = FamilyDescriptor.all_k(5, 2)
        self.col = seeded_coloring(self.fam, 2, seed=0)

    def test_case_one_examples(self):
        # cd = 3, so sizes up to 2 are in the band
        assert lambda_general(self.fam, self.col, 2, (PLUS, 0, 0, 0, 0)) == (PLUS, 1)
        assert lambda_general(self.fam, self.col, 2, (MINUS, PLUS, 0, 0, 0)) == (MINUS, 2)

    def test_case_two_example(self):
        x = (PLUS, 0, PLUS, 0, PLUS)
        want_color = self.col(Subset.of(5, [1, 3]))
        assert lambda_general(self.fam, self.col, 2, x) == (PLUS, want_color + 2)

    def test_zero_vector_rejected(self):
        with pytest.raises(ContractError):
            lambda_general(self.fam, self.col, 2, (0, 0, 0, 0, 0))

    def test_wrong_defect_surfaces_as_contract_error(self):
        # claiming a huge defect forces case 2 on vectors without members
        with pytest.raises(ContractError):
            lambda_general(self.fam, self.col, 2, (PLUS, 0, 0, 0, 0), cd=5)

    def test_padding_divisibility_enforced(self):
        fam9 = FamilyDescriptor.all_k(9, 2)
        col9 = seeded_coloring(fam9, 2, seed=0)
        with pytest.raises(ContractError):
            lambda_general(fam9, col9, 3, tuple([1] * 10))  # (10-1) % 2 != 0


class TestLambdaAlmostStable:
    def setup_method(self):
        self.fam = FamilyDescriptor.almost_stable(5, 2)
        self.col = seeded_coloring(self.fam, 2, seed=1)

    def test_case_one_examples(self):
        assert lambda_almost_stable(5, 2, 2, self.col, (PLUS, MINUS, 0, 0, 0)) == (PLUS, 2)
        assert lambda_almost_stable(5, 2, 2, self.col, (PLUS, 0, PLUS, 0, PLUS)) == (PLUS, 1)

    def test_case_two_example(self):
        x = (PLUS, MINUS, PLUS, 0, 0)
        want = self.col(Subset.of(5, [1, 3]))
        assert lambda_almost_stable(5, 2, 2, self.col, x) == (PLUS, want + 2)

    def test_padded_length_enforced(self):
        fam9 = FamilyDescriptor.almost_stable(9, 2)
        col9 = seeded_coloring(fam9, 2, seed=0)
        with pytest.raises(ContractError):
            lambda_almost_stable(9, 2, 3, col9, tuple([1] * 9))  # needs length 10


class TestInstanceAndEquivariance:
    def test_s_bound_enforced(self):
        with pytest.raises(ContractError):
            TuckerInstance(5, 2, 5, lambda x: (2, 1))

    def test_composite_p_rejected(self):
        with pytest.raises(ContractError):
            TuckerInstance(5, 4, 1, lambda x: (4, 1))

    def test_constructed_instances_equivariant_exhaustive(self):
        fam = FamilyDescriptor.all_k(5, 2)
        col = seeded_coloring(fam, 2, seed=2)
        red = reduce_kneser_to_tucker(fam, col, 2)
        for x in nonzero_vectors(5, 2):
            for t in (1, 2):
                assert check_equivariance(red.instance, x, t)

    def test_astab_instance_equivariant_random(self):
        fam = FamilyDescriptor.almost_stable(9, 2)
        col = seeded_coloring(fam, 2, seed=3)
        red = reduce_astab_to_tucker(9, 2, 3, col)
        rng = random.Random(7)
        for _ in range(1000):
            x = tuple(rng.randrange(0, 4) for _ in range(red.instance.n))
            if not any(x):
                continue
            assert check_equivariance(red.instance, x, rng.randrange(1, 4))

    def test_random_table_instances_equivariant(self):
        inst = random_instance(5, 3, seed=4)
        for x in nonzero_vectors(5, 3):
            for t in (1, 2, 3):
                assert check_equivariance(inst, x, t)

    def test_label_range_always_in_s(self):
        fam = FamilyDescriptor.all_k(5, 2)
        col = seeded_coloring(fam, 2, seed=5)
        red = reduce_kneser_to_tucker(fam, col, 2)
        assert red.instance.s == 4  # (5-1)/(2-1)
        for x in nonzero_vectors(5, 2):
            sign, idx = red.instance.lam(x)
            assert 1 <= idx <= 4 and sign in (1, 2)


class TestChainSolve:
    def test_general_pipeline_small(self):
        fam = FamilyDescriptor.all_k(5, 2)
        for seed in range(8):
            col = seeded_coloring(fam, 2, seed)
            red = reduce_kneser_to_tucker(fam, col, 2)
            res = chain_solve(red.instance)
            assert check_chain_solution(red.instance, res.chain)
            edge = extract_from_chain(red, res.chain)
            assert verify_hyperedge(fam, 2, col, edge)

    def test_astab_pipeline_small(self):
        fam = FamilyDescriptor.almost_stable(5, 2)
        for seed in range(5):
            col = seeded_coloring(fam, 2, seed)
            red = reduce_astab_to_tucker(5, 2, 2, col)
            res = chain_solve(red.instance)
            edge = extract_from_chain(red, res.chain)
            assert verify_hyperedge(fam, 2, col, edge)

    def test_chain_is_ascending_with_distinct_labels(self):
        fam = FamilyDescriptor.all_k(6, 2)
        col = seeded_coloring(fam, 3, seed=1)
        red = reduce_kneser_to_tucker(fam, col, 2)
        res = chain_solve(red.instance)
        for a, b in zip(res.chain, res.chain[1:]):
            assert preceq(a, b) and a != b
        assert len(set(res.signs)) == red.p

    def test_random_equivariant_instances_total(self):
        count = 0
        for p in (2, 3):
            for n in (3, 4, 5):
                if (n - 1) // (p - 1) < 1:
                    continue
                for seed in range(6):
                    inst = random_instance(n, p, seed=seed)
                    res = chain_solve(inst)
                    assert check_chain_solution(inst, res.chain)
                    count += 1
        assert count >= 30

    def test_determinism(self):
        inst = random_instance(5, 2, seed=9)
        assert chain_solve(inst).chain == chain_solve(inst).chain

    def test_totality_is_forced_by_construction(self):
        # every representable instance is equivariant (the evaluator rotates
        # through canonical form), so even adversarial constant tables close
        # into maps that must have a chain
        from kneserdiv.zptucker import _canonical_vectors, _encode
        table = {_encode(xc, 2): (2, 1) for xc in _canonical_vectors(3, 2)}
        inst = instance_from_table(3, 2, 1, table, name="adversarial")
        res = chain_solve(inst)
        assert check_chain_solution(inst, res.chain)

    def test_work_cap(self):
        inst = random_instance(5, 3, seed=0)
        with pytest.raises(SizeCapError):
            chain_solve(inst, work_cap=10)

    def test_check_chain_rejects_duplicates(self):
        fam = FamilyDescriptor.all_k(5, 2)
        col = seeded_coloring(fam, 2, seed=0)
        red = reduce_kneser_to_tucker(fam, col, 2)
        res = chain_solve(red.instance)
        assert not check_chain_solution(red.instance, [res.chain[0], res.chain[0]])


class TestBudgets:
    def test_general_budget_enforced(self):
        fam = FamilyDescriptor.all_k(5, 2)
        wrong = seeded_coloring(fam, 3, seed=0)
        with pytest.raises(ContractError):
            reduce_kneser_to_tucker(fam, wrong, 2)

    def test_astab_budget_enforced(self):
        fam = FamilyDescriptor.almost_stable(9, 2)
        wrong = seeded_coloring(fam, 3, seed=0)
        with pytest.raises(ContractError):
            reduce_astab_to_tucker(9, 2, 3, wrong)

    def test_padding_sizes(self):
        fam = FamilyDescriptor.all_k(9, 2)
        col = seeded_coloring(fam, 2, seed=0)
        red = reduce_kneser_to_tucker(fam, col, 3)
        assert red.padded_n == 9 and red.instance.s == 4 and red.band == 2
        fam_a = FamilyDescriptor.almost_stable(9, 2)
        col_a = seeded_coloring(fam_a, 2, seed=0)
        red_a = reduce_astab_to_tucker(9, 2, 3, col_a)
        assert red_a.padded_n == 10 and red_a.instance.s == 4 and red_a.band == 2


class TestTableJson:
    def test_round_trip(self):
        table = random_table(4, 3, 1, seed=5)
        payload = table_to_json(4, 3, 1, table)
        inst = table_from_json(payload)
        ref = instance_from_table(4, 3, 1, table)
        for x in nonzero_vectors(4, 3):
            assert inst.lam(x) == ref.lam(x)
