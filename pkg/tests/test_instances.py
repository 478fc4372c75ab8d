import itertools
import json
import random

import numpy as np
import pytest

from forrlab.boolfun import Dyadic, forrelation, is_bent
from forrlab.f2linalg import BitMatrix, BitVector, hard_matrices_from
from forrlab.instances import (
    BudgetExceededError,
    HardParams,
    HFamilySpec,
    KeyedMixerH,
    TableH,
    eval_f,
    eval_g,
    h_from_json,
    materialize,
    params_from_json,
    params_to_json,
    sample_instance,
    sample_params,
)
from forrlab.seeds import splitmix64


def identity_params(n, h, variant="standard", label="yes", a_bits=0):
    mats = hard_matrices_from(BitMatrix.identity(n), BitVector(n, a_bits))
    return HardParams(mats, h, variant, label)


class TestEval:
    def test_identity_zero_shift_is_inner_product(self):
        p = identity_params(2, TableH(1, 0))
        assert eval_f(p, BitVector.from_coords([1, 1])) == -1
        for bits in range(3):
            assert eval_f(p, BitVector(2, bits)) == 1

    def test_origin_value_is_h_at_zero(self):
        rng = random.Random(0)
        for kind in ("uniform", "table", "prf"):
            fam = HFamilySpec(kind, 3)
            p = sample_params(6, "standard", fam, "yes", rng)
            want = -1 if p.h(0) else 1
            assert eval_f(p, BitVector.zero(6)) == want

    def test_sketch_no_with_trivial_h_is_constant(self):
        p = identity_params(2, TableH(1, 0), variant="sketch", label="no")
        for bits in range(4):
            assert eval_f(p, BitVector(2, bits)) == 1
            assert eval_g(p, BitVector(2, bits)) == 1

    def test_standard_yes_identity_g_is_inner_product(self):
        p = identity_params(2, TableH(1, 0))
        assert eval_g(p, BitVector.from_coords([1, 1])) == -1

    def test_naive_origin_leak(self):
        rng = random.Random(1)
        zero = BitVector.zero(8)
        for label, want in (("yes", 1), ("no", -1)):
            p = sample_params(8, "naive", HFamilySpec("uniform", 4), label, rng)
            assert eval_f(p, zero) * eval_g(p, zero) == want

    def test_no_is_pointwise_negation_of_yes(self):
        rng = random.Random(2)
        fam = HFamilySpec("table", 3)
        mats_rng = random.Random(3)
        p_yes = sample_params(6, "standard", fam, "yes", mats_rng)
        p_no = HardParams(p_yes.matrices, p_yes.h, "standard", "no")
        for _ in range(50):
            y = BitVector(6, rng.getrandbits(6))
            assert eval_g(p_no, y) == -eval_g(p_yes, y)
            assert eval_f(p_no, y) == eval_f(p_yes, y)

    def test_dimension_mismatch(self):
        p = identity_params(2, TableH(1, 0))
        with pytest.raises(ValueError):
            eval_f(p, BitVector.zero(4))


class TestMaterialize:
    def test_identity_pair_is_inner_product(self):
        p = identity_params(2, TableH(1, 0))
        f, g = materialize(p)
        assert [f.sign(i) for i in range(4)] == [1, 1, 1, -1]
        assert [g.sign(i) for i in range(4)] == [1, 1, 1, -1]

    def test_agrees_with_point_eval(self):
        rng = random.Random(4)
        for variant in ("standard", "sketch", "naive"):
            for label in ("yes", "no"):
                p = sample_params(8, variant, HFamilySpec("uniform", 4), label, rng)
                f, g = materialize(p)
                for _ in range(100):
                    bits = rng.getrandbits(8)
                    v = BitVector(8, bits)
                    assert f.sign(bits) == eval_f(p, v)
                    assert g.sign(bits) == eval_g(p, v)

    def test_standard_pairs_are_extremal_all_families(self):
        rng = random.Random(5)
        for n in (2, 4, 6, 8, 10):
            m = n // 2
            fams = [
                HFamilySpec("uniform", m),
                HFamilySpec("table", m),
                HFamilySpec("poly", m, min(2, m)),
                HFamilySpec("prf", m),
            ]
            for fam, label in itertools.product(fams, ("yes", "no")):
                p = sample_params(n, "standard", fam, label, rng)
                f, g = materialize(p)
                want = Dyadic(1, 0) if label == "yes" else Dyadic(-1, 0)
                assert forrelation(f, g) == want
                if label == "yes":
                    assert is_bent(f)

    def test_sketch_values(self):
        rng = random.Random(6)
        for n in (2, 4, 6, 8):
            fam = HFamilySpec("table", n // 2)
            p = sample_params(n, "sketch", fam, "yes", rng)
            assert forrelation(*materialize(p)) == Dyadic(1, 0)
            p = sample_params(n, "sketch", fam, "no", rng)
            assert forrelation(*materialize(p)) == Dyadic(1, n // 2)


class TestHFamilies:
    def test_prf_mixer_matches_documented_formula(self):
        h = KeyedMixerH("prf", 8, key=0xDEADBEEF12345678)
        for u in (0, 1, 17, 200, 255):
            want = splitmix64(0xDEADBEEF12345678 ^ splitmix64(u)) & 1
            assert h(u) == want

    def test_mixer_vectorized_matches_scalar(self):
        h = KeyedMixerH("uniform", 10, key=12345)
        us = np.arange(1 << 10, dtype=np.uint64)
        vec = h.eval_all(us)
        for u in range(0, 1 << 10, 37):
            assert int(vec[u]) == h(u)

    def test_poly_against_independent_monomial_evaluator(self):
        rng = random.Random(7)
        fam = HFamilySpec("poly", 4, 2)
        h = fam.sample(rng)
        for u in range(16):
            # independent evaluation: explicit product over variables
            acc = 0
            for mask in h.monomials:
                term = 1
                for i in range(4):
                    if (mask >> i) & 1:
                        term &= (u >> i) & 1
                acc ^= term
            assert h(u) == acc

    def test_poly_degree_bound_on_monomials(self):
        rng = random.Random(8)
        h = HFamilySpec("poly", 6, 2).sample(rng)
        assert all(bin(m).count("1") <= 2 for m in h.monomials)

    def test_poly_degree_validation(self):
        with pytest.raises(ValueError):
            HFamilySpec("poly", 4, 5)
        with pytest.raises(ValueError):
            HFamilySpec("poly", 4)

    def test_table_h_eval_all(self):
        h = TableH(3, 0b10110010)
        us = np.arange(8, dtype=np.uint64)
        assert h.eval_all(us).tolist() == [0, 1, 0, 0, 1, 1, 0, 1]

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            HFamilySpec("magic", 4)

    def test_parse(self):
        assert HFamilySpec.parse("poly:2", 8) == HFamilySpec("poly", 8, 2)
        assert HFamilySpec.parse("uniform", 8) == HFamilySpec("uniform", 8)

    def test_h_json_roundtrip(self):
        rng = random.Random(9)
        for kind, deg in (("uniform", None), ("table", None), ("poly", 2), ("prf", None)):
            h = HFamilySpec(kind, 4, deg).sample(rng)
            h2 = h_from_json(h.to_json(), 4)
            for u in range(16):
                assert h(u) == h2(u)


class TestOracle:
    def test_determinism_same_seed(self):
        fam = HFamilySpec("uniform", 8)
        o1 = sample_instance(16, "standard", fam, "yes", random.Random(42))
        o2 = sample_instance(16, "standard", fam, "yes", random.Random(42))
        rng = random.Random(0)
        for _ in range(50):
            v = BitVector(16, rng.getrandbits(16))
            assert o1.query_f(v) == o2.query_f(v)
            assert o1.query_g(v) == o2.query_g(v)

    def test_counters_track_queries(self):
        o = sample_instance(8, "standard", HFamilySpec("uniform", 4), "yes", random.Random(1))
        o.query_f(BitVector.zero(8))
        o.query_f(BitVector.zero(8))
        o.query_g(BitVector.zero(8))
        assert (o.queries_f, o.queries_g, o.total_queries) == (2, 1, 3)

    def test_budget_enforced_and_clone_resets(self):
        o = sample_instance(8, "standard", HFamilySpec("uniform", 4), "yes",
                            random.Random(2), limit=3)
        z = BitVector.zero(8)
        o.query_f(z), o.query_g(z), o.query_f(z)
        with pytest.raises(BudgetExceededError):
            o.query_g(z)
        fresh = o.clone()
        assert fresh.total_queries == 0
        assert fresh.query_f(z) == eval_f(o.params, z)

    def test_repeated_query_same_answer(self):
        o = sample_instance(8, "standard", HFamilySpec("uniform", 4), "yes", random.Random(3))
        v = BitVector(8, 0xA5)
        assert o.query_f(v) == o.query_f(v)

    def test_lazy_large_arity(self):
        # no table materialization: n = 64 queries answer immediately
        o = sample_instance(64, "standard", HFamilySpec("prf", 32), "yes", random.Random(4))
        rng = random.Random(5)
        for _ in range(20):
            assert o.query_f(BitVector(64, rng.getrandbits(64))) in (-1, 1)


class TestValidation:
    def test_odd_arity_rejected(self):
        with pytest.raises(ValueError):
            sample_params(5, "standard", HFamilySpec("uniform", 2), "yes", random.Random(0))

    def test_family_arity_mismatch(self):
        with pytest.raises(ValueError):
            sample_params(8, "standard", HFamilySpec("uniform", 3), "yes", random.Random(0))

    def test_bad_variant_and_label(self):
        with pytest.raises(ValueError):
            sample_params(4, "fancy", HFamilySpec("uniform", 2), "yes", random.Random(0))
        with pytest.raises(ValueError):
            sample_params(4, "standard", HFamilySpec("uniform", 2), "maybe", random.Random(0))


class TestParamsJson:
    def test_roundtrip_all_variants(self):
        rng = random.Random(10)
        probe = random.Random(11)
        for variant in ("standard", "sketch", "naive"):
            for kind, deg in (("uniform", None), ("table", None), ("poly", 2), ("prf", None)):
                p = sample_params(8, variant, HFamilySpec(kind, 4, deg), "no", rng)
                blob = json.dumps(params_to_json(p), sort_keys=True)
                p2 = params_from_json(json.loads(blob))
                for _ in range(25):
                    v = BitVector(8, probe.getrandbits(8))
                    assert eval_f(p, v) == eval_f(p2, v)
                    assert eval_g(p, v) == eval_g(p2, v)

    def test_schema_field_present(self):
        p = sample_params(4, "standard", HFamilySpec("uniform", 2), "yes", random.Random(12))
        assert params_to_json(p)["schema"] == 1
