import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from qecauth import codes
from qecauth.codes import (
    LinearCode,
    WeightDistribution,
    benign_distance,
    check_rcw,
    css_from_selfdual,
    distance_estimate,
    dual,
    linear_circuit_from_matrix,
    min_distance,
    puncture_last,
    reed_muller,
    rm_css,
    sparsity_report,
)
from qecauth.errors import PunctureError, RankGuardError, SelfDualityError
from qecauth.symplectic import DetectionClass, PauliOp, classify, conjugate


class TestReedMuller:
    @pytest.mark.parametrize("i", [1, 2])
    def test_family_parameters(self, i):
        c = reed_muller(i, 2 * i + 1)
        assert c.n == 1 << (2 * i + 1)
        assert c.k == 1 << (2 * i)
        assert min_distance(c) == 1 << (i + 1)

    @pytest.mark.parametrize("i", [1, 2])
    def test_family_self_dual(self, i):
        c = reed_muller(i, 2 * i + 1)
        assert c == dual(c)

    def test_repetition_code(self):
        c = reed_muller(0, 3)
        assert sorted(c.codewords()) == [0, 0xFF]

    def test_parameter_guards(self):
        with pytest.raises(ValueError):
            reed_muller(3, 2)
        with pytest.raises(ValueError):
            reed_muller(1, 17)


class TestPuncture:
    def test_rm13(self):
        c1 = puncture_last(reed_muller(1, 3))
        assert (c1.n, c1.k) == (7, 4)
        assert min_distance(c1) == 3

    def test_rm25(self):
        c1 = puncture_last(reed_muller(2, 5))
        assert (c1.n, c1.k) == (31, 16)
        assert min_distance(c1) == 7

    def test_degenerate_repetition_rejected(self):
        rep2 = LinearCode.from_generators(2, [0b11])
        with pytest.raises(PunctureError):
            puncture_last(rep2)

    def test_all_zero_tail_rejected(self):
        # both codewords end in 0: must ask for a different position
        c = LinearCode.from_generators(4, [0b0111])
        with pytest.raises(PunctureError, match="different position"):
            puncture_last(c)

    def test_distance_one_input_rejected(self):
        with pytest.raises(PunctureError):
            puncture_last(LinearCode.from_generators(3, [0b001, 0b110]))

    def test_half_of_codewords_end_in_zero(self):
        # exactly half of a self-dual code's words end in 0 (for these inputs)
        for i in (1, 2):
            c = reed_muller(i, 2 * i + 1)
            last = 1 << (c.n - 1)
            ends_zero = sum(1 for w in c.codewords() if not w & last)
            assert ends_zero == (1 << c.k) // 2


class TestDual:
    def test_dual_of_punctured_rm13(self):
        d = dual(puncture_last(reed_muller(1, 3)))
        assert (d.n, d.k) == (7, 3)
        dist = WeightDistribution.of_code(d)
        assert dist.counts == (1, 0, 0, 0, 7, 0, 0, 0)

    def test_dual_of_full_space(self):
        full = LinearCode.from_generators(4, [1, 2, 4, 8])
        assert dual(full).rows == ()

    def test_involution(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            n = int(rng.integers(2, 20))
            k = int(rng.integers(1, n + 1))
            c = LinearCode.from_generators(n, [int(x) for x in rng.integers(0, 1 << n, size=k)])
            assert dual(dual(c)) == c

    def test_rows_orthogonal(self):
        c = puncture_last(reed_muller(1, 3))
        d = dual(c)
        for u in c.rows:
            for v in d.rows:
                assert (u & v).bit_count() % 2 == 0


class TestMinDistance:
    def test_examples(self):
        c1 = puncture_last(reed_muller(1, 3))
        assert min_distance(c1) == 3
        assert min_distance(dual(c1)) == 4

    def test_zero_code(self):
        assert min_distance(LinearCode(5, ())) is None

    def test_weight_distribution_invariants(self):
        for c in (reed_muller(1, 3), dual(puncture_last(reed_muller(1, 3)))):
            dist = WeightDistribution.of_code(c)
            assert dist.counts[0] == 1
            assert sum(dist.counts) == 1 << c.k

    def test_rank_guard(self):
        rng = np.random.default_rng(5)
        rows = [int(x) for x in rng.integers(0, 1 << 40, size=30)]
        c = LinearCode.from_generators(40, rows)
        assert c.k > 24
        with pytest.raises(RankGuardError):
            min_distance(c)

    def test_distance_estimate_tags(self):
        c1 = puncture_last(reed_muller(1, 3))
        info = distance_estimate(c1)
        assert (info.value, info.exact, info.method) == (3, True, "exhaustive")
        rng = np.random.default_rng(6)
        big = LinearCode.from_generators(40, [int(x) for x in rng.integers(0, 1 << 40, size=30)])
        info = distance_estimate(big, samples=500)
        assert not info.exact and info.method == "sampled-bound"
        assert info.value >= 1


class TestCssConstruction:
    def test_steane_like_goldens(self, css1):
        assert (css1.n, css1.m) == (7, 1)
        assert css1.distance == 3
        assert css1.benign_dist == 4

    def test_index_2_goldens(self, css2):
        assert (css2.n, css2.m) == (31, 1)
        assert css2.distance == 7
        assert css2.benign_dist == 8

    def test_distance_in_expected_window(self, css1, css2):
        # puncturing one coordinate drops the distance by at most 1
        assert css1.distance in (3, 4)
        assert css2.distance in (7, 8)

    def test_non_self_dual_rejected(self):
        with pytest.raises(SelfDualityError):
            css_from_selfdual(LinearCode.from_generators(4, [0b0111]))
        with pytest.raises(SelfDualityError):
            css_from_selfdual(reed_muller(1, 4))

    def test_containment_and_ranks(self, css1, css2):
        for css in (css1, css2):
            assert css.c1.contains_code(css.c2)
            assert css.c2.k == css.c1.k - 1
            assert css.c2 == dual(css.c1)

    def test_benign_at_least_distance(self, css1, css2):
        # weakly self-dual CSS: benign distance >= conventional distance
        for css in (css1, css2):
            assert css.benign_dist >= css.distance

    def test_distance_chain_vs_parent(self, css1, css2):
        # d_b >= d' >= d - 1 where d is the self-dual parent's distance
        for i, css in ((1, css1), (2, css2)):
            parent_d = min_distance(reed_muller(i, 2 * i + 1))
            assert css.benign_dist >= css.distance >= parent_d - 1

    def test_benign_brute_force_oracle(self, css1):
        # all 64 stabilizer group elements of the [[7,1]] code
        words = list(css1.c2.codewords())
        assert len(words) == 8
        best = None
        count = 0
        for u in words:
            for v in words:
                count += 1
                if u == 0 and v == 0:
                    continue
                w = (u | v).bit_count()
                best = w if best is None else min(best, w)
        assert count == 64
        assert best == benign_distance(css1) == css1.benign_dist

    def test_benign_infinite_for_trivial_c2(self, css1):
        degenerate = replace(css1, c2=LinearCode(7, ()))
        assert benign_distance(degenerate) is None


class TestEncoder:
    def test_stabilizers_conjugate_to_identity_class(self, css1, css2):
        for css in (css1, css2):
            for u in css.c2.rows:
                for p in (PauliOp(css.n, u, 0), PauliOp(css.n, 0, u)):
                    conj = conjugate(p, css.encoder, "inverse")
                    assert classify(conj, css.layout) is DetectionClass.ACCEPTED_IDENTITY

    def test_random_stabilizer_products(self, css1):
        rng = np.random.default_rng(11)
        words = list(css1.c2.codewords())
        for _ in range(40):
            u = words[rng.integers(0, len(words))]
            v = words[rng.integers(0, len(words))]
            p = PauliOp(css1.n, u, v)
            conj = conjugate(p, css1.encoder, "inverse")
            assert classify(conj, css1.layout) is DetectionClass.ACCEPTED_IDENTITY

    def test_logical_representatives_forge(self, css1, css2):
        for css in (css1, css2):
            lx = PauliOp(css.n, css.logical_x, 0)
            lz = PauliOp(css.n, 0, css.logical_x)
            assert classify(conjugate(lx, css.encoder, "inverse"), css.layout) is DetectionClass.ACCEPTED_FORGED
            assert classify(conjugate(lz, css.encoder, "inverse"), css.layout) is DetectionClass.ACCEPTED_FORGED

    def test_low_weight_errors_rejected(self, css1):
        for pos in range(css1.n):
            for kind in "XZ":
                p = PauliOp.single(css1.n, pos, kind)
                conj = conjugate(p, css1.encoder, "inverse")
                assert classify(conj, css1.layout) is DetectionClass.REJECTED

    def test_acceptance_iff_both_patterns_in_c1(self, css1):
        # characterization used by the combinatorial oracle
        rng = np.random.default_rng(12)
        words = list(css1.c1.codewords())
        for _ in range(60):
            if rng.integers(0, 2):
                u = words[rng.integers(0, len(words))]
                v = words[rng.integers(0, len(words))]
            else:
                u = int(rng.integers(0, 1 << 7))
                v = int(rng.integers(0, 1 << 7))
            p = PauliOp(7, u, v)
            cls = classify(conjugate(p, css1.encoder, "inverse"), css1.layout)
            expect_accept = css1.c1.contains(u) and css1.c1.contains(v)
            assert (cls is not DetectionClass.REJECTED) == expect_accept

    def test_gate_set_restricted(self, css1, css2):
        for css in (css1, css2):
            assert {g[0] for g in css.encoder.gates} <= {"H", "CNOT", "PERM"}


class TestLinearCircuitSynthesis:
    def test_random_invertible_maps(self):
        rng = np.random.default_rng(13)
        done = 0
        while done < 15:
            n = int(rng.integers(2, 9))
            cols = [int(x) for x in rng.integers(0, 1 << n, size=n)]
            rows, _ = codes.rref(cols, n)
            if len(rows) != n:
                continue
            gates = linear_circuit_from_matrix(cols, n)  # self-asserting
            assert all(g[0] in ("CNOT", "PERM") for g in gates)
            done += 1

    def test_singular_rejected(self):
        with pytest.raises(ValueError):
            linear_circuit_from_matrix([1, 1], 2)


class TestSparsity:
    def test_index1_exact_table(self, css1):
        rep = sparsity_report(css1)
        assert rep.f_x == Fraction(7, 35) == Fraction(1, 5)
        assert float(rep.f_x) == 0.2
        for w, r in enumerate(rep.ratios):
            assert r == (Fraction(1, 5) if w == 4 else 0)
        assert rep.all_ones_excluded
        assert rep.entropy_check

    def test_identity_excluded_at_weight_zero(self, css1):
        assert sparsity_report(css1).ratios[0] == 0

    def test_index2_table(self, css2):
        rep = sparsity_report(css2)
        assert rep.ratios[css2.benign_dist] > 0
        assert all(rep.ratios[w] == 0 for w in range(1, css2.benign_dist))
        assert rep.f_x == max(rep.ratios)
        assert 0 < float(rep.f_x) < 1e-3
        assert rep.all_ones_excluded
        # middle range is empty at i = 2 (d > n/8): vacuous pass
        assert rep.rcw_range[0] >= rep.rcw_range[1]
        assert all(rep.rcw_ok.values())

    def test_check_rcw_nonempty_range(self):
        # synthetic: n = 64, d = 4 -> range 4..7
        counts = [0] * 65
        counts[4] = math.comb(64, 2)  # exactly at the bound
        counts[5] = math.comb(64, 3) + 1  # violates
        rng_, flags = check_rcw(counts, 64, 4)
        assert rng_ == (4, 8)
        assert flags[4] is True
        assert flags[5] is False
        assert flags[6] is True

    def test_consistency_with_distribution(self, css1):
        rep = sparsity_report(css1)
        dist = WeightDistribution.of_code(css1.c2)
        for w in range(1, 8):
            assert rep.ratios[w] == Fraction(dist.counts[w], math.comb(7, w))


class TestDescriptor:
    def test_json_descriptor(self, css1):
        d = css1.to_descriptor(index=1)
        assert d["family"] == "rm-css"
        assert (d["n"], d["m"], d["d"], d["benign_d"], d["index"]) == (7, 1, 3, 4, 1)
        rows = [int(h, 16) for h in d["generator_rows_hex"]]
        assert LinearCode.from_generators(7, rows) == css1.c1
