from itertools import permutations, product
from math import floor

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scma_udcg.codebook import (CodebookSet, allocate_generation_matrix, build_codebook_set,
                                interleave_codebook_set, normalize_codebook_set)
from scma_udcg.factorgraph import FactorGraph, design_factor_graph
from scma_udcg.metrics import (MetricsReport, codebook_energy_closed, codebook_med_closed,
                               codebook_stats, coding_gain, evaluate_codebook_set,
                               med_closed_cases, med_superimposed, min_product_distance,
                               per_rn_med, qfunc, sum_energy_superimposed, union_bound)
from scma_udcg.optimizer import SearchConfig, design_pipeline
from scma_udcg.udcg import DesignError, DesignParams, build_udcg, group_from_parts, superimpose

from oracles import pairwise_min, product_distance_min, qfunc_quad


def _cbs(M=4, r=2, t=None, interleave=False, normalize=False):
    p = DesignParams(M=M, r=r, t=t)
    graph = design_factor_graph(4, 6, 2)
    cbs = build_codebook_set(allocate_generation_matrix(graph), build_udcg(p), graph)
    if interleave:
        cbs = interleave_codebook_set(cbs)
    return normalize_codebook_set(cbs) if normalize else cbs


GRID = [(M, r, t) for M in (4, 8, 16) for r in range(1, 5) if 2 ** r <= M
        for t in (0.3, 0.7, 1.15)]


class TestSumEnergy:
    def test_example_48(self):
        p = DesignParams(M=4, r=2, a=0.5)
        assert sum_energy_superimposed(p) == pytest.approx(48.0, rel=1e-12)
        assert sum_energy_superimposed(p, "brute_force") == pytest.approx(48.0, rel=1e-12)

    @pytest.mark.parametrize("M, r, t", GRID)
    def test_closed_form_matches_brute_force(self, M, r, t):
        p = DesignParams(M=M, r=r, t=t)
        assert sum_energy_superimposed(p) == pytest.approx(
            sum_energy_superimposed(p, "brute_force"), rel=1e-9)

    @pytest.mark.parametrize("M, r, a", [(4, 2, 0.5), (8, 3, 0.7), (16, 4, 1.3)])
    def test_single_ring_reduction(self, M, r, a):
        p = DesignParams(M=M, r=r, a=a)
        d_f = 3
        assert sum_energy_superimposed(p) == pytest.approx(d_f * M ** (d_f - 1) * 2 ** r * a ** 2)

    def test_df4(self):
        p = DesignParams(M=4, r=1, t=0.5, epsilons=(1, 1, 2), K=5, J=10)
        assert sum_energy_superimposed(p) == pytest.approx(
            sum_energy_superimposed(p, "brute_force"), rel=1e-9)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            sum_energy_superimposed(DesignParams(M=4, r=2), "sampled")


class TestMedSuperimposed:
    @pytest.mark.parametrize("M, r, t, expected", [(4, 2, None, 0.05826008354363188),
                                                   (8, 2, 0.7, 0.0029437251522853335)])
    def test_frozen(self, M, r, t, expected):
        sup = superimpose(build_udcg(DesignParams(M=M, r=r, t=t)))
        assert med_superimposed(sup) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("M, r, t", GRID[::3])
    def test_matches_pdist(self, M, r, t):
        sup = superimpose(build_udcg(DesignParams(M=M, r=r, t=t)))
        assert med_superimposed(sup) == pytest.approx(pairwise_min(sup.points), rel=1e-12)

    def test_non_udc_is_zero(self):
        g = build_udcg(DesignParams(M=4, r=2))
        assert med_superimposed(superimpose([g.points[0], g.points[0]])) == 0.0

    @pytest.mark.parametrize("phi", [0.1, 1.0, np.pi / 3])
    def test_rotation_invariant(self, phi):
        g = build_udcg(DesignParams(M=4, r=2))
        base = med_superimposed(superimpose(g))
        rotated = med_superimposed(superimpose(g.points * np.exp(1j * phi)))
        assert rotated == pytest.approx(base, rel=1e-12)


def _pair_class_oracle(p):
    """Direct enumeration of the two closed-form pair classes."""
    g = build_udcg(p)
    n_r = 2 ** p.r
    w = lambda l: np.exp(2j * np.pi * l / n_r)
    d1 = d2 = np.inf
    for n, i in permutations(range(p.d_f), 2):
        en, ei = np.exp(1j * g.thetas[n]), np.exp(1j * g.thetas[i])
        for ln, li in product(range(n_r), repeat=2):
            a = p.a
            x = a * en * w(ln) + a * ei * w(li)
            y = a * en * w(ln + 1) + a * ei * w(li - 1)
            d1 = min(d1, abs(x - y))
            if p.V >= 1:
                lo, hi = p.a, p.a + p.t
                d2 = min(d2, abs((hi * en * w(ln) + lo * ei * w(li))
                                 - (lo * en * w(ln) + hi * ei * w(li))))
    return d1, (d2 if p.V >= 1 else None)


class TestClosedCases:
    def test_m4_r2(self):
        d1, d2 = med_closed_cases(DesignParams(M=4, r=2))
        # rotations are +-pi/8, so the minimal angle is pi/8
        assert d1 == pytest.approx(np.sqrt(8 * 0.25 * 0.5 * (1 - np.cos(np.pi / 8))), rel=1e-12)
        assert d2 is None

    @pytest.mark.parametrize("M, r, t", [(8, 2, 0.7), (8, 1, 0.3), (16, 3, 0.85), (16, 2, 0.4),
                                         (8, 3, None), (4, 2, None)])
    def test_match_pair_class_enumeration(self, M, r, t):
        p = DesignParams(M=M, r=r, t=t)
        got, want = med_closed_cases(p), _pair_class_oracle(p)
        assert got[0] == pytest.approx(want[0], rel=1e-12)
        if want[1] is not None:
            assert got[1] == pytest.approx(want[1], rel=1e-12)

    @pytest.mark.parametrize("M, r, t", [(8, 2, 0.7), (16, 3, 0.85), (8, 1, 0.3)])
    def test_upper_bound_med(self, M, r, t):
        p = DesignParams(M=M, r=r, t=t)
        med = med_superimposed(superimpose(build_udcg(p)))
        assert med <= min(x for x in med_closed_cases(p) if x is not None) + 1e-15

    def test_d2_linear_in_t(self):
        d2a = med_closed_cases(DesignParams(M=8, r=2, t=0.2))[1]
        d2b = med_closed_cases(DesignParams(M=8, r=2, t=0.6))[1]
        assert d2b == pytest.approx(3 * d2a, rel=1e-12)


class TestCodebookStats:
    def test_t0_example(self):
        _, d = codebook_stats(_cbs(), 0)
        assert d == pytest.approx(1.0, rel=1e-12)

    def test_below_threshold_example(self):
        _, d = codebook_stats(_cbs(M=8, r=2, t=0.3), 0)
        assert d == pytest.approx(np.sqrt(2) * 0.3, rel=1e-12)

    @pytest.mark.parametrize("M, r, t", GRID)
    def test_piecewise_matches_exhaustive(self, M, r, t):
        p = DesignParams(M=M, r=r, t=t)
        cbs = _cbs(M, r, t)
        for j in range(cbs.J):
            e, d = codebook_stats(cbs, j)
            book = cbs.books[j][list(cbs.graph.un_resources[j])].T
            assert d == pytest.approx(pairwise_min(book), rel=1e-12)
            assert d == pytest.approx(codebook_med_closed(p), rel=1e-12)
            assert e * M == pytest.approx(codebook_energy_closed(p), rel=1e-12)

    def test_normalization_scales_distance(self):
        raw, norm = _cbs(M=8, r=2, t=0.7), _cbs(M=8, r=2, t=0.7, normalize=True)
        assert codebook_stats(norm, 2)[1] == pytest.approx(norm.normalization * codebook_stats(raw, 2)[1])


class TestCodingGain:
    def test_examples(self):
        assert coding_gain(1.0, 0.5) == 2.0
        assert coding_gain(0.0, 3.0) == 0.0

    def test_rejects_zero_energy(self):
        with pytest.raises(ValueError):
            coding_gain(1.0, 0.0)

    @settings(max_examples=50, deadline=None)
    @given(d=st.floats(1e-3, 10), e=st.floats(1e-3, 10), s=st.floats(1e-3, 1e3))
    def test_scale_invariant(self, d, e, s):
        assert coding_gain(s * d, s * s * e) == pytest.approx(coding_gain(d, e), rel=1e-12)


class TestPerRnMed:
    def test_designed_equal(self):
        meds = per_rn_med(_cbs(normalize=True))
        assert meds.min() > 0
        np.testing.assert_allclose(meds, meds[0], rtol=1e-12)

    @pytest.mark.parametrize("M, r, t", [(4, 2, None), (4, 1, 1.15), (8, 2, 0.7), (8, 1, 0.95)])
    def test_interleaving_keeps_meds(self, M, r, t):
        np.testing.assert_allclose(per_rn_med(_cbs(M, r, t, interleave=True)),
                                   per_rn_med(_cbs(M, r, t)), rtol=1e-12)

    def test_coincident_import(self):
        graph = design_factor_graph(4, 6, 2)
        books = np.zeros((6, 4, 4), dtype=complex)
        qpsk = np.exp(2j * np.pi * np.arange(4) / 4)
        for j, ks in enumerate(graph.un_resources):
            books[j, list(ks)] = qpsk
        assert np.all(per_rn_med(CodebookSet(books=books, graph=graph)) == 0)


class TestMinProductDistance:
    @pytest.mark.parametrize("M, r, t, interleave", [(4, 2, None, False), (4, 2, None, True),
                                                     (8, 2, 0.7, False), (8, 2, 0.7, True)])
    def test_per_codebook_matches_oracle(self, M, r, t, interleave):
        cbs = _cbs(M, r, t, interleave)
        want = min(product_distance_min(cbs.books[j][list(ks)].T)
                   for j, ks in enumerate(cbs.graph.un_resources))
        assert min_product_distance(cbs) == pytest.approx(want, rel=1e-12)

    def test_per_codebook_t0_adjacent(self):
        # adjacent codewords of C_2/C_0 rows at radius 0.5, r=2: |d|^2 = 0.5
        assert min_product_distance(_cbs()) == pytest.approx(0.5, rel=1e-12)

    def test_exact_zero_for_multiuser(self):
        assert min_product_distance(_cbs(), "exact") == 0.0

    def test_exact_single_user_matches_oracle(self):
        g = build_udcg(DesignParams(M=4, r=2))
        graph = FactorGraph(np.ones((2, 1)))
        books = np.stack([g.points[1], g.points[2]])[None]
        cbs = CodebookSet(books=books, graph=graph)
        assert min_product_distance(cbs, "exact") == pytest.approx(
            product_distance_min(books[0].T), rel=1e-12)

    def test_exact_cap(self):
        with pytest.raises(DesignError, match="cap"):
            min_product_distance(_cbs(M=8, r=2, t=0.7), "exact")

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            min_product_distance(_cbs(), "sampled")


class TestUnionBound:
    @pytest.mark.parametrize("x", [0.0, 0.5, 1.0, 2.5, 5.0, 8.0, 12.0, 20.0, 40.0])
    def test_qfunc_against_quadrature(self, x):
        assert abs(float(qfunc(x)) - qfunc_quad(x)) < 1e-15

    def test_zero_distance(self):
        assert union_bound(0.0, 0.1, 4, 4, 6) == pytest.approx((4 ** 6 - 1) * 0.5)

    def test_vanishing_noise(self):
        assert union_bound(0.2, 1e-6, 4, 4, 6) == 0.0

    def test_example_vs_quadrature(self):
        want = (4 ** 6 - 1) * qfunc_quad(np.sqrt(4 / (2 * 0.05)) * 0.2)
        assert union_bound(0.2, 0.05, 4, 4, 6) == pytest.approx(want, rel=1e-12)

    def test_rayleigh_unit_gain_matches_awgn(self):
        h = np.ones(4)
        assert union_bound(0.2, 0.05, 4, 4, 6, "rayleigh", h) == pytest.approx(
            union_bound(0.2, 0.05, 4, 4, 6))

    @pytest.mark.parametrize("kwargs", [{"channel": "rayleigh"}, {"channel": "rician"}])
    def test_bad_channel(self, kwargs):
        with pytest.raises(ValueError):
            union_bound(0.2, 0.05, 4, 4, 6, **kwargs)


# (M, r, t_c, t_x, d^tc, d^tx) under the unit-total-energy convention; frozen from the
# brute-force oracle below and compared against the 4-digit paper entries
TABLE2 = [
    (4, 1, 1.15, 1.00, 0.0752397624987818, 0.054256107050597746, "0.0752", "0.0543"),
    (4, 2, 0.0, 0.0, 0.04119610014619685, 0.04119610014619685, "0.0412", "0.0412"),
    (8, 1, 0.95, 1.00, 0.010032058879402242, 0.007754133984486197, "0.0100", "0.0078"),
    (8, 2, 0.60, 0.70, 0.012981350053219766, 0.0008005876988963094, "0.0130", "0.0008"),
    (8, 3, 0.0, 0.0, 0.0037486058335833555, 0.0037486058335833555, "0.0037", "0.0037"),
    (16, 1, 1.00, 1.00, 0.002725326176740484, 0.002725326176740484, "0.0027", "0.0027"),
    (16, 2, 0.95, 0.70, 0.0013627179052724204, 0.0002996943884936494, "0.0014", "0.0002"),
    (16, 3, 0.85, 0.40, 0.0011609560738275644, 1.066809768416439e-05, "0.0012", "0.0000"),
    (16, 4, 0.0, 0.0, 0.0002822872471540876, 0.0002822872471540876, "0.0002", "0.0002"),
]


def _table_oracle(M, r, t):
    p = DesignParams(M=M, r=r, t=t if M > 2 ** r else None)
    sup = superimpose(build_udcg(p))
    total = 2 * 2 ** r * np.sum(p.amplitudes ** 2)
    return pairwise_min(sup.points) / np.sqrt(total)


def _four_digits(x):
    return {f"{x:.4f}", f"{floor(x * 1e4) / 1e4:.4f}"}


class TestTable2:
    @pytest.mark.parametrize("M, r, tc, tx, dc, dx, pc, px", TABLE2)
    def test_oracle_and_paper(self, M, r, tc, tx, dc, dx, pc, px):
        assert _table_oracle(M, r, tc) == pytest.approx(dc, rel=1e-9)
        assert _table_oracle(M, r, tx) == pytest.approx(dx, rel=1e-9)
        assert pc in _four_digits(dc) and px in _four_digits(dx)

    @pytest.mark.parametrize("M, r, tc, tx, dc, dx, pc, px", [row for row in TABLE2 if row[0] < 16])
    def test_pipeline_values(self, M, r, tc, tx, dc, dx, pc, px):
        for crit, d in (("superimposed", dc), ("codebook", dx)):
            cbs = design_pipeline(DesignParams(M=M, r=r), SearchConfig(criterion=crit))
            np.testing.assert_allclose(cbs.report.per_rn_med_table, d, rtol=1e-9)


class TestReport:
    def test_round_trip(self):
        rep = evaluate_codebook_set(_cbs(normalize=True))
        assert MetricsReport.from_dict(rep.to_dict()) == rep

    def test_fields(self):
        rep = evaluate_codebook_set(_cbs(normalize=True))
        assert rep.e_x_avg == pytest.approx(1.0)
        assert rep.gain_x == pytest.approx(rep.d_min_x ** 2 / rep.e_x_avg)
        assert rep.mpd_mode == "per_codebook"
        assert rep.per_rn_med_table[0] == pytest.approx(0.04119610014619685, rel=1e-12)

    def test_superimposed_energy_consistent(self):
        p = DesignParams(M=8, r=2, t=0.7)
        cbs = _cbs(8, 2, 0.7)
        rep = evaluate_codebook_set(cbs, mpd_mode=None)
        assert rep.e_c_sum == pytest.approx(sum_energy_superimposed(p), rel=1e-12)
        assert rep.mpd is None
