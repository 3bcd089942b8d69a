import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import borda_matrix, kendall_pairs
from rankselect.correlation import CorrelationVector
from rankselect.data_io import SyntheticSpec, generate_synthetic
from rankselect.exceptions import ItemSetMismatch
from rankselect.ranking import (
    BordaScores,
    Ranking,
    borda,
    concordance,
    concordance_report,
    metric_rankings,
    rank_by_strength,
    rank_from_scores,
    top_k,
)

ITEMS = [f"v{i:02d}" for i in range(36)]


@st.composite
def rankings(draw, min_m=1, max_m=10, max_n=36):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(min_m, max_m))
    items = ITEMS[:n]
    return [Ranking(tuple(draw(st.permutations(items)))) for _ in range(m)]


def _cv(values, constant=()):
    return CorrelationVector("pearson", values, 10, tuple(constant))


class TestRanking:
    def test_positions_bijection(self):
        r = Ranking(("b", "a", "c"))
        assert r.positions == {"b": 1, "a": 2, "c": 3}
        assert Ranking.from_positions(r.positions) == r

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            Ranking(("a", "a"))

    def test_from_positions_requires_bijection(self):
        with pytest.raises(ValueError):
            Ranking.from_positions({"a": 1, "b": 3})


class TestRankByStrength:
    def test_absolute_value_order(self):
        assert rank_by_strength(_cv({"a": 0.9, "b": -0.95, "c": 0.1})).items == ("b", "a", "c")

    def test_name_tie_break(self):
        assert rank_by_strength(_cv({"b": 0.5, "a": 0.5})).items == ("a", "b")
        assert rank_by_strength(_cv({"b": -0.5, "a": 0.5})).items == ("a", "b")

    def test_constant_last_among_equals(self):
        r = rank_by_strength(_cv({"a": 0.0, "flat": 0.0, "z": 0.0, "s": 0.3}, constant=["a"]))
        assert r.items == ("s", "flat", "z", "a")

    def test_planted_signal_first(self):
        hits = dict.fromkeys(("pearson", "spearman", "kendall"), 0)
        for seed in range(20):
            t = generate_synthetic(SyntheticSpec(225, 36, 5, noise_sd=1.0, seed=seed))
            ranks, _ = metric_rankings(t)
            for metric in hits:
                hits[metric] += set(ranks[metric].items[:5]) == set(t.informative_features)
        assert all(h >= 18 for h in hits.values()), hits


class TestBorda:
    def test_hand_example(self):
        r1 = Ranking.from_positions({"A": 1, "B": 2, "C": 3})
        r2 = Ranking.from_positions({"A": 2, "B": 1, "C": 3})
        b = borda([r1, r2])
        assert b.scores == {"A": 5, "B": 5, "C": 2}
        assert sum(b.scores.values()) == 12
        fused = rank_from_scores(b)
        assert fused.items == ("A", "B", "C")
        assert fused.positions == {"A": 1, "B": 2, "C": 3}

    def test_single_rater(self):
        r = Ranking(("c", "a", "b"))
        b = borda([r])
        assert b.scores == {"c": 3, "a": 2, "b": 1}
        assert rank_from_scores(b) == r

    def test_item_mismatch(self):
        with pytest.raises(ItemSetMismatch):
            borda([Ranking(("a", "b")), Ranking(("a", "c"))])

    def test_all_equal_scores_lexicographic(self):
        assert rank_from_scores({"c": 1, "a": 1, "b": 1}).items == ("a", "b", "c")

    @settings(max_examples=200, deadline=None)
    @given(rankings(), st.randoms(use_true_random=False))
    def test_properties(self, rs, rnd):
        m, n = len(rs), len(rs[0])
        b = borda(rs)
        assert sum(b.scores.values()) == m * n * (n + 1) // 2
        assert all(m <= s <= m * n for s in b.scores.values())
        assert b.scores == borda_matrix([r.positions for r in rs], list(rs[0].items))
        shuffled = list(rs)
        rnd.shuffle(shuffled)
        assert borda(shuffled).scores == b.scores

    @settings(max_examples=100, deadline=None)
    @given(rankings(max_m=6))
    def test_unanimity(self, rs):
        winner = rs[0].items[-1]
        forced = [Ranking((winner,) + tuple(i for i in r.items if i != winner)) for r in rs]
        assert rank_from_scores(borda(forced)).items[0] == winner


class TestTopK:
    def test_examples(self):
        r = Ranking(("b", "a", "c"))
        assert top_k(r, 2) == ("b", "a")
        assert set(top_k(r, 3)) == {"a", "b", "c"}

    def test_clamp_warns(self, caplog):
        with caplog.at_level("WARNING"):
            assert top_k(Ranking(("a", "b")), 5) == ("a", "b")
        assert "exceeds" in caplog.text

    def test_k_sweep_sizes(self):
        r = Ranking(tuple(ITEMS))
        assert [len(top_k(r, k)) for k in (5, 10, 15, 20, 25)] == [5, 10, 15, 20, 25]

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            top_k(Ranking(("a",)), 0)

    @given(st.permutations(ITEMS), st.integers(1, 40), st.integers(1, 40))
    def test_nesting(self, items, k1, k2):
        r = Ranking(tuple(items))
        lo, hi = sorted((k1, k2))
        assert set(top_k(r, lo)) <= set(top_k(r, hi))


class TestConcordance:
    def test_examples(self):
        r1 = Ranking.from_positions({"a": 1, "b": 2, "c": 3, "d": 4})
        r2 = Ranking.from_positions({"a": 1, "b": 3, "c": 2, "d": 4})
        assert concordance(r1, r1) == 1.0
        assert concordance(r1, r1.reversed()) == -1.0
        assert concordance(r1, r2) == pytest.approx(4 / 6, abs=1e-15)

    def test_mismatch(self):
        with pytest.raises(ItemSetMismatch):
            concordance(Ranking(("a", "b")), Ranking(("a", "c")))

    @settings(max_examples=100, deadline=None)
    @given(st.permutations(ITEMS[:15]), st.permutations(ITEMS[:15]))
    def test_matches_pair_enumeration(self, p1, p2):
        r1, r2 = Ranking(tuple(p1)), Ranking(tuple(p2))
        a = [r1.position(i) for i in ITEMS[:15]]
        b = [r2.position(i) for i in ITEMS[:15]]
        assert concordance(r1, r2) == pytest.approx(kendall_pairs(a, b), abs=1e-12)
        assert concordance(r1, r2) == concordance(r2, r1)


class TestConcordanceReport:
    def test_identical(self):
        r = Ranking(tuple(ITEMS[:8]))
        rep = concordance_report(r, r, r, r)
        assert rep.mean_pairwise == 1.0 and rep.mean_vs_borda == 1.0

    def test_random_against_oracle(self):
        rng = np.random.default_rng(0)
        items = ITEMS[:10]
        for _ in range(50):
            rp, rs, rk = (Ranking(tuple(rng.permutation(items))) for _ in range(3))
            rb = rank_from_scores(borda([rp, rs, rk]))
            rep = concordance_report(rp, rs, rk, rb)
            pos = {name: [r.position(i) for i in items]
                   for name, r in zip("pskb", (rp, rs, rk, rb))}
            pairwise = np.mean([kendall_pairs(pos[a], pos[b]) for a, b in ("ps", "pk", "sk")])
            vs_b = np.mean([kendall_pairs(pos["b"], pos[a]) for a in "psk"])
            assert rep.mean_pairwise == pytest.approx(pairwise, abs=1e-12)
            assert rep.mean_vs_borda == pytest.approx(vs_b, abs=1e-12)
            assert set(rep.as_dict()) >= {"mean_pairwise", "mean_vs_borda"}

    def test_borda_agrees_more_than_inputs_on_planted_data(self):
        wins = 0
        for seed in range(10):
            t = generate_synthetic(SyntheticSpec(225, 36, 5, seed=seed).with_snr(2.0))
            ranks, _ = metric_rankings(t)
            rep = concordance_report(ranks["pearson"], ranks["spearman"], ranks["kendall"],
                                     ranks["borda"])
            wins += rep.mean_vs_borda >= rep.mean_pairwise
        assert wins == 10

    def test_scores_container(self):
        b = BordaScores({"a": 3}, 1)
        assert b["a"] == 3
