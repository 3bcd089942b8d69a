"""
Fusing rankings with Borda count
================================

Each ranking awards N - position + 1 points; the fused ranking sorts the
point totals. Run with ``python demos/02_borda_fusion.py``.
"""

# %%
from rankselect.ranking import Ranking, borda, concordance, rank_from_scores, top_k

r1 = Ranking(("A", "B", "C", "D"))
r2 = Ranking(("B", "A", "D", "C"))
r3 = Ranking(("A", "C", "B", "D"))
scores = borda([r1, r2, r3])
print(scores.scores)  # A: 4+3+4, B: 3+4+2, ...
fused = rank_from_scores(scores)
print("fused:", fused.items)

# %%
# Concordance between two rankings is Kendall's tau over their position
# vectors: +1 for identical order, -1 for reversed.
print(concordance(r1, r1), concordance(r1, r1.reversed()), round(concordance(r1, r2), 3))

# %%
# On data the fused ranking tends to sit between its inputs, so it agrees
# with each of them more than they agree with one another.
from rankselect import SyntheticSpec, generate_synthetic
from rankselect.ranking import concordance_report, metric_rankings

table = generate_synthetic(SyntheticSpec(225, 36, 5, seed=11).with_snr(2.0))
ranks, _ = metric_rankings(table)
report = concordance_report(ranks["pearson"], ranks["spearman"], ranks["kendall"], ranks["borda"])
for key, value in report.as_dict().items():
    print(f"{key:>28}: {value:.4f}")

# %%
# The selection step keeps the k best fused features.
for k in (5, 10):
    chosen = top_k(ranks["borda"], k)
    found = len(set(chosen) & set(table.informative_features))
    print(f"k={k:2d}: {found}/5 informative -> {chosen}")
