"""
Ranking features by correlation with a target
=============================================

Three correlation measures, three rankings of the same 36 features.
Run with ``python demos/01_correlation_rankings.py``.
"""

# %%
# A planted-signal table: 225 rows, 36 standard-normal features, five of
# which drive the target. The generator records which five.
import numpy as np

from rankselect import SyntheticSpec, generate_synthetic
from rankselect.correlation import correlate_all
from rankselect.ranking import rank_by_strength

table = generate_synthetic(SyntheticSpec(n_rows=225, n_features=36, n_informative=5, seed=3))
print("informative:", table.informative_features)

# %%
# Correlate every feature with the target. Pearson looks at linear
# association, Spearman at monotone association (Pearson on ranks), and
# Kendall counts concordant minus discordant pairs.
corrs = {m: correlate_all(table, m) for m in ("pearson", "spearman", "kendall")}
for m, cv in corrs.items():
    head = cv.to_rows()[:6]
    print(f"{m:>9}:", ", ".join(f"{name}={v:+.3f}" for name, v in head))

# %%
# A ranking orders features by |correlation|; the sign is irrelevant for
# selection. Kendall values are smaller in magnitude, yet the order is
# close to the other two.
ranks = {m: rank_by_strength(cv) for m, cv in corrs.items()}
for m, r in ranks.items():
    print(f"{m:>9} top 8:", r.items[:8])

# %%
# How often is the planted five exactly the top five?
hit = {m: set(r.items[:5]) == set(table.informative_features) for m, r in ranks.items()}
print(hit)

# %%
# Spearman is unchanged by any strictly increasing transform of a feature,
# Pearson is not.
from rankselect.correlation import pearson, spearman

x = table.column(table.informative_features[0])
print("pearson  x vs exp(x):", round(pearson(x, table.y), 4), round(pearson(np.exp(x), table.y), 4))
print("spearman x vs exp(x):", round(spearman(x, table.y), 4), round(spearman(np.exp(x), table.y), 4))
