"""
Do the three methods agree?
===========================

Three flat groups at levels 0, 10 and 20. Autoencoder + k-means, kml and the
polynomial trajectory mixture each give per-subject membership
probabilities. Matching clusters across methods by correlation shows how
much they agree.
"""

from deeptraj.evaluation import adjusted_rand_index
from deeptraj.pipeline import coherence_experiment

exp = coherence_experiment(seed=0)
for m in exp.memberships:
    print(f"{m.method:12s} ARI vs truth {adjusted_rand_index(m, exp.labels):.3f}")
print()
print(exp.report.summary())
