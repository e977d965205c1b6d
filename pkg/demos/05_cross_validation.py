"""Repeated stratified cross-validation and a learning curve.

Run:  python3 demos/05_cross_validation.py
"""

from pathgbm import BoostConfig, CVPlan, GridSpec, learning_curve, run_cv

from _common import chain_pattern_dataset

ds = chain_pattern_dataset(n_graphs=60, seed=3)
config = BoostConfig(task="classification", m_stop=8, eta=0.5, max_depth=2, min_leaf=2)
plan = CVPlan(folds=5, repetitions=3, seed=0)

report = run_cv(ds, config, plan=plan)
print(f"5-fold CV repeated 3 times on {ds.graph_count} graphs")
for name in report.metric_names:
    print(f"  {name}: {report.mean[name]:.2f} +/- {report.std[name]:.2f}")
print("  fold layouts:", ", ".join(report.layout_hashes))

# hyperparameter search on an inner validation split of each training fold
grid = GridSpec(m_stop=(4, 8), eta=(0.5,), max_depth=(1, 2), validation_fraction=0.2)
tuned = run_cv(ds, config, plan=CVPlan(folds=5, repetitions=1, seed=0), grid=grid)
chosen = sorted({(r.config.m_stop, r.config.max_depth) for r in tuned.folds})
print(f"\nwith grid search: accuracy {tuned.mean['accuracy']:.2f}, chosen (m_stop, depth): {chosen}")

# metrics as the training set shrinks
curve = learning_curve(ds, [0.3, 0.6, 1.0], config, plan=CVPlan(folds=5, repetitions=2, seed=0))
print("\nlearning curve:")
for f in curve.fractions:
    print(f"  fraction {f:.1f}: accuracy {curve.mean[f]['accuracy']:.2f} +/- {curve.std[f]['accuracy']:.2f}")
