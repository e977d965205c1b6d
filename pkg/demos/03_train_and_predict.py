"""Train a boosted model on synthetic chains and inspect what it learned.

Run:  python3 demos/03_train_and_predict.py
"""

from pathgbm import BoostConfig, predict, train

from _common import chain_pattern_dataset

ds = chain_pattern_dataset(n_graphs=60, seed=3)
print(f"{ds.graph_count} chain graphs; class 1 iff the label path 0-1-2 occurs")

config = BoostConfig(task="classification", m_stop=8, eta=0.5, max_depth=2, min_leaf=2)
model = train(ds, config)

print(f"\nintercept {model.f0:+.3f}, {len(model.stages)} stages:")
for record in model.log:
    print(
        f"  iter {record.iteration:2d}  path {model.path_name(record.path):8s}"
        f"  train loss {record.train_loss:.4f}"
        f"  pool size {record.pool_size}"
    )

# the candidate pool grew lazily: extensions appear only after their parent
# path is first selected
print("\nfinal candidate pool:", [model.path_name(p) for p in model.candidate_paths])

correct = 0
for g, target in zip(ds.graphs, ds.targets):
    score = predict(model, g)
    correct += int(score.label == int(target))
print(f"\ntraining accuracy: {100.0 * correct / ds.graph_count:.1f}%")

one = predict(model, ds.graphs[0])
print(f"first graph: logit {one.logit:+.3f}, probability {one.probability:.3f}, label {one.label}")
