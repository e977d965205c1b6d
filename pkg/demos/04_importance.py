"""Per-path variable importance, absolute and relative variants.

Run:  python3 demos/04_importance.py
"""

from pathlib import Path

from pathgbm import BoostConfig, importance, save_model, train

from _common import chain_pattern_dataset

ds = chain_pattern_dataset(n_graphs=60, seed=3)
model = train(ds, BoostConfig(task="classification", m_stop=12, eta=0.3, max_depth=2, min_leaf=2))

# absolute: how much squared error each path's selections removed.
# relative: by how much the path beat the runner-up column when chosen.
# both are rescaled so the strongest path scores exactly 100.
rows = importance(model)
print(f"{'path':10s} {'absolute':>9s} {'relative':>9s}")
for r in rows:
    print(f"{r.path_name:10s} {r.absolute:9.2f} {r.relative:9.2f}")

assert rows[0].absolute == 100.0
print("\nthe top path should be the planted pattern 0-1-2 or a sub-path of it")

out = Path("demo_output")
out.mkdir(exist_ok=True)
save_model(model, out / "model.json")
print(f"model written to {out / 'model.json'} (try: pathgbm importance {out / 'model.json'})")
