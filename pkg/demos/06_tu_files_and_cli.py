"""Round-trip a dataset through the TU text format and drive the CLI.

Writes ./demo_output/chain_pattern/ and runs the train, importance and cv
subcommands against it in-process.

Run:  python3 demos/06_tu_files_and_cli.py
"""

from pathlib import Path

from pathgbm import dataset_summary, load_dataset, write_dataset
from pathgbm.cli import main

from _common import chain_pattern_dataset

out = Path("demo_output")
data = out / "chain_pattern"
write_dataset(chain_pattern_dataset(n_graphs=60, seed=3), data)
print("wrote TU-format files:")
for f in sorted(data.iterdir()):
    print("  ", f)

ds = load_dataset(data)
s = dataset_summary(ds)
print(
    f"\nreloaded {s.graph_count} graphs, avg {s.avg_nodes:.1f} nodes / {s.avg_edges:.1f} edges, "
    f"{s.node_feature_count} node features"
)

run = out / "run"
print("\n$ pathgbm train ...")
main(
    ["train", str(data), "--out", str(run), "--m-stop", "8", "--eta", "0.5",
     "--max-depth", "2", "--min-leaf", "2", "--dump-predictions"]
)

print("\n$ pathgbm importance ...")
main(["importance", str(run / "model.json"), "--out", str(run)])

print("\n$ pathgbm cv ...")
main(
    ["cv", str(data), "--out", str(run), "--folds", "5", "--repetitions", "2",
     "--m-stop", "8", "--eta", "0.5", "--max-depth", "2", "--min-leaf", "2"]
)

print("\noutputs in", run)
for f in sorted(run.iterdir()):
    print("  ", f.name)
