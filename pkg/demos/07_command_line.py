"""
Running the staged pipeline from the command line
=================================================

Every stage writes its artifacts to an output directory and prints
"name<TAB>path" lines. Here the CLI is called in-process on a tiny
synthetic cohort. The same arguments work with the ``peptide-mlp``
console script or ``python3 -m peptide_mlp``.
"""
import json
import tempfile
from pathlib import Path

from peptide_mlp.cli import main

out = Path(tempfile.mkdtemp()) / "run"
code = main([
    "run-all", "--out", str(out), "--seed", "7",
    "--n-cases", "20", "--n-controls", "50", "--n-features", "200", "--n-informative", "8",
    "--population", "16", "--generations", "10", "--subset-size", "8",
    "--hidden", "10", "10", "--max-epochs", "60", "--k-folds", "5",
])
print("exit code", code)

report = json.loads((out / "report.json").read_text())
print("mean CV accuracy", round(report["mean_cv_accuracy"], 4))
print("final fold: accuracy", round(report["final_test_accuracy"], 4),
      "macro AUC", round(report["auc_macro"], 4), "MCC", round(report["mcc"], 4))

# %%
# Stages refuse to overwrite earlier outputs unless --force is given, and
# report the problem as one JSON record on stderr with a nonzero exit code.
print("rerun exit code", main(["gen", "--out", str(out)]))

# %%
# A stored model can be re-scored on any dataset that has its feature ids.
main(["evaluate", "--model", str(out / "model.pmlp"), "--input", str(out / "dataset.csv"),
      "--out", str(out), "--name", "unbalanced_cohort"])
print(json.loads((out / "unbalanced_cohort.json").read_text())["metrics"]["confusion_matrix"])
