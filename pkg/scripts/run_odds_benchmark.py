"""Benchmark on two public tabular anomaly datasets (cardio, annthyroid).

The data is not bundled.  Download the ODDS copies of the two datasets
yourself and drop them into a directory as {name}.npz (arrays X and y)
or the original {name}.mat; point --data-dir or ODDS_DATA_DIR at it.

Protocol per dataset: the first N normal rows form the training table,
the first M of the remaining rows form the labeled test table (N, M
fixed below).  theta is tuned on a holdout of the training table at
gamma = 0.7 for a 1% validation false-positive budget, the final model
is retrained on the full training table, and ranking metrics on the
test table are compared against reference windows.
"""

import argparse
import os
import sys
import time

import numpy as np

from invarmine.data import CONTINUOUS, Column, Dataset, Schema
from invarmine.detect import score_dataset
from invarmine.evaluate import (
    LabeledScores,
    holdout_split,
    roc_auc,
    standardized_pauc,
    tune_theta,
)
from invarmine.pipeline import TrainConfig, train_ruleset

# name, train rows, test rows, expected AUC, expected pAUC at cap 0.1
TARGETS = [
    ("cardio", 1099, 696, 0.90, 0.82),
    ("annthyroid", 3998, 2880, 0.60, 0.59),
]
WINDOW = 0.08


def load_table(directory: str, name: str):
    """X (float matrix) and y (0/1 vector) from {name}.npz or {name}.mat."""
    npz_path = os.path.join(directory, f"{name}.npz")
    if os.path.exists(npz_path):
        data = np.load(npz_path)
        return np.asarray(data["X"], dtype=float), np.asarray(data["y"]).ravel().astype(int)
    mat_path = os.path.join(directory, f"{name}.mat")
    if os.path.exists(mat_path):
        try:
            from scipy.io import loadmat
        except ImportError:
            print(f"{name}: found .mat but scipy is not installed", file=sys.stderr)
            return None
        data = loadmat(mat_path)
        return np.asarray(data["X"], dtype=float), np.asarray(data["y"]).ravel().astype(int)
    return None


def as_dataset(X: np.ndarray) -> Dataset:
    names = [f"X{j + 1}" for j in range(X.shape[1])]
    schema = Schema([Column(n, CONTINUOUS) for n in names])
    return Dataset.from_columns(schema, {n: X[:, j].tolist() for j, n in enumerate(names)})


def run_one(directory: str, name: str, train_n: int, test_n: int,
            auc_center: float, pauc_center: float) -> bool:
    loaded = load_table(directory, name)
    if loaded is None:
        print(f"{name}: no {name}.npz or {name}.mat in {directory}, skipping")
        return True
    X, y = loaded
    normal_idx = np.nonzero(y == 0)[0]
    if len(normal_idx) < train_n:
        print(f"{name}: wanted {train_n} normal training rows, file has {len(normal_idx)}")
        return False
    train_idx = normal_idx[:train_n]
    rest = np.setdiff1d(np.arange(len(y)), train_idx)[:test_n]

    train = as_dataset(X[train_idx])
    test = as_dataset(X[rest])
    labels = y[rest]

    started = time.perf_counter()
    fit, validation = holdout_split(train, 0.2)
    tuning = tune_theta(fit, validation, gamma=0.7, target_fpr=0.01)
    ruleset = train_ruleset(train, TrainConfig(theta=tuning.theta, gamma=0.7)).ruleset
    ls = LabeledScores(score_dataset(ruleset, test), labels)
    auc = roc_auc(ls)
    pauc = standardized_pauc(ls, 0.1)
    elapsed = time.perf_counter() - started

    auc_ok = abs(auc - auc_center) <= WINDOW
    pauc_ok = abs(pauc - pauc_center) <= WINDOW
    fell = " (fell back)" if tuning.fell_back else ""
    print(f"{name}: theta {tuning.theta:g}{fell}, {len(ruleset.rules)} rules, "
          f"{train.row_count}/{test.row_count} train/test rows, {elapsed:.1f}s")
    print(f"  AUC  {auc:.3f}  target {auc_center} +- {WINDOW}  "
          f"{'ok' if auc_ok else 'OUTSIDE WINDOW'}")
    print(f"  pAUC {pauc:.3f}  target {pauc_center} +- {WINDOW}  "
          f"{'ok' if pauc_ok else 'OUTSIDE WINDOW'}")
    return auc_ok and pauc_ok


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", default=os.environ.get("ODDS_DATA_DIR", ""),
                        help="directory holding the dataset files "
                             "(default: ODDS_DATA_DIR)")
    args = parser.parse_args()
    if not args.data_dir or not os.path.isdir(args.data_dir):
        print("no data directory; pass --data-dir or set ODDS_DATA_DIR "
              "(see the module docstring for the expected files)", file=sys.stderr)
        return 2

    ok = True
    for name, train_n, test_n, auc_center, pauc_center in TARGETS:
        ok = run_one(args.data_dir, name, train_n, test_n, auc_center, pauc_center) and ok
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
