import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


# Synthetic files laid out like the UCI originals. Contents are random, so
# they exercise parsing and preparation only, never accuracy.

def write_bankruptcy(path, n=250, seed=0):
    rng = np.random.default_rng(seed)
    lines = []
    for i in range(n):
        ratings = rng.choice(list("PAN"), 6)
        label = "B" if i % 2 else "NB"
        lines.append(",".join(ratings) + "," + label)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_breast_cancer(path, n=40, missing_rows=(3, 7), seed=0):
    rng = np.random.default_rng(seed)
    ages = ["30-39", "40-49", "50-59", "60-69"]
    sizes = ["0-4", "10-14", "20-24", "30-34"]
    nodes = ["0-2", "3-5", "6-8"]
    lines = []
    for i in range(n):
        row = [
            "recurrence-events" if i % 3 == 0 else "no-recurrence-events",
            rng.choice(ages), rng.choice(["premeno", "ge40", "lt40"]), rng.choice(sizes), rng.choice(nodes),
            rng.choice(["yes", "no"]), str(rng.integers(1, 4)), rng.choice(["left", "right"]),
            rng.choice(["left_low", "left_up", "central", "right_up", "right_low"]), rng.choice(["yes", "no"]),
        ]
        if i in missing_rows:
            row[5] = "?"
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_liver(path, n=60, seed=0):
    rng = np.random.default_rng(seed)
    lines = []
    for i in range(n):
        blood = rng.integers(10, 120, 5)
        drinks = [0.0, 0.5, 2.0, 2.5, 3.0, 6.0][i % 6]
        lines.append(",".join(map(str, blood)) + f",{drinks},{1 + i % 2}")
    path.write_text("\n".join(lines) + "\n")
    return path


def write_heart(path, n=50, seed=0):
    rng = np.random.default_rng(seed)
    lines = []
    for i in range(n):
        row = [
            rng.integers(29, 77), rng.integers(0, 2), rng.integers(1, 5), rng.integers(94, 200),
            rng.integers(126, 564), rng.integers(0, 2), rng.integers(0, 3), rng.integers(71, 202),
            rng.integers(0, 2), round(float(rng.uniform(0, 6.2)), 1), rng.integers(1, 4), rng.integers(0, 4),
            rng.choice([3, 6, 7]),
        ]
        lines.append(" ".join(f"{float(v):.1f}" for v in row) + f" {1 + i % 2}")
    path.write_text("\n".join(lines) + "\n")
    return path


def write_balance_scale(path):
    from adtm.datasets import balance_scale_table
    lines = [",".join(map(str, row)) for row in balance_scale_table().rows]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def data_files(tmp_path):
    return {
        "bankruptcy": write_bankruptcy(tmp_path / "Qualitative_Bankruptcy.data.txt"),
        "balance-scale": write_balance_scale(tmp_path / "balance-scale.data"),
        "breast-cancer": write_breast_cancer(tmp_path / "breast-cancer.data"),
        "liver": write_liver(tmp_path / "bupa.data"),
        "heart": write_heart(tmp_path / "heart.dat"),
    }


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
