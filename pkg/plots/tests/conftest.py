from pathlib import Path

import pytest

SAMPLES = Path(__file__).resolve().parent.parent / "sample_data"


@pytest.fixture
def samples():
    return SAMPLES


@pytest.fixture
def comparison_csv(samples):
    return samples / "comparison.csv"


@pytest.fixture
def partial_comparison_csv(tmp_path, comparison_csv):
    """Comparison table with the learned scenarios removed."""
    lines = comparison_csv.read_text().splitlines()
    keep = [lines[0]] + [
        ln for ln in lines[1:]
        if ln.split(",")[0] not in ("masac", "madqn")
    ]
    path = tmp_path / "comparison_baselines.csv"
    path.write_text("\n".join(keep) + "\n")
    return path
