"""Bundled small benchmark datasets (see tools/generate_datasets.py)."""

from importlib import resources

from ..dataset import Dataset, load_csv

BUNDLED = (
    "tictactoe",
    "xor_noise",
    "rings",
    "stairs",
    "corners",
    "grid_parity",
)


def bundled_path(name: str):
    if name not in BUNDLED:
        raise KeyError(f"no bundled dataset named {name!r}")
    return resources.files(__package__) / f"{name}.csv"


def load_bundled(name: str) -> Dataset:
    return load_csv(str(bundled_path(name)))
