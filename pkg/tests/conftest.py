import copy
import json
import pathlib

import pytest

CONFIG_DIR = pathlib.Path(__file__).resolve().parent.parent / "configs"


def load_config_doc(name: str) -> dict:
    with open(CONFIG_DIR / name) as fh:
        return json.load(fh)


@pytest.fixture
def demo1d_doc():
    return load_config_doc("demo1d.json")


@pytest.fixture
def demo2d_doc():
    return load_config_doc("demo2d.json")


@pytest.fixture
def tiny1d_doc(demo1d_doc):
    """A fast 1-D configuration for end-to-end tests."""
    doc = copy.deepcopy(demo1d_doc)
    doc["grid"]["points_per_axis"] = 65
    doc["experiment"]["compute_orders"] = False
    return doc


@pytest.fixture
def tiny2d_doc(demo2d_doc):
    doc = copy.deepcopy(demo2d_doc)
    doc["grid"]["points_per_axis"] = 33
    doc["experiment"]["compute_orders"] = False
    return doc
