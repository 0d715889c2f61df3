import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import shutil

import pytest


@pytest.fixture(scope="session")
def built_demo(tmp_path_factory):
    """Demo workspace with dict.bin, built once per session; copy it before mutating."""
    from aslgen.cli.main import main

    ws = tmp_path_factory.mktemp("demo") / "ws"
    assert main(["demo", "--out", str(ws), "--build"]) == 0
    return ws


@pytest.fixture
def demo_ws(built_demo, tmp_path):
    ws = tmp_path / "ws"
    shutil.copytree(built_demo, ws)
    return ws
