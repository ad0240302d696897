import runpy
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


@pytest.mark.parametrize("script, args", [
    ("level_scan.py", ["shift-1", "--levels", "8,16"]),
    ("gap_decay.py", ["--levels", "8,16"]),
    ("defect_floor.py", ["--levels", "8,16"]),
])
def test_script_runs(script, args, monkeypatch, capsys):
    monkeypatch.setattr(sys, "argv", [script, *args])
    runpy.run_path(str(SCRIPTS / script), run_name="__main__")
    out = capsys.readouterr().out
    assert out.count("\n") >= 3
