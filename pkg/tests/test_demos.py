import runpy

import pytest

from conftest import DEMOS


@pytest.mark.parametrize("script", sorted(p.name for p in DEMOS.glob("[0-9][0-9]_*.py")))
def test_demo_runs(script, capsys):
    runpy.run_path(str(DEMOS / script), run_name="__main__")
    assert capsys.readouterr().out
