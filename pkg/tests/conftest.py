import io
from contextlib import redirect_stdout

import pytest

from cis import cli


@pytest.fixture
def run_cli(tmp_path, monkeypatch):
    """In-process CLI runner against an isolated cache directory."""
    monkeypatch.setenv("CIS_CACHE_DIR", str(tmp_path / "cache"))

    def run(*argv):
        buf = io.StringIO()
        with redirect_stdout(buf):
            code = cli.main(list(argv))
        return code, buf.getvalue()

    return run
