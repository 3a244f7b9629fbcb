import shutil
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def results_dir():
    path = Path(tempfile.mkdtemp(prefix="orbitlab-client-tests-"))
    yield path
    shutil.rmtree(path, ignore_errors=True)


@pytest.fixture(scope="session")
def gateway(results_dir):
    """A live gateway, reached only through its CLI and wire protocol."""
    proc = subprocess.Popen(
        [sys.executable, "-m", "orbitlab.cli", "serve",
         "--bind", "127.0.0.1:0", "--results-dir", str(results_dir)],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True)
    address = None
    deadline = time.time() + 120
    while time.time() < deadline:
        line = proc.stdout.readline()
        if not line:
            break
        if "listening on" in line:
            address = line.split("listening on")[1].split(";")[0].strip()
            break
    if address is None:
        proc.terminate()
        raise RuntimeError("gateway failed to start")
    yield address
    proc.terminate()
    proc.wait(timeout=10)
