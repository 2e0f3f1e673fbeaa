import subprocess
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent.parent


def run_cli(args, cwd):
    """Drive the simulation package strictly through its CLI."""
    proc = subprocess.run([sys.executable, "-m", "spinchaos.cli", *args],
                          cwd=cwd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr + proc.stdout
    return proc


@pytest.fixture(scope="session")
def tiny_outputs(tmp_path_factory):
    """Small but real simulation outputs generated via the public CLI."""
    root = tmp_path_factory.mktemp("tiny")
    specfile = root / "spec.toml"
    specfile.write_text(
        '[scan]\nname = "tinyplot"\ndiagnostics = ["lle", "coverage", "randomization"]\n'
        'ic_kind = "named"\nic_names = ["xR", "xC"]\n\n'
        "[lle]\nn_iter = 40\n\n"
        "[histogram]\nn_samples = 2000\n\n"
        "[ensemble]\nn_ens = 32\nt_f_tau = 2.0\ncadence_tau = 0.5\n\n"
        "[[point]]\namp = 0.5\nfreq_hz = 60.0\n\n"
        "[[point]]\namp = 2.2\nfreq_hz = 60.0\n")
    scan_dir = root / "scan"
    run_cli(["scan", str(specfile), "--out", str(scan_dir)], cwd=root)
    run_cli(["dips", "--omega-m", "60", "--count", "4", "--out", str(root / "dips.csv")],
            cwd=root)
    trace_spec = root / "trace.toml"
    trace_spec.write_text(
        '[scan]\nname = "tinytrace"\ndiagnostics = ["traces"]\n'
        'ic_kind = "named"\nic_names = ["xC"]\n\n'
        "[lle]\nn_iter = 30\n\n"
        "[[point]]\namp = 17.8\nfreq_hz = 60.0\n")
    trace_dir = root / "trace"
    run_cli(["scan", str(trace_spec), "--out", str(trace_dir)], cwd=root)
    return {"scan": scan_dir, "dips": root / "dips.csv", "trace": trace_dir}


@pytest.fixture(scope="session")
def preset_outputs():
    """Real preset outputs from the acceptance gate, when that has run."""
    cache = REPO_ROOT / ".acceptance_cache"
    if not (cache / "fig2" / "lle.csv").exists():
        pytest.skip("acceptance cache not present; run the main package's gate first")
    return cache
