"""
Reproducible reports from the command line
==========================================

Every command writes CSV or JSON; the exit status is 0 when all checks
hold, 2 when one fails and 3 when precision runs out.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path


def qexptheta(*args):
    proc = subprocess.run([sys.executable, "-m", "qexptheta", *args], capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


code, out, _ = qexptheta("verify-rational", "q=0.5", "u=1,0", "t=3/2", "lambda=1/2", "count=8", "--digits", "8")
print("exit", code)
print(out)

# a scenario file plus a flag override
with tempfile.TemporaryDirectory() as tmp:
    config = Path(tmp) / "scenario.json"
    config.write_text(json.dumps({"q": "0.6", "u": "1,1", "t": "golden", "beta": "0.3", "n_max": 2000, "count": 5}))
    report = Path(tmp) / "report.json"
    code, _, _ = qexptheta("verify-irrational", "--config", str(config), "--format", "json", "--out", str(report), "--bits", "192")
    doc = json.loads(report.read_text())
    print("exit", code, "bits", doc["bits"], "rate constant", doc["summary"]["rate_constant"])

# not enough bits for a deep hit: exit status 3
code, _, err = qexptheta("verify-rational", "q=0.3", "t=3/2", "n_min=200", "count=1", "--bits", "64")
print("exit", code, err.strip())
