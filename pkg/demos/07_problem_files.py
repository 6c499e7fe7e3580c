"""
Problem and result files
========================

Problems are JSON documents; ``momrec solve`` writes a result that
``momrec verify`` rechecks from the serialised atoms alone.  The same entry
points are available from Python.
"""

import json
import tempfile
from pathlib import Path

from momrec.cli import main

here = Path(__file__).resolve().parent
problem = here / "problems" / "cp_tensor.json"
print(json.dumps(json.loads(problem.read_text())["equations"][0]))

with tempfile.TemporaryDirectory() as tmp:
    result = Path(tmp) / "result.json"
    code = main(["solve", str(problem), "--out", str(result)])
    print("solve exit code:", code)
    print("verify exit code:", main(["verify", str(result), str(problem)]))
    head = main(["dump-sdp", str(problem), "--order", "2", "--out", str(Path(tmp) / "sdp.txt")])
    print((Path(tmp) / "sdp.txt").read_text().splitlines()[:3])
