"""
The command-line tool
=====================

``beliefdb`` keeps a store in a text file and runs BeliefSQL scripts
against it.  This script drives it in a temporary directory.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

from beliefdb.sample import Q2, SCRIPT


def beliefdb(*args):
    cmd = [sys.executable, "-m", "beliefdb", *map(str, args)]
    print("$ beliefdb " + " ".join(map(str, args)))
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print(proc.stdout + proc.stderr, end="")
    print(f"(exit {proc.returncode})\n")


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    (tmp / "birds.bsql").write_text(SCRIPT)
    (tmp / "q2.bsql").write_text(Q2 + ";\n")
    (tmp / "bad.bsql").write_text("select from Sightings;\n")
    db = tmp / "birds.bdb"

    beliefdb("exec", "--db", db, "--file", tmp / "birds.bsql", "--quiet")
    beliefdb("exec", "--db", db, "--file", tmp / "q2.bsql")
    beliefdb("exec", "--db", db, "--file", tmp / "q2.bsql", "--format", "csv")
    beliefdb("exec", "--db", db, "--file", tmp / "bad.bsql")
    beliefdb("stats", "--db", db)
    beliefdb("gen", "--m", 3, "--n", 5, "--seed", 1)
