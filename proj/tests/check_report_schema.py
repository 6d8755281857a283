#!/usr/bin/env python3
"""Validates the CLI's JSON report against docs/report.schema.json on every exit path."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def main():
    cli, src = sys.argv[1], Path(sys.argv[2])
    schema = json.loads((src / "docs" / "report.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    toy = ["--model", str(src / "samples/toy/model.ode"), "--data", str(src / "samples/toy/data.csv")]
    free = ["--model", str(src / "samples/nonidentifiable/model.ode"),
            "--data", str(src / "samples/nonidentifiable/data.csv")]
    systems = src / "samples/systems"

    tmp = Path(tempfile.mkdtemp(prefix="paramcert_schema_"))
    (tmp / "line.txt").write_text("x*y - 1\n")
    (tmp / "short.csv").write_text("t,y\n0,2\n1,1\n")

    cases = [
        ("estimate ok", ["estimate", *toy, "--orders", "2"], 0),
        ("estimate default orders", ["estimate", *toy], 0),
        ("estimate missing data", ["estimate", "--model", toy[1], "--data", str(tmp / "none.csv")], 1),
        ("estimate bad flag", ["estimate", *toy, "--interp", "spline"], 1),
        ("estimate no estimate", ["estimate", *toy, "--orders", "2", "--bounds", "mu>5"], 2),
        ("estimate order selection", ["estimate", "--model", toy[1], "--data", str(tmp / "short.csv"),
                                      "--orders", "3"], 2),
        ("estimate not zero-dimensional", ["estimate", *free], 3),
        ("estimate timeout", ["estimate", *toy, "--timeout", "0.000001"], 4),
        ("estimate out of memory", ["estimate", *toy, "--mem-limit", "1"], 5),
        ("solve ok", ["solve", "--system", str(systems / "toy.txt")], 0),
        ("solve empty", ["solve", "--system", str(systems / "inconsistent.txt")], 0),
        ("solve missing", ["solve", "--system", str(tmp / "none.txt")], 1),
        ("solve not zero-dimensional", ["solve", "--system", str(tmp / "line.txt")], 3),
        ("solve timeout", ["solve", "--system", str(systems / "toy.txt"), "--timeout", "0.000001"], 4),
        ("bench ok", ["bench", "--corpus", str(src / "corpus"), "--jobs", "2"], 0),
        ("bench missing corpus", ["bench", "--corpus", str(tmp / "nothing")], 1),
        ("no subcommand", [], 1),
    ]

    failures = 0
    for name, args, code in cases:
        p = subprocess.run([cli, *args], capture_output=True, text=True, timeout=300)
        problems = []
        if p.returncode != code:
            problems.append(f"exit {p.returncode}, expected {code}")
        try:
            report = json.loads(p.stdout)
            problems += [e.message for e in validator.iter_errors(report)]
            if report.get("exit_code") != p.returncode:
                problems.append("exit_code field disagrees with process exit status")
        except json.JSONDecodeError as e:
            problems.append(f"stdout is not JSON: {e}")
        print(("FAIL " if problems else "ok   ") + name)
        for msg in problems:
            print("     " + msg)
        failures += bool(problems)

    print(f"{len(cases) - failures}/{len(cases)} exit paths conform")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
