#!/usr/bin/env python3
"""Runs every fptc command with --format json and validates the output
against the shipped schemas. Usage: check_schemas.py FPTC_BINARY SOURCE_DIR"""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def main() -> int:
    fptc, root = sys.argv[1], pathlib.Path(sys.argv[2])
    data = root / "data" / "irrigation"
    schemas = root / "schemas"
    tmp = pathlib.Path(tempfile.mkdtemp(prefix="fptc_schemas_"))
    bench = ["--model", str(data / "model.json"), "--component", "IrrigationUnit",
             "--base", str(data / "base")]
    tree, obs, learned, probs = (tmp / n for n in ("tree.json", "obs.jsonl", "learned.fla", "p.json"))
    probs.write_text('{"ComputingBoard.Bd_in.valueCoarse": 0.2}')

    def run(*args):
        res = subprocess.run([fptc, "--format", "json", *map(str, args)], capture_output=True, text=True)
        if res.returncode not in (0, 1):
            raise RuntimeError(f"{args}: exit {res.returncode}: {res.stderr}")
        return res.stdout

    fla = ["--inject", "Bd_in=valueCoarse"]
    checks = [
        ("model", (data / "model.json").read_text()),
        ("model-check", run("model", "check", data / "model.json")),
        ("fla-run", run("fla", "run", data / "model.json", *fla)),
        ("fault-tree", run("ft", "gen", data / "model.json", *fla, "--target", "ComputingBoard.Bd_out")),
    ]
    tree.write_text(checks[-1][1])
    checks.append(("ft-analyze", run("ft", "analyze", tree, "--probabilities", probs)))
    checks.append(("discover", run("test", "discover", *bench, "--no-nofailure", "-o", obs)))
    checks += [("observation", line) for line in obs.read_text().splitlines()]
    checks.append(("verdicts", run("test", "validate", *bench, "--rules", data / "sample_rules.fla")))
    checks.append(("rules-gen", run("rules", "gen", obs, "-o", learned)))
    checks.append(("rules-diff", run("rules", "diff", data / "sample_rules.fla", learned)))

    failures = 0
    for name, text in checks:
        schema = json.loads((schemas / f"{name}.schema.json").read_text())
        try:
            jsonschema.validate(json.loads(text), schema)
        except (jsonschema.ValidationError, json.JSONDecodeError) as e:
            failures += 1
            print(f"FAIL {name}: {str(e).splitlines()[0]}")
    print(f"{len(checks) - failures}/{len(checks)} documents valid")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
