#!/usr/bin/env python3
"""Runs the CLI with --json on sample inputs and validates each document."""

import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource


def main():
    if len(sys.argv) != 4:
        sys.exit("usage: check_schemas.py UEXP_BINARY SCHEMA_DIR SAMPLE_DIR")
    exe, schemas, samples = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])

    registry = Registry()
    docs = {}
    for path in schemas.glob("*.json"):
        doc = json.loads(path.read_text())
        docs[path.stem] = doc
        registry = registry.with_resource(path.name, Resource.from_contents(doc))

    s = lambda name: str(samples / name)
    cases = [
        ("normalize", ["--json", "normalize", "(2^3)^q * 4^r"], 0),
        ("prove", ["--json", "prove", "p:{nonprincipal}^2 * p^3 == p^5"], 1),
        ("prove", ["--json", "prove", "2 ^ E1(r, q:{nonprincipal}) == 2 ^ q"], 1),
        ("prove", ["--json", "prove", "E1(p, q) == E1(q, p)"], 2),
        ("trace", ["--trace-json", "prove", "E2(p, 3) == (p^1)^2"], 2),
        ("trace", ["--trace-json", "normalize", "log(2, 16^q)"], 0),
        ("eval", ["--json", "eval", "2^3^2"], 0),
        ("eval", ["--json", "eval", "2^64"], 0),
        ("numfn", ["--json", "numfn", "H", "108"], 0),
        ("logpre", ["--json", "logpre", "--base", "2", "--set", s("set_small.json")], 0),
        ("logpre", ["--json", "logpre", "--base", "3", "--set", s("set_powers_of_3.json")], 0),
        ("pr-min", ["--json", "pr-min", "--config", s("schur.cfg"), "-k", "2", "--lo", "1", "--max", "20"], 0),
        ("pr-min", ["--json", "--budget-nodes", "10", "pr-min", "--config", s("schur.cfg"), "-k", "3", "--lo", "1", "--max", "20"], 2),
        ("pr-avoid", ["--json", "pr-avoid", "--config", s("vdw3.cfg"), "-k", "2", "--lo", "1", "--hi", "8"], 0),
        ("pr-avoid", ["--json", "pr-avoid", "--config", s("schur.cfg"), "-k", "2", "--lo", "1", "--hi", "5"], 1),
        ("pr-check", ["--json", "pr-check", "--config", s("exptriple.cfg"), "--coloring", s("two_class_65535.json")], 0),
        ("pr-check", ["--json", "pr-check", "--config", s("schur.cfg"), "--coloring", s("small_1_8.json")], 1),
        ("pr-cnf", ["--json", "pr-cnf", "--config", s("schur.cfg"), "-k", "2", "--lo", "1", "--hi", "4"], 0),
        ("log-transform", ["--json", "log-transform", "--coloring", s("small_1_8.json"), "--base", "2"], 0),
        ("expip-find", ["--json", "--cap", "2^70", "expip-find", "--set", "powers:2:64", "--depth", "3"], 0),
        ("expip-find", ["--json", "expip-find", "--set", "[5]", "--depth", "2"], 1),
        ("expip-verify", ["--json", "expip-verify", "--set", "[2, 3, 9]", "--xs", "2,3"], 0),
        ("expip-verify", ["--json", "expip-verify", "--set", "[2, 3, 8]", "--xs", "2,3"], 1),
        ("expip-verify", ["--json", "expip-verify", "--set", "interval:2..2^100", "--xs", "2,2^40"], 2),
        ("error", ["--json", "eval", "2^65"], 2),
        ("error", ["--json", "eval", "2 +"], 65),
        ("error", ["--json", "pr-check", "--config", s("schur.cfg"), "--coloring", "{not json"], 65),
    ]

    failed = 0
    for schema, args, code in cases:
        proc = subprocess.run([exe, *args], capture_output=True, text=True)
        label = " ".join(args)
        try:
            if proc.returncode != code:
                raise AssertionError(f"exit {proc.returncode}, expected {code}: {proc.stderr.strip()}")
            jsonschema.validate(json.loads(proc.stdout), docs[schema], registry=registry)
        except (AssertionError, ValueError, jsonschema.ValidationError) as e:
            failed += 1
            print(f"FAIL {schema}: {label}\n  {str(e).splitlines()[0]}")
            continue
        print(f"ok   {schema}: {label}")
    print(f"{len(cases) - failed}/{len(cases)} documents valid")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
