"""End-to-end checks of the dsn-bench command line.

usage: cli_test.py <dsn-bench> <work-dir>
"""

import csv
import json
import pathlib
import shutil
import subprocess
import sys
import xml.etree.ElementTree as ET

BIN = sys.argv[1]
WORK = pathlib.Path(sys.argv[2])

failures = []


def run(*args, expect=0):
    proc = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True)
    if proc.returncode != expect:
        failures.append(f"{' '.join(map(str, args))}: exit {proc.returncode}, wanted {expect}\n{proc.stderr}")
    return proc


def check(cond, what):
    if not cond:
        failures.append(what)


def main():
    shutil.rmtree(WORK, ignore_errors=True)
    WORK.mkdir(parents=True)

    small = WORK / "small.json"
    small.write_text(json.dumps({
        "name": "small", "area": {"length": 100, "width": 100}, "targets": 30, "sensors": 5,
        "radius": 40, "theta_deg": 90, "directions": 4, "population": 10, "iterations": 20,
        "runs": 3, "seed": 11,
    }))
    big = WORK / "big.json"
    big.write_text(json.dumps({"name": "big", "area": {"length": 200, "width": 200}, "targets": 50, "sensors": 12, "directions": 8}))

    a, b = WORK / "a.json", WORK / "b.json"
    run("generate", "--scenario", small, "--seed", 5, "--out", a)
    run("generate", "--scenario", small, "--seed", 5, "--out", b)
    check(a.read_bytes() == b.read_bytes(), "generate is not byte-identical for the same seed")
    inst = json.loads(a.read_text())
    check(len(inst["sensors"]) == 5 and len(inst["targets"]) == 30, "instance has wrong sizes")

    oracle = run("oracle", "--instance", a)
    optimum = int(oracle.stdout.split()[1]) if oracle.returncode == 0 else -1

    for algo in ("daaso", "random", "greedy", "exhaustive"):
        out = WORK / f"run_{algo}.csv"
        run("run", "--instance", a, "--algo", algo, "--pop", 10, "--iters", 20, "--seed", 3, "--out", out)
        if not out.exists():
            continue
        rows = list(csv.DictReader(out.open()))
        check(rows and list(rows[0].keys()) == ["run_id", "seed", "iteration", "best_nct"], f"{algo}: bad header")
        nct = [int(r["best_nct"]) for r in rows]
        check(nct == sorted(nct), f"{algo}: history not monotone")
        check(nct[-1] <= optimum, f"{algo}: final {nct[-1]} above optimum {optimum}")
        if algo == "exhaustive":
            check(nct[-1] == optimum, "exhaustive run disagrees with oracle")

    out_dir = WORK / "bench"
    run("bench", "--scenario", small, "--algo", "daaso", "--runs", 3, "--seed", 9, "--out-dir", out_dir)
    runs = list(csv.DictReader((out_dir / "runs.csv").open()))
    check(sorted({r["run_id"] for r in runs}) == ["1", "2", "3"], "bench runs.csv lacks three runs")
    check(len(runs) == 3 * 21, f"bench runs.csv has {len(runs)} rows, wanted 63")
    summary = list(csv.DictReader((out_dir / "summary.csv").open()))
    check(len(summary) == 1 and summary[0]["algorithm"] == "daaso" and summary[0]["runs"] == "3", "bad summary.csv")
    svg = ET.parse(out_dir / "convergence.svg").getroot()
    check(svg.tag.endswith("svg"), "convergence.svg root is not <svg>")

    fixed = WORK / "fixed"
    run("bench", "--scenario", small, "--algo", "random", "--runs", 2, "--seed", 9, "--out-dir", fixed,
        "--fixed-instance")
    check((fixed / "runs.csv").exists(), "fixed-instance bench wrote no runs.csv")

    run("run", "--instance", a, "--algo", "simplex", "--seed", 1, "--out", WORK / "x.csv", expect=2)
    run("run", "--instance", a, "--algo", "daaso", "--pop", 2, "--seed", 1, "--out", WORK / "x.csv", expect=2)
    run("generate", "--scenario", WORK / "missing.json", "--seed", 1, "--out", WORK / "x.json", expect=2)
    bad = WORK / "bad.json"
    bad.write_text("{ not json")
    run("oracle", "--instance", bad, expect=2)
    run("generate", "--scenario", small, "--seed", "-3", "--out", WORK / "x.json", expect=2)

    huge = WORK / "huge.json"
    run("generate", "--scenario", big, "--seed", 1, "--out", huge)
    run("oracle", "--instance", huge, expect=3)

    for f in failures:
        print("FAIL:", f)
    print("cli: ok" if not failures else f"cli: {len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
