#!/usr/bin/env python3
"""End-to-end checks of the cdpa command line tool. Usage: cli_integration.py <cdpa>"""

import json
import math
import os
import random
import struct
import subprocess
import sys
import tempfile

CLI = sys.argv[1]
failures = []


def check(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + (f"  ({detail})" if detail else ""))
    if not cond:
        failures.append(name)


def run(*args, env=None, cwd=None):
    e = dict(os.environ)
    e.pop("CDPA_THREADS", None)
    if env:
        e.update(env)
    p = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, env=e, cwd=cwd)
    return p.returncode, p.stdout, p.stderr


def orthonormal(rng, p, r):
    cols = []
    while len(cols) < r:
        v = [rng.gauss(0, 1) for _ in range(p)]
        for c in cols:
            d = sum(a * b for a, b in zip(v, c))
            v = [a - d * b for a, b in zip(v, c)]
        nv = math.sqrt(sum(a * a for a in v))
        cols.append([a / nv for a in v])
    return cols


def signal_pair(seed, p=30, n=200, r=3):
    rng = random.Random(seed)
    s = [[rng.gauss(0, 1) for _ in range(n)] for _ in range(r)]
    out = []
    for _ in range(2):
        a = orthonormal(rng, p, r)
        out.append([[3 * sum(a[k][i] * s[k][j] for k in range(r)) + 0.3 * rng.gauss(0, 1)
                     for j in range(n)] for i in range(p)])
    return out


def write_text(path, m, sep):
    with open(path, "w") as f:
        for row in m:
            f.write(sep.join(repr(x) for x in row) + "\n")


def write_cdpm(path, m):
    with open(path, "wb") as f:
        f.write(b"CDPM" + struct.pack("<II", len(m), len(m[0])))
        for j in range(len(m[0])):
            f.write(struct.pack(f"<{len(m)}d", *(row[j] for row in m)))


def read_cdpm(path):
    with open(path, "rb") as f:
        data = f.read()
    assert data[:4] == b"CDPM"
    rows, cols = struct.unpack("<II", data[4:12])
    vals = struct.unpack(f"<{rows * cols}d", data[12:12 + 8 * rows * cols])
    return [[vals[j * rows + i] for j in range(cols)] for i in range(rows)]


def read_csv(path):
    with open(path) as f:
        return [[float(x) for x in line.split(",")] for line in f if line.strip()]


def strip_timings(j):
    j = dict(j)
    j.pop("timings", None)
    return j


with tempfile.TemporaryDirectory() as tmp:
    P = lambda *parts: os.path.join(tmp, *parts)
    y1, y2 = signal_pair(11)
    write_text(P("y1.csv"), y1, ",")
    write_text(P("y2.tsv"), y2, "\t")
    write_cdpm(P("y1.bin"), y1)
    write_cdpm(P("y2.bin"), y2)

    # ranks
    rc, out, _ = run("ranks", P("y1.csv"), P("y2.tsv"))
    check("ranks exit 0", rc == 0, rc)
    ranks = json.loads(out) if rc == 0 else {}
    check("ranks recovers 3/3/3", (ranks.get("r1"), ranks.get("r2"), ranks.get("r12")) == (3, 3, 3), ranks)
    rc, out_bin, _ = run("ranks", P("y1.bin"), P("y2.bin"))
    check("binary and text inputs agree",
          rc == 0 and strip_timings(json.loads(out_bin))["r12"] == ranks.get("r12"))

    # decompose, csv and binary artifacts
    rc, out, err = run("decompose", P("y1.csv"), P("y2.tsv"), "--ranks", "3,3,3",
                       "--out", P("dcsv"), "--format", "csv")
    check("decompose csv exit 0", rc == 0, err.strip())
    man = json.load(open(P("dcsv", "manifest.json")))
    check("manifest matches stdout", json.loads(out) == man)
    check("all artifacts written", all(os.path.exists(P("dcsv", a)) for a in man["artifacts"]))
    c = read_csv(P("dcsv", "C.csv"))
    check("C is p x n", len(c) == 30 and len(c[0]) == 200)
    n = 200
    expl = sum(x * x for row in c for x in row) / n
    check("explained equals |C|^2 / n", abs(expl - man["explained"]) < 1e-9 * max(1, expl),
          f"{expl} vs {man['explained']}")
    check("explained is the larger sign trace",
          abs(man["explained"] - max(man["sign"]["trace_plus"], man["sign"]["trace_minus"])) < 1e-12)

    rc, _, err = run("decompose", P("y1.bin"), P("y2.bin"), "--ranks", "3,3,3", "--out", P("dbin"))
    check("decompose bin exit 0", rc == 0, err.strip())
    cb = read_cdpm(P("dbin", "C.cdpm"))
    diff = max(abs(a - b) for ra, rb in zip(c, cb) for a, b in zip(ra, rb))
    check("binary and csv C agree", diff < 1e-9, diff)

    # CDPA_THREADS and determinism with bootstrap
    common = ["decompose", P("y1.bin"), P("y2.bin"), "--ranks", "3,3,3", "--bootstrap", "100", "--seed", "5"]
    rc1, o1, _ = run(*common, "--out", P("t1"), env={"CDPA_THREADS": "1"})
    rc2, o2, _ = run(*common, "--out", P("t2"), env={"CDPA_THREADS": "3"})
    check("bootstrap decompose exit 0", rc1 == 0 and rc2 == 0)
    if rc1 == 0 and rc2 == 0:
        m1, m2 = strip_timings(json.loads(o1)), strip_timings(json.loads(o2))
        check("interval reported", m1["interval"] is not None
              and m1["interval"]["lower"] <= m1["interval"]["upper"], m1["interval"])
        check("manifest independent of CDPA_THREADS", m1["interval"] == m2["interval"]
              and m1["explained"] == m2["explained"])
    rc, _, _ = run(*common, "--out", P("t3"), env={"CDPA_THREADS": "zero"})
    check("bad CDPA_THREADS is an input error", rc == 2, rc)

    # bootstrap subcommand
    rc, out, err = run("bootstrap", P("y1.csv"), P("y2.tsv"), "--ranks", "3,3,3",
                       "--replicates", "100", "--seed", "9", "--threads", "2")
    check("bootstrap exit 0", rc == 0, err.strip())
    if rc == 0:
        b = json.loads(out)
        lo, hi = b["interval"]["lower"], b["interval"]["upper"]
        check("bootstrap interval brackets a positive value", 0 < lo <= hi, (lo, hi))
    rc, _, _ = run("bootstrap", P("y1.csv"), P("y2.tsv"), "--ranks", "3,3,3", "--replicates", "10")
    check("too few replicates is an input error", rc == 2, rc)

    # oracle
    rc, out, _ = run("oracle", "--theta", 0, 15, 30, 45, 60, 75)
    check("oracle exit 0", rc == 0)
    vals = [v["trace_cov_c"] for v in json.loads(out)["values"]]
    published = [0.890, 0.479, 0.213, 0.126, 0.092, 0.088]
    check("oracle reproduces the published curve", all(abs(a - b) < 2e-3 for a, b in zip(vals, published)), vals)

    # match
    rng = random.Random(3)
    b1 = orthonormal(rng, 7, 2)
    b1 = [[b1[k][i] for k in range(2)] for i in range(7)]
    perm = list(range(7))
    rng.shuffle(perm)
    b2 = [b1[perm[i]] for i in range(7)]
    write_text(P("b1.csv"), b1, ",")
    write_text(P("b2.csv"), b2, ",")
    for method in ("exhaustive", "dspfp", "identity"):
        rc, out, err = run("match", P("b1.csv"), P("b2.csv"), "--method", method, "--out", P(f"perm_{method}.json"))
        check(f"match {method} exit 0", rc == 0, err.strip())
        if rc == 0 and method != "identity":
            got = json.load(open(P(f"perm_{method}.json")))
            aligned = [b2[g] for g in got]
            err_max = max(abs(a - b) for ra, rb in zip(aligned, b1) for a, b in zip(ra, rb))
            check(f"match {method} undoes the scramble", err_max < 1e-12, err_max)
    rc, out, _ = run("decompose", P("y1.csv"), P("y2.tsv"), "--ranks", "3,3,3",
                     "--perm", P("dcsv", "permutation.json"), "--out", P("dperm"))
    check("decompose accepts a permutation file", rc == 0)
    rc, _, _ = run("decompose", P("y1.csv"), P("y2.tsv"), "--ranks", "3,3,3",
                   "--perm", P("perm_identity.json"), "--out", P("dperm2"))
    check("permutation of the wrong length exits 2", rc == 2, rc)

    # simulate
    rc, out, err = run("simulate", "--setup", 1, "--theta", 15, "--p1", 40, "--noise", 1, "--n", 100,
                       "--reps", 2, "--true-ranks", "--out", P("sim"), env={"CDPA_THREADS": "2"})
    check("simulate exit 0", rc == 0, err.strip())
    if rc == 0:
        cell = json.loads(out)["cells"][0]
        check("simulate uses planted ranks", cell["metrics"]["r12"]["mean"] == 5.0)
        with open(P("sim", "replications.csv")) as f:
            check("replications.csv has one row per replication", len(f.read().strip().splitlines()) == 3)

    # exit codes
    rc, _, _ = run("decompose", P("missing.csv"), P("y2.tsv"), "--ranks", "3,3,3", "--out", P("x"))
    check("missing file exits 2", rc == 2, rc)
    write_text(P("short.csv"), [row[:150] for row in y2], ",")
    rc, _, _ = run("decompose", P("y1.csv"), P("short.csv"), "--ranks", "3,3,3", "--out", P("x"))
    check("sample mismatch exits 2", rc == 2, rc)
    rc, _, _ = run("decompose", P("y1.csv"), P("y2.tsv"), "--ranks", "40,3,3", "--out", P("x"))
    check("rank above dimension exits 2", rc == 2, rc)
    with open(P("bad.csv"), "w") as f:
        f.write("1,2,x\n3,4,5\n")
    rc, _, _ = run("ranks", P("bad.csv"), P("bad.csv"))
    check("malformed matrix exits 2", rc == 2, rc)
    rc, _, _ = run("decompose", P("y1.csv"), P("y2.tsv"), "--ranks", "3,3", "--out", P("x"))
    check("malformed rank list exits 2", rc == 2, rc)
    rc, _, _ = run("oracle", "--theta", 120)
    check("angle out of range exits 2", rc == 2, rc)
    rank1 = [list(y1[0]) for _ in range(30)]
    write_text(P("rank1.csv"), rank1, ",")
    rc, _, err = run("decompose", P("y1.csv"), P("rank1.csv"), "--ranks", "3,3,3", "--out", P("x"))
    check("rank-deficient signal exits 3", rc == 3, f"{rc} {err.strip()}")
    write_text(P("flat.csv"), [[1.0, 1.0]] * 6, ",")
    rc, _, _ = run("match", P("flat.csv"), P("flat.csv"))
    check("degenerate channel exits 3", rc == 3, rc)

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
