"""End-to-end checks of the cnmc command-line tool."""

import csv
import io
import json
import subprocess
import sys
import tempfile
from pathlib import Path

CNMC = sys.argv[1]
failures = []


def run(*args, code=0):
    p = subprocess.run([CNMC, *args], capture_output=True, text=True)
    if p.returncode != code:
        failures.append(f"{' '.join(args)}: exit {p.returncode}, expected {code}\n{p.stderr}")
    return p.stdout


def check(cond, what):
    if not cond:
        failures.append(what)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# kernels
out = rows(run("kernels", "--N", "3", "--alpha", "0.5"))
check(float(out[0]["value"]) > 0 and out[0]["quantity"] == "b_alpha", "b_alpha row")
out = rows(run("kernels", "--N", "2", "--alpha", "0.5", "--tau", "1"))
g = [r for r in out if r["quantity"] == "G"]
check(len(g) == 1 and abs(float(g[0]["value"]) - 2 * (1 + 5 ** -1.25)) < 1e-12, "N=2 G(1)")
out = rows(run("kernels", "--N", "3", "--alpha", "0.5", "--h-grid", "0:0.5:5"))
h = [float(r["value"]) for r in out if r["quantity"] == "h"]
check(len(h) == 11 and all(b > a for a, b in zip(h, h[1:])), "h increasing")
run("kernels", "--N", "3", "--alpha", "1.5", code=2)
run("kernels", "--N", "1", "--alpha", "0.5", code=2)

# bifurcation
bif = json.loads(run("--format", "json", "bifurcation", "--N", "3", "--alpha", "0.5"))
check(abs(bif["lambda"][1]) < 1e-10, "lambda_1 at mu*")
check(bif["lambda"][0] == -bif["b_alpha"], "lambda_0 = -b_alpha")
check(bif["h_prime_at_star"] > 0, "h' > 0")
check(len(bif["lambda"]) == 9, "k = 0..8")

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    # nmc
    (tmp / "one.json").write_text('{"N": 3, "alpha": 0.5, "coeffs": [1.0]}')
    out = rows(run("nmc", str(tmp / "one.json"), "--points", "0,1.5"))
    b = bif["b_alpha"]
    check(all(abs(float(r["lemma22"]) - b / 0.5) < 1e-6 * b for r in out), "constant profile H = b/alpha")
    (tmp / "even.json").write_text('{"N": 3, "alpha": 0.5, "coeffs": [1.0, 0.1, 0.02]}')
    out = rows(run("nmc", str(tmp / "even.json"), "--points", "0.7,-0.7", "--expr", "lemma22,lemma21"))
    for r in out:
        check(abs(float(r["lemma21"]) / float(r["lemma22"]) - 1) < 1e-6, "lemma21 vs lemma22")
    check(abs(float(out[0]["lemma22"]) - float(out[1]["lemma22"])) < 1e-8, "even profile symmetric")
    (tmp / "bad.json").write_text('{"N": 3, "alpha": 0.5, "coeffs": [0.5, 0.6]}')
    run("nmc", str(tmp / "bad.json"), "--points", "0", code=2)
    (tmp / "broken.json").write_text("{not json")
    run("nmc", str(tmp / "broken.json"), "--points", "0", code=2)

    # trace
    cfg = {"params": {"N": 2, "alpha": 0.5}, "branch": {"K": 8, "M": 32, "a_step": 0.01, "a_max": 0.03},
           "output_dir": str(tmp / "t1"), "format": "csv"}
    (tmp / "cfg.json").write_text(json.dumps(cfg))
    summary = run("trace", str(tmp / "cfg.json"))
    check("points 7" in summary, "trace summary")
    pts = rows((tmp / "t1" / "branch.csv").read_text())
    check(len(pts) == 7, "branch rows")
    check(all(float(p["residual_sup"]) < 1e-10 for p in pts), "branch residuals")
    for p, q in zip(pts, reversed(pts)):
        check(abs(float(p["mu"]) - float(q["mu"])) < 1e-8, "mu(a) = mu(-a)")
    last = json.loads((tmp / "t1" / "point_006.json").read_text())
    b2 = float(rows(run("kernels", "--N", "2", "--alpha", "0.5"))[0]["value"])
    target = last["mu"] ** -0.5 * b2 / 0.5
    out = rows(run("nmc", str(tmp / "t1" / "point_006.json"), "--points", "0.13,0.9,2.2,3.0"))
    check(all(abs(float(r["lemma22"]) - target) < 1e-7 for r in out), "branch profile round trip")

    run("--threads", "3", "trace", str(tmp / "cfg.json"), "--output-dir", str(tmp / "t3"))
    for f in sorted((tmp / "t1").iterdir()):
        check(f.read_bytes() == (tmp / "t3" / f.name).read_bytes(), f"threads 1 vs 3: {f.name}")
    run("trace", str(tmp / "cfg.json"), "--newton-max-iters", "1", "--output-dir", str(tmp / "t4"), code=4)

# verify
text = run("verify", "--suite", "quad")
check(text.count("PASS quad/") == 4, "quad suite lines")
summary = json.loads(text[text.index("{"):])
check(summary["failed"] == 0 and summary["passed"] == 4, "verify JSON summary")
check(text == run("--threads", "4", "verify", "--suite", "quad"), "verify deterministic")
run("verify", "--suite", "nope", code=2)

for f in failures:
    print("FAIL", f)
print("cli checks:", "ok" if not failures else f"{len(failures)} failed")
sys.exit(1 if failures else 0)
