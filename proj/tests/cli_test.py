"""End-to-end checks of the superosc command line."""
import csv
import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

BIN = sys.argv[1]
ROOT = Path(sys.argv[2])
FIX = ROOT / "fixtures"
SCHEMA = json.loads((ROOT / "schemas" / "run_record.schema.json").read_text())

failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def run(*args, env=None):
    e = dict(os.environ)
    e.pop("SUPEROSC_OUT", None)
    e.update(env or {})
    return subprocess.run([BIN, *args], capture_output=True, text=True, env=e)


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    runs = {
        "synth": "synth.cfg",
        "spectrum": "spectrum.cfg",
        "freq-map": "freq_map.cfg",
        "transition": "transition.cfg",
        "detune": "detune.cfg",
        "energy": "energy.cfg",
        "sweep": "sweep.cfg",
    }
    for exp, cfg in runs.items():
        out = tmp / exp
        r = run(exp, "--config", str(FIX / cfg), "--out", str(out), "--jobs", "2")
        check(r.returncode == 0, f"{exp} exits 0 ({r.stderr.strip()})")
        record = json.loads((out / f"{exp}.json").read_text())
        try:
            jsonschema.validate(record, SCHEMA)
            check(True, f"{exp} record matches schema")
        except jsonschema.ValidationError as err:
            check(False, f"{exp} record matches schema: {err.message}")
        for name in record["files"]:
            check((out / name).exists(), f"{exp} wrote {name}")
            if name.endswith(".csv"):
                with open(out / name) as f:
                    rows = list(csv.reader(f))
                check(len(rows) > 1 and all(len(row) == len(rows[0]) for row in rows),
                      f"{name} has a header and rectangular rows")
                check("e" in rows[1][0], f"{name} numbers use exponent notation")

    payload = json.loads((tmp / "spectrum" / "spectrum.json").read_text())["payload"]
    check(payload["certificate"]["pass"], "spectrum certificate passes")
    energy = json.loads((tmp / "energy" / "energy.json").read_text())["payload"]
    check(abs(energy["report"]["residual"]) <= 0.05, "energy residual within 5%")
    check(energy["modes"]["length"] == 10000, "energy mode box is L = 1e4")

    lines = (tmp / "sweep" / "sweep.jsonl").read_text().splitlines()
    check(len(lines) == 3, "sweep writes one line per point")
    check([json.loads(l)["index"] for l in lines] == [0, 1, 2], "sweep lines are in order")
    check(all(json.loads(l)["status"] == "ok" for l in lines), "sweep points all succeed")

    single = tmp / "sweep_single"
    run("sweep", "--config", str(FIX / "sweep.cfg"), "--out", str(single), "--jobs", "1")
    strip = lambda s: [{k: v for k, v in json.loads(l).items()} for l in s.splitlines()]
    check(strip((single / "sweep.jsonl").read_text()) == strip("\n".join(lines)),
          "sweep output independent of --jobs")

    r = run("sweep", "--config", str(FIX / "sweep_empty.cfg"), "--out", str(tmp / "empty"))
    check(r.returncode == 0, "empty sweep exits 0")
    check((tmp / "empty" / "sweep.jsonl").read_text() == "", "empty sweep writes an empty file")

    env_out = tmp / "from_env"
    r = run("synth", "--config", str(FIX / "synth_bessel.cfg"), "--quiet", env={"SUPEROSC_OUT": str(env_out)})
    check(r.returncode == 0 and (env_out / "synth.json").exists(), "SUPEROSC_OUT sets the output directory")
    check(r.stdout == "", "--quiet prints nothing")
    flag_out = tmp / "from_flag"
    run("synth", "--config", str(FIX / "synth_bessel.cfg"), "--quiet", "--out", str(flag_out),
        env={"SUPEROSC_OUT": str(env_out / "unused")})
    check((flag_out / "synth.json").exists() and not (env_out / "unused").exists(), "--out overrides SUPEROSC_OUT")

    for cfg, exp in [("bad_unknown_key.cfg", "synth"), ("bad_delta.cfg", "synth"), ("bad_window.cfg", "synth")]:
        r = run(exp, "--config", str(FIX / cfg), "--out", str(tmp / "bad"))
        check(r.returncode == 2, f"{cfg} exits 2 ({r.stderr.strip()})")
    r = run("synth", "--config", str(FIX / "missing.cfg"), "--out", str(tmp / "bad"))
    check(r.returncode == 2, "missing config exits 2")
    r = run("teleport", "--config", str(FIX / "synth.cfg"))
    check(r.returncode == 2, "unknown experiment exits 2")
    r = run("transition", "--config", str(FIX / "bad_fit.cfg"), "--out", str(tmp / "bad"))
    check(r.returncode == 3, f"failed fit exits 3 ({r.stderr.strip()})")
    r = run("synth", "--config", str(FIX / "bad_unknown_key.cfg"), "--out", str(tmp / "bad"))
    check(":3:" in r.stderr and "colour" in r.stderr, "validation errors name the file, line and field")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
