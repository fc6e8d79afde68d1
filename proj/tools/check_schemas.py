#!/usr/bin/env python3
"""Validates the example configs and the CLI outputs against the schemas in docs/.

usage: check_schemas.py <blowup binary> <docs dir>
"""

import glob
import json
import os
import subprocess
import sys
import tempfile

import jsonschema


def load(path):
    with open(path) as f:
        return json.load(f)


def main():
    binary, docs = sys.argv[1], sys.argv[2]
    schema = {name: load(os.path.join(docs, name + ".schema.json"))
              for name in ("config", "meta", "snapshot", "holder", "reports")}
    checked = 0

    for cfg in sorted(glob.glob(os.path.join(docs, "examples", "*.json"))):
        jsonschema.validate(load(cfg), schema["config"])
        checked += 1

    small_battery = '[{"type": "zero"}, {"type": "scaled_kappa0", "scale": 5}, {"type": "kappa", "theta": 1}]'
    runs = [
        ("simulate", "constant.json", []),
        ("simulate", "zero.json", ["time.snapshot_stride=16"]),
        ("profile-eval", "profile.json", []),
        ("selfsim", "stationary_selfsim.json", ["selfsim.m=128", "selfsim.s_end=1"]),
        ("liouville", "liouville.json", ["selfsim.m=64", "liouville.s_end=4", "liouville.battery=" + small_battery,
                                         "grid.n=256", "liouville.vanishing.times=[0,1,2]"]),
        ("curve", "gaussian_curve.json", ["selfsim.m=64"]),
    ]
    with tempfile.TemporaryDirectory() as tmp:
        for command, cfg, overrides in runs:
            out = os.path.join(tmp, command + "_" + cfg.replace(".json", ""))
            args = [binary, command, os.path.join(docs, "examples", cfg)]
            for o in overrides + ["output.svg=false"]:
                args += ["--set", o]
            env = dict(os.environ, BLOWUP_OUTPUT_DIR=out)
            res = subprocess.run(args, env=env, capture_output=True, text=True)
            if res.returncode != 0:
                sys.exit(f"{command} {cfg} exited with {res.returncode}: {res.stderr}")
            meta = load(os.path.join(out, "meta.json"))
            jsonschema.validate(meta, schema["meta"])
            jsonschema.validate(meta["config"], schema["config"])
            checked += 2
            for snap in glob.glob(os.path.join(out, "snapshots", "*.json")):
                jsonschema.validate(load(snap), schema["snapshot"])
                checked += 1
            for name in ("holder", "reports"):
                path = os.path.join(out, name + ".json")
                if os.path.exists(path):
                    jsonschema.validate(load(path), schema[name])
                    checked += 1
            for csv in glob.glob(os.path.join(out, "**", "*.csv"), recursive=True):
                with open(csv) as f:
                    first = f.readline().strip()
                if first != "# config_hash=" + meta["config_hash"]:
                    sys.exit(f"{csv}: header '{first}' does not carry the run hash")
                checked += 1
    print(f"schemas: {checked} documents valid")


if __name__ == "__main__":
    main()
