#!/usr/bin/env python3
"""Bootstrap-resampling generator speaking the stdin/stdout JSON protocol.

--mode selects deliberate misbehaviour for the contract tests.
"""
import argparse
import csv
import json
import random
import sys
import time

MODES = ("ok", "nan", "sleep", "exit", "malformed", "short", "chatty")


def reply(status, out_csv=None, message=None):
    doc = {"status": status}
    if out_csv is not None:
        doc["out_csv"] = out_csv
    if message is not None:
        doc["message"] = message
    print(json.dumps(doc), flush=True)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--config")
    parser.add_argument("--mode", choices=MODES, default="ok")
    args = parser.parse_args()

    config = {}
    if args.config:
        with open(args.config) as fh:
            config = json.load(fh)
    allowed = set(config.get("hyperparameters", ["noise"]))

    req = json.loads(sys.stdin.readline())
    if args.mode == "malformed":
        print("this is not json")
        return 0
    if args.mode == "exit":
        print("simulated crash", file=sys.stderr)
        reply("error", message="simulated crash")
        return 3
    if args.mode == "sleep":
        time.sleep(60)

    hp = req.get("hyperparameters", {})
    unknown = sorted(set(hp) - allowed)
    if unknown:
        reply("error", message="unknown hyperparameters: " + ", ".join(unknown))
        return 1
    noise = float(hp.get("noise", 0.0))

    with open(req["schema_json"]) as fh:
        schema = json.load(fh)
    floats = {c["name"] for c in schema["columns"] if c["kind"] == "float"}

    with open(req["train_csv"], newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)

    rng = random.Random(req["train_seed"] * 1000003 + req["sample_seed"])
    n = req["n_samples"] - (1 if args.mode == "short" else 0)
    out = [list(rng.choice(rows)) for _ in range(n)]
    float_idx = [i for i, name in enumerate(header) if name in floats]
    if noise > 0:
        for row in out:
            for i in float_idx:
                if row[i] != "":
                    row[i] = repr(float(row[i]) + rng.gauss(0.0, noise))
    if args.mode == "nan" and float_idx and out:
        out[0][float_idx[0]] = "nan"

    with open(req["out_csv"], "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(out)
    if args.mode == "chatty":
        print("training epoch 1/1")
    reply("ok", out_csv=req["out_csv"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
