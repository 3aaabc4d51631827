"""Re-run cpoly from the config echo of its own output and compare results."""
import json
import subprocess
import sys
import tempfile

CASES = [
    ["partition", "--law", "three_point(2)", "--delta", "0.3", "--beta", "0.2", "--n", "6"],
    ["partition", "--method", "mc", "--n", "12", "--delta", "0.25", "--beta", "0.1", "--samples", "4e3", "--seed", "3"],
    ["wsaw", "--d", "3", "--u", "1e-3", "--ladder", "16:64", "--samples", "2e3", "--seed", "7"],
    ["bridge", "--d", "2", "--ladder", "8,300", "--exact-max-n", "64", "--samples", "1e4", "--seed", "5"],
]


def run(cpoly, args):
    out = subprocess.run([cpoly] + args, check=True, capture_output=True, text=True).stdout
    return [json.loads(line) for line in out.splitlines()]


def main(cpoly):
    for args in CASES:
        first = run(cpoly, args)
        record = first[0]
        with tempfile.NamedTemporaryFile("w", suffix=".cfg", delete=False) as cfg:
            for key, value in record["config"].items():
                if key in ("out", "csv"):
                    continue
                if isinstance(value, bool):
                    if value:
                        cfg.write(f"{key}\n")
                    continue
                cfg.write(f"{key}={value}\n")
            path = cfg.name
        again = run(cpoly, record["op"].split() + ["--config", path])
        if [r["result"] for r in again] != [r["result"] for r in first]:
            print("mismatch for", " ".join(args))
            return 1
        print("ok", " ".join(args))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
