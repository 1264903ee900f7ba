"""Run every CLI command on the bundled fixtures and validate each report."""

import json
import subprocess
import sys
from pathlib import Path

import jsonschema


def main() -> int:
    cli, schema_path, data = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    game = str(data / "two_company.json")
    runs = [
        ["solve", game],
        ["solve", game, "--method", "support_enum"],
        ["solve", str(data / "one_path.json")],
        ["lottery", game],
        ["price", game, "--theta", "0.5"],
        ["economy", game, str(data / "economy.json")],
        ["economy", game, str(data / "economy_uneven.json")],
        ["portfolio", game, str(data / "securities.json")],
        ["portfolio", game, str(data / "securities_bond.json")],
        ["demo"],
    ]
    failures = 0
    for args in runs:
        for timing in (False, True):
            argv = [cli, *args] + ([] if timing else ["--no-timing"])
            proc = subprocess.run(argv, capture_output=True, text=True)
            label = " ".join(args[:1] + [Path(a).name for a in args[1:]])
            if proc.returncode != 0:
                print(f"FAIL {label}: exit {proc.returncode}: {proc.stderr.strip()}")
                failures += 1
                continue
            report = json.loads(proc.stdout)
            errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
            if ("timing_ms" in report) != timing:
                errors.append("timing_ms presence does not match --no-timing")
            for err in errors:
                where = "/".join(map(str, getattr(err, "path", []))) or "<root>"
                print(f"FAIL {label}: {where}: {getattr(err, 'message', err)}")
            failures += bool(errors)
            if not errors:
                print(f"ok   {label}{' (timed)' if timing else ''}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
