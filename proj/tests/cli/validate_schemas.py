#!/usr/bin/env python3
"""Validate CLI outputs and bundled scenarios against docs/schemas."""
import json
import pathlib
import sys

try:
    import jsonschema
except ImportError:
    print("jsonschema not installed")
    sys.exit(77)


def load(path):
    with open(path) as f:
        return json.load(f)


def main():
    schemas = pathlib.Path(sys.argv[1])
    scenarios = pathlib.Path(sys.argv[2])
    reports = pathlib.Path(sys.argv[3])
    state = pathlib.Path(sys.argv[4])
    tables = [pathlib.Path(p) for p in sys.argv[5:]]

    checks = [(schemas / "scenario.schema.json", p) for p in sorted(scenarios.glob("*.json"))]
    checks += [(schemas / "report.schema.json", p) for p in sorted(reports.glob("*.report.json"))]
    checks += [(schemas / "cost-table.schema.json", p) for p in tables]

    failures = 0
    for schema_path, doc_path in checks:
        try:
            jsonschema.validate(load(doc_path), load(schema_path))
        except jsonschema.ValidationError as e:
            print(f"{doc_path.name}: {e.message}")
            failures += 1

    log_schema = load(schemas / "authority-log.schema.json")
    lines = (state / "authority.log").read_text().splitlines()
    for n, line in enumerate(lines, 1):
        try:
            jsonschema.validate(json.loads(line), log_schema)
        except (jsonschema.ValidationError, json.JSONDecodeError) as e:
            print(f"authority.log:{n}: {e}")
            failures += 1
    if not lines or json.loads(lines[0]).get("event") != "setup":
        print("authority.log does not start with setup")
        failures += 1

    print(f"{len(checks) + len(lines)} documents checked, {failures} invalid")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
