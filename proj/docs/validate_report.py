#!/usr/bin/env python3
"""Validate pbn --json reports against report.schema.json.

Usage:
    pbn check ... --json | python3 validate_report.py
    python3 validate_report.py report1.json report2.json

Exits 0 when every document validates, 1 otherwise.
"""

import json
import pathlib
import sys

import jsonschema

SCHEMA = json.loads(
    pathlib.Path(__file__).with_name("report.schema.json").read_text(encoding="utf-8")
)


def check(text: str, name: str) -> bool:
    try:
        jsonschema.validate(json.loads(text), SCHEMA)
    except (ValueError, jsonschema.ValidationError) as err:
        print(f"{name}: {err}", file=sys.stderr)
        return False
    return True


def main() -> int:
    paths = sys.argv[1:]
    if not paths:
        return 0 if check(sys.stdin.read(), "<stdin>") else 1
    ok = True
    for path in paths:
        ok = check(pathlib.Path(path).read_text(encoding="utf-8"), path) and ok
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
