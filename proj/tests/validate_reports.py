"""Validate every JSON report in a directory against the report schema."""

import json
import pathlib
import sys

import jsonschema


def main() -> int:
    schema_path, report_dir = pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])
    schema = json.loads(schema_path.read_text())
    validator = jsonschema.Draft202012Validator(schema)
    reports = sorted(p for p in report_dir.rglob("*.json") if not p.name.endswith(".meta.json"))
    if not reports:
        print(f"no reports found in {report_dir}")
        return 1
    failed = 0
    for path in reports:
        errors = list(validator.iter_errors(json.loads(path.read_text())))
        for err in errors:
            print(f"{path.name}: {'/'.join(map(str, err.absolute_path))}: {err.message}")
        failed += bool(errors)
        if not errors:
            print(f"ok {path.name}")
    print(f"{len(reports) - failed} of {len(reports)} reports valid")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
