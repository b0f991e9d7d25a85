"""Validates protocol transcripts and file fixtures against docs/*.schema.json."""

import json
import pathlib
import sys

import jsonschema
from referencing import Registry, Resource


def main() -> int:
    root = pathlib.Path(sys.argv[1])
    transcript = pathlib.Path(sys.argv[2])
    docs = root / "docs"
    formats = json.loads((docs / "formats.schema.json").read_text())
    protocol = json.loads((docs / "protocol.schema.json").read_text())
    registry = Registry().with_resources(
        [(s["$id"], Resource.from_contents(s)) for s in (formats, protocol)]
    )

    def validator(ref):
        return jsonschema.Draft202012Validator({"$ref": ref}, registry=registry)

    checks = []
    lines = [ln for ln in transcript.read_text().splitlines() if ln.strip()]
    if not lines:
        print("empty transcript")
        return 1
    proto = validator("rtc/protocol.schema.json")
    kinds = set()
    for n, line in enumerate(lines, 1):
        msg = json.loads(line)
        kinds.add(msg.get("kind"))
        checks.append((f"{transcript.name}:{n}", proto, msg))
    fixtures = root / "fixtures"
    for doc in sorted(fixtures.rglob("*.json")):
        parts = doc.relative_to(fixtures).parts
        if parts[0] == "benchmarks":
            continue
        kind = "script" if "scripts" in parts else "scene"
        checks.append((str(doc.relative_to(fixtures)), validator(f"rtc/formats.schema.json#/$defs/{kind}"),
                       json.loads(doc.read_text())))
    for extra in sys.argv[3:]:
        kind, path = extra.split("=", 1)
        doc = pathlib.Path(path)
        if kind == "records":
            for n, line in enumerate(doc.read_text().splitlines(), 1):
                checks.append((f"{doc.name}:{n}", validator("rtc/formats.schema.json#/$defs/record"), json.loads(line)))
        else:
            checks.append((doc.name, validator(f"rtc/formats.schema.json#/$defs/{kind}"), json.loads(doc.read_text())))

    # The schema must actually reject things.
    for bad in ({"v": 1, "kind": "ReachGoal"}, {"v": 2, "kind": "ReachGoal", "session": "s1"},
                {"v": 1, "kind": "SelectPoint", "session": "s1", "point": [1.0]}):
        if proto.is_valid(bad):
            print(f"FAIL schema accepts {bad}")
            return 1

    failures = 0
    for name, v, doc in checks:
        errors = sorted(v.iter_errors(doc), key=lambda e: list(e.path))
        if errors:
            failures += 1
            print(f"FAIL {name}: {errors[0].message} at {list(errors[0].path)}")
    print(f"{len(checks) - failures}/{len(checks)} documents valid; message kinds seen: {sorted(kinds)}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
