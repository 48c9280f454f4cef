import json
import pathlib
import sys

import jsonschema

root = pathlib.Path(sys.argv[1])
schema = json.loads((root / "schemas" / "scenario.schema.json").read_text())
jsonschema.Draft202012Validator.check_schema(schema)
validator = jsonschema.Draft202012Validator(schema)

failed = False
for path in sorted((root / "scenarios").glob("*.json")):
    errors = list(validator.iter_errors(json.loads(path.read_text())))
    for e in errors:
        print(f"{path.name}: {e.json_path}: {e.message}")
    failed |= bool(errors)
    print(f"{path.name}: {'FAIL' if errors else 'ok'}")

bad = {"name": "x", "model": {"kind": "gaussian", "spectrum": {"preset": "white"}}, "snr_grid": [1], "colour": 1}
if validator.is_valid(bad):
    print("schema accepted an unknown field")
    failed = True
sys.exit(1 if failed else 0)
