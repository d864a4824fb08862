"""Write the published JSON schema of the run configuration."""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from electrovac.shared.config import run_config_schema  # noqa: E402

# Paths
SCHEMA_PATH = "data/schema/run_config.schema.json"


def export(path: str = SCHEMA_PATH):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        json.dump(run_config_schema(), f, indent=2)
        f.write("\n")
    print(f"Schema written to {path}")


if __name__ == "__main__":
    export(sys.argv[1] if len(sys.argv) > 1 else SCHEMA_PATH)
