"""
electrovac - Main Entry Point

Batch front-end of the verification lab. The supervisor graph routes each
command to the verifier or reducer squad; see `electrovac.cli` for flags.

    python app.py verify --config data/configs/mp_single.json
"""

import sys

from electrovac.cli import main


if __name__ == "__main__":
    sys.exit(main())
