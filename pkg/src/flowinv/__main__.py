"""Allow ``python -m flowinv`` to run the CLI."""

from __future__ import annotations

import sys

from flowinv.cli import main

if __name__ == "__main__":
    sys.exit(main())
