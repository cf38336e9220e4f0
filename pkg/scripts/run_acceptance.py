#!/usr/bin/env python3
"""Run the acceptance checklist and print one line per criterion.

Thin wrapper over the pytest module so the checklist can be run on its own:

    python scripts/run_acceptance.py
"""

import subprocess
import sys
from pathlib import Path


def main() -> int:
    root = Path(__file__).resolve().parent.parent
    return subprocess.call(
        [sys.executable, "-m", "pytest", "-s", "-q", str(root / "tests" / "test_acceptance.py")],
        cwd=root,
    )


if __name__ == "__main__":
    sys.exit(main())
