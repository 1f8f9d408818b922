#!/usr/bin/env python3
"""Run the full pipeline on the bundled sample corpus.

Equivalent to: topicflow --config data/sample/config.ini pipeline
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from topicflow.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main(["--config", str(ROOT / "data/sample/config.ini"), "pipeline"] + sys.argv[1:]))
