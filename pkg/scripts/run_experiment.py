#!/usr/bin/env python3
"""
Run the verification suites from a checkout without installing the package.

Usage:
    python scripts/run_experiment.py run --config configs/default.ini --suite diagram
    python scripts/run_experiment.py diagram --poly "t1^2 + t2^3" --n 2
"""
from __future__ import annotations

import sys
from pathlib import Path
from typing import List, Optional


def _ensure_repo_root_on_path() -> None:
    """Scripts run with their own directory as ``sys.path[0]``; add the repository root."""
    repo_root = Path(__file__).resolve().parents[1]
    if str(repo_root) not in sys.path:
        sys.path.insert(0, str(repo_root))


def main(argv: Optional[List[str]] = None) -> int:
    _ensure_repo_root_on_path()
    import click

    from newton_maximal.cli import app

    try:
        code = app(args=argv if argv is not None else sys.argv[1:], standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    return int(code or 0)


if __name__ == "__main__":
    raise SystemExit(main())
