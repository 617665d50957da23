"""Regenerate the CLI golden files: ``python tests/make_golden.py``.

Only run this after the values have been checked against the oracle tests;
the golden files freeze whatever the CLI prints.
"""
import io
import sys
from pathlib import Path

from intersection_game.cli import main

HERE = Path(__file__).parent
CASES = {
    "s1": ["classify", "equilibria", "social", "mechanism", "region"],
    "s2": ["classify", "equilibria", "social", "mechanism"],
    "s3": ["classify", "equilibria", "social", "mechanism"],
    "tiny": ["classify", "equilibria", "social", "mechanism", "region"],
}


def render(argv):
    out = io.StringIO()
    code = main(argv, out)
    return f"{out.getvalue()}# exit {code}\n"


def golden_cases():
    for name, commands in CASES.items():
        for cmd in commands:
            yield f"{name}_{cmd}.txt", [cmd, str(HERE / "data" / f"{name}.scn")]


if __name__ == "__main__":
    for fname, argv in golden_cases():
        (HERE / "golden" / fname).write_text(render(argv), encoding="utf-8")
        print("wrote", fname, file=sys.stderr)
