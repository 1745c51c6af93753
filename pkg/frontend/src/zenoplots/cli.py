"""zenoplots <figspec> [...]: render figures from simulator CSV output."""

from __future__ import annotations

import argparse
import sys

from .csvdata import SchemaError
from .figspec import FigSpecError, parse_figspec
from .render import render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="zenoplots",
        description="Render figure analogues from quench CSV files.",
    )
    parser.add_argument("specs", nargs="+", help="figure spec files (key = value)")
    args = parser.parse_args(argv)
    for spec_path in args.specs:
        try:
            result = render(parse_figspec(spec_path))
        except (FigSpecError, SchemaError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(result.out_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
