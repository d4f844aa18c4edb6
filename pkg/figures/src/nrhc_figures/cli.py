"""render_figs: command-line figure rendering for trace CSVs."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import KINDS, FigureSpec, SchemaError, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figs",
        description="Render state/parameter/error figures from a trace CSV",
    )
    parser.add_argument("trace", type=Path, help="trace CSV path")
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--out", type=Path, required=True,
                        help="output image path (extension selects the format)")
    parser.add_argument("--no-error-norm", action="store_true",
                        help="omit the sync-error-norm subplot on error figures")
    args = parser.parse_args(argv)

    spec = FigureSpec(trace_path=args.trace, kind=args.kind, out_path=args.out,
                      include_error_norm=not args.no_error_norm)
    try:
        render(spec)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"render failed: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
