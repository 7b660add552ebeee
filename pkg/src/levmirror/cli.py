"""Command-line front-end for the batch sweeps.

Example::

    levmirror entangle-sweep --config run.json --out e2.csv --threads 4
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import DomainError
from .steady_state import Branch
from .sweeps import RUNNERS, SweepKind, load_config, write_result

_HELP = {
    SweepKind.STEADY_STATE: "both steady-state branches, residuals and the threshold power",
    SweepKind.STABILITY_MAP: "stability verdict over a (kappa, Gamma) grid",
    SweepKind.ENTANGLEMENT: "entropy of entanglement over a (p_tilde, omega) grid",
    SweepKind.VARIANCE: "quadrature variances and squeezing over a (p_tilde, omega) grid",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levmirror",
        description="Sweeps for a levitated cavity mirror.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in SweepKind:
        p = sub.add_parser(kind.value, help=_HELP[kind], description=_HELP[kind])
        p.add_argument("--config", required=True, help="JSON parameter/grid file")
        p.add_argument("--out", required=True, help="CSV output path (summary JSON is written alongside)")
        p.add_argument("--threads", type=int, default=None, metavar="N",
                       help="worker processes (default: config 'workers' or 1)")
        p.add_argument("--branch", choices=[b.value for b in Branch], default=None,
                       help="steady-state branch (default: blue; both for steady-state)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    kind = SweepKind(args.command)
    try:
        config = load_config(args.config, kind)
        changes = {}
        if args.threads is not None:
            if args.threads < 1:
                raise DomainError("--threads must be at least 1")
            changes["workers"] = args.threads
        if args.branch is not None:
            changes["branch"] = Branch.parse(args.branch)
        config = config.with_options(**changes)
        result = RUNNERS[kind](config)
        csv_path, json_path = write_result(result, args.out)
    except (OSError, DomainError) as exc:
        print(f"levmirror: error: {exc}", file=sys.stderr)
        return 2
    counts = ", ".join(f"{k}={v}" for k, v in result.summary["status_counts"].items())
    print(f"wrote {len(result.rows)} rows to {csv_path} ({counts}); summary in {json_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
