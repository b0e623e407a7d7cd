"""Command-line entry points: plot-heatmap and plot-error."""

import argparse
import sys

from .curve import plot_error_curve
from .heatmap import plot_heatmap


def _run(render, kind, argv):
    parser = argparse.ArgumentParser(
        description=f"render a {kind} PNG from lowrank output")
    parser.add_argument("input", help="input file path")
    parser.add_argument("output", help="output PNG path")
    args = parser.parse_args(argv)
    try:
        render(args.input, args.output)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


def main_heatmap(argv=None):
    return _run(plot_heatmap, "phase-transition heatmap",
                sys.argv[1:] if argv is None else argv)


def main_error(argv=None):
    return _run(plot_error_curve, "recovery-error curve",
                sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main_heatmap())
