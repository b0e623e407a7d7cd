"""Error-versus-measurements curve from image-recovery JSON output."""

import json

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def read_error_curve(path):
    """Parse recovery JSON into sorted (p, rel_error) pairs.

    The file must contain a ``curve`` list whose entries carry ``p`` and
    ``rel_error`` keys; anything else raises ValueError naming the problem.
    """
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed JSON: {exc}") from exc
    if not isinstance(payload, dict) or "curve" not in payload:
        raise ValueError("recovery JSON missing key: curve")
    points = []
    for entry in payload["curve"]:
        missing = [k for k in ("p", "rel_error") if k not in entry]
        if missing:
            raise ValueError(
                "curve entry missing keys: " + ", ".join(missing))
        points.append((int(entry["p"]), float(entry["rel_error"])))
    if not points:
        raise ValueError("recovery JSON has an empty curve")
    return sorted(points)


def plot_error_curve(json_path, out_png):
    """Render the curve to a PNG with a logarithmic error axis."""
    points = read_error_curve(json_path)
    ps = [p for p, _ in points]
    errs = [e for _, e in points]
    fig, ax = plt.subplots(figsize=(5, 3.5), dpi=100)
    try:
        ax.semilogy(ps, [max(e, 1e-16) for e in errs], marker="o", color="k")
        ax.set_xlabel("measurements p")
        ax.set_ylabel("relative error")
        ax.grid(True, which="both", alpha=0.3)
        fig.tight_layout()
        fig.savefig(out_png, format="png",
                    metadata={"Software": "plotviz"})
    finally:
        plt.close(fig)
    return out_png
