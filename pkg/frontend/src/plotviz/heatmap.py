"""Grayscale phase-transition heatmap rendered with deterministic pixels.

Each (p, r) cell is shaded by its empirical recovery rate: white for rate 1,
black for rate 0. Cells where the degrees of freedom r(2n - r) exceed the
measurement count p cannot be recovered by any method and are drawn hatched
instead of shaded. The x-axis is labeled by the measurement fraction p/n^2,
the y-axis by rank r. Rendering uses only Pillow primitives with a fixed
layout so identical input bytes yield identical output bytes.
"""

import csv

from PIL import Image, ImageDraw

CSV_COLUMNS = ["n", "p", "r", "trial", "seed", "rel_error", "success",
               "status", "wall_time_s"]

CELL = 28          # cell edge in pixels
LEFT_MARGIN = 34   # room for the r labels
BOTTOM_MARGIN = 26 # room for the p/n^2 labels
TOP_MARGIN = 8
RIGHT_MARGIN = 8
HATCH_STEP = 6


def read_grid_csv(path):
    """Parse a phase-grid CSV into (n, {(p, r): recovery rate}).

    Raises ValueError naming the missing columns on a schema mismatch, on an
    empty table, or when rows mix several matrix sizes n.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise ValueError(
                "grid CSV missing columns: " + ", ".join(missing))
        counts = {}
        hits = {}
        sizes = set()
        for row in reader:
            n = int(row["n"])
            p = int(row["p"])
            r = int(row["r"])
            sizes.add(n)
            key = (p, r)
            counts[key] = counts.get(key, 0) + 1
            hits[key] = hits.get(key, 0) + int(row["success"])
    if not counts:
        raise ValueError("grid CSV has no data rows")
    if len(sizes) != 1:
        raise ValueError(
            f"grid CSV mixes matrix sizes n={sorted(sizes)}; plot one size "
            "at a time")
    rates = {key: hits[key] / counts[key] for key in counts}
    return sizes.pop(), rates


def _cell_origin(col, row_idx):
    return (LEFT_MARGIN + col * CELL, TOP_MARGIN + row_idx * CELL)


def _hatch(draw, x0, y0):
    for off in range(-CELL, CELL, HATCH_STEP):
        draw.line([(x0 + off, y0 + CELL - 1), (x0 + off + CELL - 1, y0)],
                  fill=96)
    draw.rectangle([x0, y0, x0 + CELL - 1, y0 + CELL - 1], outline=96)


def render_heatmap(n, rates):
    """Build the heatmap image for rates keyed by (p, r)."""
    p_values = sorted({p for p, _ in rates})
    r_max = max(r for _, r in rates)
    r_values = list(range(1, r_max + 1))
    width = LEFT_MARGIN + CELL * len(p_values) + RIGHT_MARGIN
    height = TOP_MARGIN + CELL * len(r_values) + BOTTOM_MARGIN
    img = Image.new("L", (width, height), 255)
    draw = ImageDraw.Draw(img)
    for col, p in enumerate(p_values):
        for row_idx, r in enumerate(r_values):
            x0, y0 = _cell_origin(col, row_idx)
            box = [x0, y0, x0 + CELL - 1, y0 + CELL - 1]
            if r * (2 * n - r) > p:
                _hatch(draw, x0, y0)
            elif (p, r) in rates:
                shade = round(255 * rates[(p, r)])
                draw.rectangle(box, fill=shade, outline=0)
            else:
                draw.rectangle(box, fill=160, outline=0)
    for row_idx, r in enumerate(r_values):
        x0, y0 = _cell_origin(0, row_idx)
        draw.text((4, y0 + CELL // 2 - 5), str(r), fill=0)
    for col, p in enumerate(p_values):
        x0, _ = _cell_origin(col, len(r_values))
        label = f"{p / n ** 2:.2f}"
        draw.text((x0 + 2, height - BOTTOM_MARGIN + 4), label, fill=0)
    return img


def plot_heatmap(csv_path, out_png):
    """Render a grid CSV to a PNG heatmap; no file is written on error."""
    n, rates = read_grid_csv(csv_path)
    img = render_heatmap(n, rates)
    img.save(out_png, format="PNG")
    return out_png
