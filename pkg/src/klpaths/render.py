"""Plain-text artifact writers: CSV tables, JSON records and SVG polylines."""

from __future__ import annotations

import io
import json
from typing import Iterable, Sequence

import numpy as np

from .stats import _jsonable


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True)


def csv_text(meta: dict, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """CSV with one leading '# {json meta}' comment line."""
    buf = io.StringIO()
    buf.write("# " + dumps(meta) + "\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def svg_polyline(points, meta: dict, *, size: int = 800, margin: float = 0.05) -> str:
    """SVG with one polyline through complex ``points`` in the math plane.

    Coordinates are written untouched; a single group transform flips the
    y-axis so the imaginary part points up.
    """
    z = np.asarray(points, dtype=np.complex128)
    xs, ys = z.real, -z.imag  # screen coordinates after the flip
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    w = x1 - x0 or 1.0
    h = y1 - y0 or 1.0
    vb = (x0 - margin * w, y0 - margin * h, w * (1 + 2 * margin), h * (1 + 2 * margin))
    aspect = vb[3] / vb[2]
    pts = " ".join(f"{float(a)!r},{float(b)!r}" for a, b in zip(z.real, z.imag))
    vb_text = " ".join(repr(float(v)) for v in vb)
    meta_text = dumps(meta).replace("--", "- -")
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{max(1, round(size * aspect))}" '
        f'viewBox="{vb_text}">\n'
        f"<!-- meta: {meta_text} -->\n"
        "<!-- transform: (x, y) -> (x, -y); points are (Re z, Im z) -->\n"
        '<g transform="matrix(1 0 0 -1 0 0)">\n'
        f'<polyline fill="none" stroke="black" stroke-width="1" vector-effect="non-scaling-stroke" points="{pts}"/>\n'
        "</g>\n</svg>\n"
    )


def parse_svg_points(text: str) -> np.ndarray:
    """Vertices of the (single) polyline of an SVG written by :func:`svg_polyline`."""
    import xml.etree.ElementTree as ET

    root = ET.fromstring(text)
    lines = root.findall(".//{http://www.w3.org/2000/svg}polyline")
    if len(lines) != 1:
        raise ValueError(f"expected one polyline, found {len(lines)}")
    pairs = [p.split(",") for p in lines[0].get("points").split()]
    return np.array([complex(float(a), float(b)) for a, b in pairs])
