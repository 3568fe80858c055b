"""SVG pictures of an extension: images of concentric circles plus the boundary trace."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .extensions import PlaneExtension, boundary_trace

SAMPLES = 1024
INTERIOR_RADII = (0.2, 0.4, 0.6, 0.8)
MARGIN = 0.05


def circle_images(E: PlaneExtension, radii=INTERIOR_RADII, samples: int = SAMPLES, exterior: bool = True):
    """``[(label, points)]`` for ``|z| = r`` and, when ``exterior``, ``|z| = 1/r``."""
    rim = np.exp(2j * np.pi * np.arange(samples) / samples)
    curves = [(f"interior r={r:g}", np.asarray(E(r * rim))) for r in radii]
    if exterior:
        for r in radii:
            R = 1.0 / r
            if R <= E.r_max:
                curves.append((f"exterior r={R:g}", np.asarray(E(R * rim))))
    return curves


def _fmt(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _path(points: np.ndarray, closed: bool = True) -> str:
    parts = [f"{_fmt(p.real)},{_fmt(-p.imag)}" for p in points]
    return "M" + " L".join(parts) + (" Z" if closed else "")


def render_svg(E: PlaneExtension, samples: int = SAMPLES, radii=INTERIOR_RADII, eps: float = 1e-3,
               metadata: dict | None = None) -> str:
    """Return the SVG document as a string. The y axis points up."""
    curves = circle_images(E, radii, samples)
    trace = boundary_trace(E, samples, eps)
    curves.append(("trace inner", trace.inner))
    curves.append(("trace outer", trace.outer))

    pts = np.concatenate([c for _, c in curves])
    finite = pts[np.isfinite(pts)]
    x0, x1 = finite.real.min(), finite.real.max()
    y0, y1 = (-finite.imag).min(), (-finite.imag).max()
    pad = MARGIN * max(x1 - x0, y1 - y0, 1e-9)
    x0, y0 = x0 - pad, y0 - pad
    w, h = x1 - x0 + pad, y1 - y0 + pad
    stroke = _fmt(max(w, h) / 500)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">',
    ]
    if metadata is not None:
        import json
        out.append(f"<metadata>{escape(json.dumps(metadata, sort_keys=True))}</metadata>")
    out.append(f'<g fill="none" stroke-width="{stroke}">')
    for label, c in curves:
        color = "#c03030" if label.startswith("trace") else ("#3050c0" if label.startswith("interior") else "#30a050")
        out.append(f'<path data-curve="{escape(label)}" stroke="{color}" d="{_path(c)}"/>')
    out.append("</g>")
    if not E.certified:
        size = _fmt(max(w, h) / 25)
        out.append(f'<text class="non-certified" x="{_fmt(x0 + pad)}" y="{_fmt(y0 + 2 * pad)}" '
                   f'font-size="{size}" fill="#c03030">non-certified</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
