"""Minimal self-contained SVG line plots (no plotting dependency).

One curve plus a shaded pointwise band per state/estimator, axes with a
handful of ticks and a zero line. CSV is the canonical output; these
figures are a convenience.
"""

from __future__ import annotations

import numpy as np

__all__ = ["irf_svg", "coverage_svg", "favar_svg"]

PALETTE = ["#000000", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"]
MARGIN = 46
PANEL_W = 300
PANEL_H = 230


def _fmt(x) -> str:
    return f"{float(x):.6g}"


def _finite(*arrays):
    vals = np.concatenate([np.asarray(a, dtype=float).ravel() for a in arrays])
    vals = vals[np.isfinite(vals)]
    return vals


def _limits(vals, pad=0.06):
    if vals.size == 0:
        return -1.0, 1.0
    lo, hi = float(vals.min()), float(vals.max())
    if hi - lo < 1e-12:
        lo, hi = lo - 1.0, hi + 1.0
    span = hi - lo
    return lo - pad * span, hi + pad * span


class _Panel:
    def __init__(self, x0, y0, xlim, ylim, w=PANEL_W, h=PANEL_H):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.xlim, self.ylim = xlim, ylim

    def px(self, x):
        a, b = self.xlim
        return self.x0 + (x - a) / (b - a) * self.w

    def py(self, y):
        a, b = self.ylim
        return self.y0 + self.h - (y - a) / (b - a) * self.h

    def frame(self, title, parts):
        parts.append(
            f'<rect x="{_fmt(self.x0)}" y="{_fmt(self.y0)}" width="{self.w}" '
            f'height="{self.h}" fill="none" stroke="#333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(self.x0 + self.w / 2)}" y="{_fmt(self.y0 - 8)}" '
            f'text-anchor="middle" font-size="12" font-family="sans-serif">'
            f"{title}</text>"
        )
        for tick in np.linspace(self.xlim[0], self.xlim[1], 5):
            x = self.px(tick)
            parts.append(
                f'<line x1="{_fmt(x)}" y1="{_fmt(self.y0 + self.h)}" '
                f'x2="{_fmt(x)}" y2="{_fmt(self.y0 + self.h + 4)}" stroke="#333"/>'
            )
            parts.append(
                f'<text x="{_fmt(x)}" y="{_fmt(self.y0 + self.h + 16)}" '
                f'text-anchor="middle" font-size="10" font-family="sans-serif">'
                f"{_fmt(round(tick, 6))}</text>"
            )
        for tick in np.linspace(self.ylim[0], self.ylim[1], 5):
            y = self.py(tick)
            parts.append(
                f'<line x1="{_fmt(self.x0 - 4)}" y1="{_fmt(y)}" x2="{_fmt(self.x0)}" '
                f'y2="{_fmt(y)}" stroke="#333"/>'
            )
            parts.append(
                f'<text x="{_fmt(self.x0 - 7)}" y="{_fmt(y + 3)}" text-anchor="end" '
                f'font-size="10" font-family="sans-serif">{_fmt(round(tick, 6))}</text>'
            )
        if self.ylim[0] < 0.0 < self.ylim[1]:
            y = self.py(0.0)
            parts.append(
                f'<line x1="{_fmt(self.x0)}" y1="{_fmt(y)}" '
                f'x2="{_fmt(self.x0 + self.w)}" y2="{_fmt(y)}" stroke="#bbb" '
                f'stroke-dasharray="3,3"/>'
            )

    def band(self, x, lo, hi, color, parts):
        mask = np.isfinite(lo) & np.isfinite(hi)
        if not mask.any():
            return
        xs, los, his = x[mask], lo[mask], hi[mask]
        pts = [f"{_fmt(self.px(a))},{_fmt(self.py(b))}" for a, b in zip(xs, his)]
        pts += [f"{_fmt(self.px(a))},{_fmt(self.py(b))}" for a, b in zip(xs[::-1], los[::-1])]
        parts.append(
            f'<polygon points="{" ".join(pts)}" fill="{color}" fill-opacity="0.18" '
            f'stroke="none"/>'
        )

    def line(self, x, y, color, parts, dash=None, width=1.6):
        mask = np.isfinite(y)
        if not mask.any():
            return
        pts = " ".join(
            f"{_fmt(self.px(a))},{_fmt(self.py(b))}" for a, b in zip(x[mask], y[mask])
        )
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{dash_attr}/>'
        )


def _document(parts, width, height):
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">'
        '<rect width="100%" height="100%" fill="white"/>'
    )
    return head + "".join(parts) + "</svg>"


def _legend(entries, x, y, parts):
    for i, (label, color, dash) in enumerate(entries):
        yy = y + 16 * i
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(yy)}" x2="{_fmt(x + 22)}" '
            f'y2="{_fmt(yy)}" stroke="{color}" stroke-width="2"{dash_attr}/>'
        )
        parts.append(
            f'<text x="{_fmt(x + 28)}" y="{_fmt(yy + 4)}" font-size="11" '
            f'font-family="sans-serif">{label}</text>'
        )


def irf_svg(impulse_response, title: str | None = None) -> str:
    """One panel per target coefficient: estimate plus pointwise band."""
    ir = impulse_response
    labels = ir.labels
    n_panels = max(len(labels), 1)
    width = MARGIN * 2 + n_panels * (PANEL_W + MARGIN)
    height = MARGIN * 2 + PANEL_H + 40
    parts: list[str] = []
    hs = np.array(ir.horizons, dtype=float)
    for i, lab in enumerate(labels):
        mid = np.array(
            [est.phi[i] if est is not None else np.nan for est in ir.estimates]
        )
        lo = np.array(
            [est.ci_low[i] if est is not None else np.nan for est in ir.estimates]
        )
        hi = np.array(
            [est.ci_high[i] if est is not None else np.nan for est in ir.estimates]
        )
        ylim = _limits(_finite(mid, lo, hi))
        panel = _Panel(
            MARGIN + i * (PANEL_W + MARGIN), MARGIN, (hs.min(), hs.max()), ylim
        )
        color = PALETTE[i % len(PALETTE)]
        panel.frame(lab, parts)
        panel.band(hs, lo, hi, color, parts)
        panel.line(hs, mid, color, parts)
    if title is None:
        title = f"response of {ir.spec.response} to {ir.spec.shock}"
    parts.append(
        f'<text x="{_fmt(width / 2)}" y="18" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif">{title}</text>'
    )
    return _document(parts, width, height)


def favar_svg(result, series: list[str], title: str | None = None) -> str:
    """One panel per requested series of a FAVAR result."""
    hs = np.array(result.horizons, dtype=float)
    series = [s for s in series if s in result.names] or result.names[:1]
    width = MARGIN * 2 + len(series) * (PANEL_W + MARGIN)
    height = MARGIN * 2 + PANEL_H + 40
    parts: list[str] = []
    for i, name in enumerate(series):
        j = result.names.index(name)
        mid = result.irf[:, j]
        lo = result.band_low[:, j] if result.band_low is not None else np.full_like(mid, np.nan)
        hi = result.band_high[:, j] if result.band_high is not None else np.full_like(mid, np.nan)
        ylim = _limits(_finite(mid, lo, hi))
        panel = _Panel(MARGIN + i * (PANEL_W + MARGIN), MARGIN, (hs.min(), hs.max()), ylim)
        color = PALETTE[(i + 1) % len(PALETTE)]
        panel.frame(name, parts)
        panel.band(hs, lo, hi, color, parts)
        panel.line(hs, mid, color, parts)
    parts.append(
        f'<text x="{_fmt(width / 2)}" y="18" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif">{title or "favar unit-shock responses"}</text>'
    )
    return _document(parts, width, height)


def coverage_svg(report, title: str | None = None) -> str:
    """Coverage and mean width against horizon, one line per estimator."""
    hs = np.array(report.horizons, dtype=float)
    width = MARGIN * 2 + 2 * (PANEL_W + MARGIN)
    height = MARGIN * 2 + PANEL_H + 56
    parts: list[str] = []

    cov_panel = _Panel(MARGIN, MARGIN, (hs.min(), hs.max()), (0.0, 1.02))
    cov_panel.frame("coverage", parts)
    nominal = 1.0 - report.alpha
    y_nom = cov_panel.py(nominal)
    parts.append(
        f'<line x1="{_fmt(cov_panel.x0)}" y1="{_fmt(y_nom)}" '
        f'x2="{_fmt(cov_panel.x0 + cov_panel.w)}" y2="{_fmt(y_nom)}" '
        f'stroke="#888" stroke-dasharray="5,4"/>'
    )
    w_vals = _finite(report.mean_width)
    wid_panel = _Panel(
        2 * MARGIN + PANEL_W + MARGIN, MARGIN, (hs.min(), hs.max()),
        _limits(w_vals) if w_vals.size else (0.0, 1.0),
    )
    wid_panel.frame("mean interval width", parts)

    entries = []
    for e, name in enumerate(report.estimators):
        color = PALETTE[(e + 1) % len(PALETTE)]
        cov_panel.line(hs, np.asarray(report.coverage[e], dtype=float), color, parts)
        wid_panel.line(hs, np.asarray(report.mean_width[e], dtype=float), color, parts)
        entries.append((name, color, None))
    _legend(entries, MARGIN, MARGIN + PANEL_H + 34, parts)
    if title is None:
        title = "pointwise coverage and width by horizon"
    parts.append(
        f'<text x="{_fmt(width / 2)}" y="18" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif">{title}</text>'
    )
    return _document(parts, width, height)
