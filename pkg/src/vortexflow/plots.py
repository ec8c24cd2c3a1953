"""Minimal SVG output: polylines on simple axes."""
import numpy as np

SIZE = 400
PAD = 40
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]


def _polyline(xs, ys, color):
    pts = " ".join("%.2f,%.2f" % (x, y) for x, y in zip(xs, ys))
    return '<polyline fill="none" stroke="%s" stroke-width="1.5" points="%s"/>' % (color, pts)


def _doc(body, title):
    return ('<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d">\n'
            '<rect width="100%%" height="100%%" fill="white"/>\n'
            '<text x="%d" y="20" font-size="14">%s</text>\n%s\n</svg>\n'
            % (SIZE, SIZE, PAD, title, "\n".join(body)))


def sphere_paths_svg(paths, title="vortex paths (view from the south pole)"):
    """Orthographic projection onto the (x1, x2) plane of paths on S^2.

    ``paths`` is a list of ``(points, degree)`` with points of shape (k, 3).
    Positive vortices are drawn in blue, negative in red.
    """
    c, R = SIZE / 2, SIZE / 2 - PAD
    body = ['<circle cx="%g" cy="%g" r="%g" fill="none" stroke="black"/>' % (c, c, R)]
    for pts, deg in paths:
        pts = np.asarray(pts)
        if len(pts) == 0:
            continue
        xs, ys = c + R * pts[:, 0], c - R * pts[:, 1]
        color = COLORS[0] if deg > 0 else COLORS[1]
        body.append(_polyline(xs, ys, color))
        body.append('<circle cx="%.2f" cy="%.2f" r="3" fill="%s"/>' % (xs[0], ys[0], color))
    return _doc(body, title)


def curves_svg(t, series, title="energy"):
    """Line plot of several named series against ``t`` with a shared y range."""
    t = np.asarray(t, dtype=float)
    ys = [np.asarray(v, dtype=float) for v in series.values()]
    if len(t) == 0:
        return _doc([], title)
    lo = min(float(np.min(y)) for y in ys)
    hi = max(float(np.max(y)) for y in ys)
    span = hi - lo or 1.0
    t0, t1 = float(t[0]), float(t[-1])
    tspan = t1 - t0 or 1.0
    W = SIZE - 2 * PAD
    X = PAD + W * (t - t0) / tspan
    body = ['<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="black"/>'
            % (PAD, SIZE - PAD, SIZE - PAD, SIZE - PAD),
            '<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="black"/>'
            % (PAD, PAD, PAD, SIZE - PAD),
            '<text x="%d" y="%d" font-size="10">%.4g</text>' % (2, SIZE - PAD, lo),
            '<text x="%d" y="%d" font-size="10">%.4g</text>' % (2, PAD, hi),
            '<text x="%d" y="%d" font-size="10">t=%.4g</text>' % (SIZE - PAD - 30, SIZE - PAD + 15, t1)]
    for k, (name, y) in enumerate(zip(series, ys)):
        color = COLORS[k % len(COLORS)]
        body.append(_polyline(X, SIZE - PAD - W * (y - lo) / span, color))
        body.append('<text x="%d" y="%d" font-size="11" fill="%s">%s</text>'
                    % (SIZE - PAD - 40, PAD + 14 * k, color, name))
    return _doc(body, title)
