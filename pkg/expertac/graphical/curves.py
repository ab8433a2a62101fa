# -*- coding: utf-8 -*-
r"""
Learning curves as standalone SVG charts.

Data points ``(env_steps, reward)`` are converted to graphical coordinates by
an :class:`AffineTransformation` and drawn with matplotlib on an axes whose
own coordinates are the graphical ones, so the vertices written to the SVG
file are the transformed data points.

EXAMPLES::

    >>> from expertac.graphical.curves import AffineTransformation
    >>> T = AffineTransformation.fit((0.0, 0.0, 10.0, 1.0), (0.0, 0.0, 100.0, 50.0))
    >>> T((10.0, 1.0)), T((0.0, 0.0))
    ((100.0, 0.0), (0.0, 50.0))
    >>> (~T)((50.0, 25.0))
    (5.0, 0.5)
"""
######################################################################
#  This file is part of expertac.
#
#        Copyright (C) 2026 The expertac developers
#
#  expertac is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 2 of the License, or
#  (at your option) any later version.
#
#  expertac is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with expertac. If not, see <https://www.gnu.org/licenses/>.
######################################################################
import csv
import logging
import os

import numpy as np

logger = logging.getLogger(__name__)

WIDTH = 640
HEIGHT = 400

# left, top, right, bottom edge of the plotting area in graphical coordinates
PLOT_AREA = (70.0, 40.0, 620.0, 350.0)

SMOOTHING_WINDOW = 10

SVG_RC = {'svg.hashsalt': 'expertac', 'svg.fonttype': 'none', 'path.simplify': False}


class AffineTransformation:
    r"""
    The map ``(x, y) -> (a x + b, c y + d)``.
    """
    def __init__(self, a=1.0, b=0.0, c=1.0, d=0.0):
        if a == 0 or c == 0:
            raise ValueError("an affine transformation needs non-zero scales, got {} and {}".format(a, c))
        self._a = float(a)
        self._b = float(b)
        self._c = float(c)
        self._d = float(d)

    @staticmethod
    def fit(box, area):
        r"""
        Return the transformation mapping the data ``box = (x1, y1, x2, y2)``
        onto the graphical ``area = (left, top, right, bottom)``, with ``y1``
        at the bottom.

        Degenerate extents of ``box`` are widened by ``0.5`` on each side.
        """
        x1, y1, x2, y2 = (float(t) for t in box)
        if x2 < x1 or y2 < y1:
            raise ValueError("invalid box {!r}".format(box))
        if x1 == x2:
            x1, x2 = x1 - 0.5, x2 + 0.5
        if y1 == y2:
            y1, y2 = y1 - 0.5, y2 + 0.5
        left, top, right, bottom = (float(t) for t in area)
        a = (right - left) / (x2 - x1)
        c = -(bottom - top) / (y2 - y1)
        return AffineTransformation(a, left - a * x1, c, bottom - c * y1)

    def coefficients(self):
        return self._a, self._b, self._c, self._d

    def __call__(self, point):
        x, y = point
        return (self._a * x + self._b, self._c * y + self._d)

    def apply(self, xs, ys):
        r"""
        Return the transformed coordinate arrays of the points ``zip(xs, ys)``.
        """
        return (self._a * np.asarray(xs, dtype=np.float64) + self._b,
                self._c * np.asarray(ys, dtype=np.float64) + self._d)

    def __invert__(self):
        return AffineTransformation(1.0 / self._a, -self._b / self._a, 1.0 / self._c, -self._d / self._c)

    def __eq__(self, other):
        return isinstance(other, AffineTransformation) and self.coefficients() == other.coefficients()

    def __ne__(self, other):
        return not (self == other)

    __hash__ = None

    def __repr__(self):
        return "AffineTransformation(x -> {}*x + {}, y -> {}*y + {})".format(self._a, self._b, self._c, self._d)


def read_metrics(path, column='reward_mean'):
    r"""
    Return the arrays ``(env_steps, values)`` of ``column`` in the metrics
    file ``path``.

    EXAMPLES::

        >>> import os, tempfile
        >>> from expertac.graphical.curves import read_metrics
        >>> path = os.path.join(tempfile.mkdtemp(), 'metrics.csv')
        >>> with open(path, 'w') as f:
        ...     _ = f.write("update,env_steps,reward_mean\n1,20,0.0\n2,40,0.5\n")
        >>> steps, values = read_metrics(path)
        >>> steps.tolist(), values.tolist()
        ([20.0, 40.0], [0.0, 0.5])
    """
    with open(path, newline='') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise ValueError("malformed metrics file {}: no header".format(path))
        for name in ('env_steps', column):
            if name not in header:
                raise ValueError("malformed metrics file {}: no column {!r}".format(path, name))
        i = header.index('env_steps')
        j = header.index(column)
        steps = []
        values = []
        for lineno, row in enumerate(reader):
            if len(row) != len(header):
                raise ValueError("malformed metrics file {}: row {} has {} fields, expected {}".format(
                    path, lineno + 2, len(row), len(header)))
            try:
                steps.append(float(row[i]))
                values.append(float(row[j]))
            except ValueError:
                raise ValueError("malformed metrics file {}: non-numeric value in row {}".format(path, lineno + 2))
    return np.array(steps, dtype=np.float64), np.array(values, dtype=np.float64)


def moving_average(values, window):
    r"""
    Return the trailing mean of ``values`` over ``window`` entries; the first
    entries average over what is available.

    EXAMPLES::

        >>> from expertac.graphical.curves import moving_average
        >>> moving_average([1.0, 3.0, 5.0, 7.0], 2).tolist()
        [1.0, 2.0, 4.0, 6.0]
    """
    if window < 1:
        raise ValueError("window must be at least 1, got {}".format(window))
    values = np.asarray(values, dtype=np.float64)
    if not len(values):
        return values
    cumulative = np.concatenate([[0.0], np.cumsum(values)])
    ends = np.arange(1, len(values) + 1)
    starts = np.maximum(0, ends - window)
    return (cumulative[ends] - cumulative[starts]) / (ends - starts)


def combine_seeds(curves):
    r"""
    Return ``(steps, mean, low, high)`` over the per-seed curves ``curves``, a
    list of ``(steps, values)``; longer curves are cut to the shortest one.

    EXAMPLES::

        >>> from expertac.graphical.curves import combine_seeds
        >>> steps, mean, low, high = combine_seeds([([1, 2], [0.0, 1.0]), ([1, 2, 3], [1.0, 0.0, 4.0])])
        >>> steps.tolist(), mean.tolist(), low.tolist(), high.tolist()
        ([1.0, 2.0], [0.5, 0.5], [0.0, 0.0], [1.0, 1.0])
    """
    if not curves:
        raise ValueError("no curves to combine")
    n = min(len(s) for s, _ in curves)
    steps = np.asarray(curves[0][0], dtype=np.float64)[:n]
    for s, _ in curves[1:]:
        if not np.array_equal(np.asarray(s, dtype=np.float64)[:n], steps):
            raise ValueError("curves of one value are recorded at different env steps")
    values = np.array([np.asarray(v, dtype=np.float64)[:n] for _, v in curves])
    return steps, values.mean(axis=0), values.min(axis=0), values.max(axis=0)


class GraphicalSeries:
    r"""
    One learning curve with an optional min-max band, in data and graphical
    coordinates.

    EXAMPLES::

        >>> from expertac.graphical.curves import GraphicalSeries, AffineTransformation
        >>> s = GraphicalSeries('critic', [0, 10], [0.0, 1.0])
        >>> s
        GraphicalSeries critic with vertices [(0.0, 0.0), (10.0, 1.0)]
        >>> s.set_transformation(AffineTransformation(2.0, 1.0, -1.0, 5.0))
        >>> s.bounding_box()
        (1.0, 4.0, 21.0, 5.0)
    """
    def __init__(self, label, steps, values, low=None, high=None, transformation=None):
        self._label = str(label)
        self._steps = np.asarray(steps, dtype=np.float64)
        self._values = np.asarray(values, dtype=np.float64)
        if self._steps.shape != self._values.shape or self._steps.ndim != 1:
            raise ValueError("{} steps for {} values".format(self._steps.shape, self._values.shape))
        if (low is None) != (high is None):
            raise ValueError("a band needs both its low and high edge")
        self._low = None if low is None else np.asarray(low, dtype=np.float64)
        self._high = None if high is None else np.asarray(high, dtype=np.float64)
        self.set_transformation(transformation)

    @staticmethod
    def from_seeds(label, curves):
        steps, mean, low, high = combine_seeds(curves)
        return GraphicalSeries(label, steps, mean, low, high)

    def copy(self):
        return GraphicalSeries(self._label, self._steps, self._values, self._low, self._high, self._transformation)

    def smoothed(self, window=SMOOTHING_WINDOW):
        r"""
        Return this series with the curve and the band averaged over a
        trailing window of updates.
        """
        low = None if self._low is None else moving_average(self._low, window)
        high = None if self._high is None else moving_average(self._high, window)
        return GraphicalSeries(self._label, self._steps, moving_average(self._values, window), low, high,
                               self._transformation)

    @property
    def label(self):
        return self._label

    def __len__(self):
        return len(self._steps)

    def __repr__(self):
        return "GraphicalSeries {} with vertices {}".format(self._label, self.vertices())

    def data_box(self):
        r"""
        Return ``(x1, y1, x2, y2)`` of the data points and the band, or
        ``None`` for an empty series.
        """
        if not len(self):
            return None
        ys = [self._values] + ([self._low, self._high] if self._low is not None else [])
        return (float(self._steps.min()), float(min(y.min() for y in ys)),
                float(self._steps.max()), float(max(y.max() for y in ys)))

    def transformation(self):
        r"""
        Return the transformation from data to graphical coordinates.
        """
        return self._transformation

    def set_transformation(self, transformation=None):
        if transformation is None:
            transformation = AffineTransformation()
        self._transformation = transformation
        self._xs, self._ys = transformation.apply(self._steps, self._values)

    def vertices(self):
        r"""
        Return the vertices of the curve in graphical coordinates.
        """
        return [(float(x), float(y)) for x, y in zip(self._xs, self._ys)]

    def band(self):
        r"""
        Return ``(xs, low, high)`` of the band in graphical coordinates or
        ``None``.
        """
        if self._low is None:
            return None
        xs, low = self._transformation.apply(self._steps, self._low)
        _, high = self._transformation.apply(self._steps, self._high)
        return xs, low, high

    def xmin(self):
        return float(self._xs.min())

    def ymin(self):
        return float(self._ys.min())

    def xmax(self):
        return float(self._xs.max())

    def ymax(self):
        return float(self._ys.max())

    def bounding_box(self):
        r"""
        Return ``(x1, y1, x2, y2)`` of the vertices in graphical coordinates.
        """
        return self.xmin(), self.ymin(), self.xmax(), self.ymax()

    def plot(self, ax, color, gid):
        r"""
        Draw the band and the curve on ``ax``, whose coordinates are graphical.
        """
        band = self.band()
        if band is not None and len(self) > 1:
            xs, low, high = band
            ax.fill_between(xs, low, high, color=color, alpha=0.2, linewidth=0, gid=gid + '-band')
        line, = ax.plot(self._xs, self._ys, color=color, linewidth=1.5, label=self._label,
                        marker='o' if len(self) == 1 else None, snap=False)
        line.set_gid(gid)
        return line


def chart_transformation(series):
    r"""
    Return the transformation mapping the data of all ``series`` onto
    :data:`PLOT_AREA`.
    """
    boxes = [s.data_box() for s in series if len(s)]
    if not boxes:
        return AffineTransformation.fit((0.0, 0.0, 1.0, 1.0), PLOT_AREA)
    return AffineTransformation.fit((min(b[0] for b in boxes), min(b[1] for b in boxes),
                                     max(b[2] for b in boxes), max(b[3] for b in boxes)), PLOT_AREA)


def _draw_frame(ax, transformation, xlabel, ylabel, title):
    from matplotlib.collections import LineCollection
    from matplotlib.ticker import MaxNLocator

    left, top, right, bottom = PLOT_AREA
    frame, = ax.plot([left, right, right, left, left], [bottom, bottom, top, top, bottom],
                     color='black', linewidth=0.8, snap=False)
    frame.set_gid('frame')

    inverse = ~transformation
    x1, y1 = inverse((left, bottom))
    x2, y2 = inverse((right, top))
    segments = []
    for x in MaxNLocator(5).tick_values(x1, x2):
        gx, _ = transformation((x, y1))
        if left - 1e-9 <= gx <= right + 1e-9:
            segments.append([(gx, bottom), (gx, bottom + 5)])
            ax.text(gx, bottom + 18, '{:g}'.format(x), ha='center', va='center', fontsize=9)
    for y in MaxNLocator(5).tick_values(y1, y2):
        _, gy = transformation((x1, y))
        if top - 1e-9 <= gy <= bottom + 1e-9:
            segments.append([(left - 5, gy), (left, gy)])
            ax.text(left - 8, gy, '{:g}'.format(y), ha='right', va='center', fontsize=9)
    ticks = LineCollection(segments, colors='black', linewidths=0.8)
    ticks.set_gid('ticks')
    ax.add_collection(ticks)

    ax.text((left + right) / 2, HEIGHT - 12, xlabel, ha='center', va='center', fontsize=10)
    ax.text(16, (top + bottom) / 2, ylabel, ha='center', va='center', rotation=90, fontsize=10)
    ax.text((left + right) / 2, top / 2, title, ha='center', va='center', fontsize=12)


def render_chart(series, path, title='', legend_title=None, xlabel='env steps', ylabel='mean episode reward'):
    r"""
    Write the chart of ``series`` (a list of :class:`GraphicalSeries`) to the
    SVG file ``path`` and return the transformation used.

    Equal input gives byte-identical files. An empty list gives the axes and
    an empty legend.
    """
    import matplotlib
    from matplotlib.figure import Figure

    transformation = chart_transformation(series)
    with matplotlib.rc_context(SVG_RC):
        fig = Figure(figsize=(WIDTH / 72.0, HEIGHT / 72.0), dpi=72)
        ax = fig.add_axes([0.0, 0.0, 1.0, 1.0])
        ax.set_xlim(0, WIDTH)
        ax.set_ylim(HEIGHT, 0)
        ax.set_axis_off()
        _draw_frame(ax, transformation, xlabel, ylabel, title)

        colors = matplotlib.colormaps['tab10']
        handles = []
        for i, s in enumerate(series):
            s = s.copy()
            s.set_transformation(transformation)
            if len(s):
                handles.append(s.plot(ax, colors(i % 10), 'series-{}'.format(i)))
        ax.legend(handles=handles, labels=[h.get_label() for h in handles], title=legend_title,
                  loc='lower right', bbox_to_anchor=(PLOT_AREA[2] / WIDTH, 1.0 - PLOT_AREA[3] / HEIGHT),
                  fontsize=9, frameon=True)
        if not handles:
            left, top, right, bottom = PLOT_AREA
            ax.text((left + right) / 2, (top + bottom) / 2, 'no data', ha='center', va='center',
                    fontsize=10, color='gray')

        tmp = path + '.tmp'
        fig.savefig(tmp, format='svg', metadata={'Date': None})
    os.replace(tmp, path)
    logger.debug("wrote %s with %d series", path, len(series))
    return transformation


def _value_key(text):
    try:
        return (0, float(text), text)
    except ValueError:
        return (1, 0.0, text)


def sweep_curves(sweep_dir, column='reward_mean'):
    r"""
    Return ``{axis: [(value, [(steps, values), ...]), ...]}`` for the cell
    directories ``<axis>=<value>/seed=<seed>/metrics.csv`` below
    ``sweep_dir``; values are in numeric order when they are numbers, seeds
    in numeric order.
    """
    curves = {}
    for name in sorted(os.listdir(sweep_dir)):
        cell = os.path.join(sweep_dir, name)
        if '=' not in name or not os.path.isdir(cell):
            continue
        axis, _, value = name.partition('=')
        runs = []
        seeds = [d for d in os.listdir(cell) if d.startswith('seed=')]
        for seed in sorted(seeds, key=lambda d: int(d.partition('=')[2])):
            metrics = os.path.join(cell, seed, 'metrics.csv')
            if os.path.exists(metrics):
                runs.append(read_metrics(metrics, column))
        if runs:
            curves.setdefault(axis, []).append((value, runs))
    for axis in curves:
        curves[axis].sort(key=lambda item: _value_key(item[0]))
    return curves


def emit_plots(sources, out_dir, column='reward_mean', window=SMOOTHING_WINDOW):
    r"""
    Write the learning-curve charts of ``sources`` into ``out_dir`` and return
    the paths written.

    ``sources`` is either a sweep directory, giving one chart per sweep axis,
    or a list of ``metrics.csv`` paths, giving one chart ``metrics.svg`` with
    one curve per file. Every chart comes in a raw and a ``_smoothed``
    variant averaged over ``window`` updates. Curves of one sweep value are
    the mean across seeds, shaded by the min-max band.

    EXAMPLES::

        >>> import os, tempfile
        >>> from expertac.graphical.curves import emit_plots
        >>> out = tempfile.mkdtemp()
        >>> [os.path.basename(p) for p in emit_plots([], out)]
        ['metrics.svg', 'metrics_smoothed.svg']
    """
    os.makedirs(out_dir, exist_ok=True)
    if isinstance(sources, (str, os.PathLike)) and os.path.isdir(sources):
        charts = []
        for axis, values in sorted(sweep_curves(sources, column).items()):
            series = [GraphicalSeries.from_seeds(value, runs) for value, runs in values]
            charts.append((axis, series, axis))
    else:
        if isinstance(sources, (str, os.PathLike)):
            sources = [sources]
        series = []
        for path in sources:
            steps, values = read_metrics(path, column)
            series.append(GraphicalSeries(os.path.basename(os.path.dirname(os.path.abspath(path))), steps, values))
        charts = [('metrics', series, None)]

    written = []
    for name, series, legend_title in charts:
        raw = os.path.join(out_dir, '{}.svg'.format(name))
        render_chart(series, raw, title=name, legend_title=legend_title)
        smoothed = os.path.join(out_dir, '{}_smoothed.svg'.format(name))
        render_chart([s.smoothed(window) for s in series], smoothed,
                     title='{} ({} update average)'.format(name, window), legend_title=legend_title)
        written.extend([raw, smoothed])
    logger.info("wrote %d charts to %s", len(written), out_dir)
    return written
