import xml.etree.ElementTree as ET

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from newell.svg import Curve, line_plot, nice_ticks, region_bands


@given(st.floats(-1e3, 1e3), st.floats(1e-3, 1e3))
def test_ticks_inside_range(lo, width):
    ticks = nice_ticks(lo, lo + width)
    assert 2 <= len(ticks) <= 12
    assert all(lo - 1e-9 * (1 + abs(lo)) <= t <= lo + width + 1e-9 * (1 + abs(lo) + width) for t in ticks)


def test_region_bands_merge_runs():
    x = np.arange(6.0)
    bands = region_bands(x, ["II", "II", "III", "III", "III", "II"], {"II": "green"})
    assert [b.label for b in bands] == ["II", "III", "II"]
    assert bands[0].x0 == 0 and bands[0].x1 == 1.5 and bands[-1].x1 == 5
    assert bands[1].color == "#999999"


def test_plot_is_well_formed_and_breaks_on_nan():
    x = np.linspace(0, 1, 11)
    y = np.sin(x)
    y[5] = np.nan
    svg = line_plot([Curve("a <b>", x, y)], region_bands(x, ["I"] * 11, {}), title="t & u", note="hello")
    root = ET.fromstring(svg)
    polylines = [e for e in root.iter() if e.tag.endswith("polyline")]
    assert len(polylines) == 2
    assert "hello" in svg


def test_empty_plot():
    ET.fromstring(line_plot([], [], title="empty", note="nothing"))
