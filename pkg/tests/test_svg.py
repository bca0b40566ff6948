import xml.etree.ElementTree as ET

import numpy as np
import pytest

from pwtransfer.svg import colormap, heatmap, line_plot

NS = "{http://www.w3.org/2000/svg}"


def test_colormap_endpoints_and_clipping():
    c = colormap([-1.0, 0.0, 1.0, 2.0])
    assert c[0] == c[1] == "#440154"
    assert c[2] == c[3] == "#fde725"
    assert all(len(h) == 7 and h.startswith("#") for h in colormap(np.linspace(0, 1, 17)))


def test_heatmap_is_wellformed_and_deterministic():
    x = np.linspace(-0.5, 0.5, 7)
    t = np.linspace(0, 1, 4)
    z = np.outer(t, x ** 2)
    s = heatmap(z, x, t, title="a < b", comment="hash 123")
    assert s == heatmap(z, x, t, title="a < b", comment="hash 123")
    root = ET.fromstring(s.encode())
    cells = root.findall(f"{NS}g/{NS}rect")
    assert len(cells) == z.size
    assert "hash 123" in s
    with pytest.raises(ValueError):
        heatmap(z.T, x, t)


def test_line_plot_breaks_at_nan():
    x = np.linspace(0, 1, 9)
    y = np.sin(x)
    y[4] = np.nan
    root = ET.fromstring(line_plot(x, [("sin", y), ("cos", np.cos(x))]).encode())
    lines = root.findall(f"{NS}polyline")
    assert len(lines) == 3
    assert [len(p.get("points").split()) for p in lines] == [4, 4, 9]
