import xml.etree.ElementTree as ET

import numpy as np
import pytest

from irksn.exceptions import ParameterError
from irksn.svg import FigureKind, FigureSpec, render_svg, write_svg

NS = "{http://www.w3.org/2000/svg}"


def fig(**over):
    kw = dict(kind="error_vs_iter", series={"a": ([1, 2, 3], [3.0, 2.0, 1.0]),
                                            "b": ([1, 2], [1.0, 0.0])},
              xlabel="t", ylabel="err", filename="f.svg", title="T & more")
    kw.update(over)
    return FigureSpec(**kw)


class TestFigureSpec:
    def test_kind_coerced(self):
        assert fig().kind is FigureKind.ERROR_VS_ITER

    def test_empty_series(self):
        with pytest.raises(ParameterError):
            fig(series={})

    def test_not_increasing(self):
        with pytest.raises(ParameterError, match="strictly increasing"):
            fig(series={"a": ([1, 1, 2], [0, 0, 0])})

    def test_shape_mismatch(self):
        with pytest.raises(ParameterError):
            fig(series={"a": ([1, 2], [0, 0, 0])})

    def test_band_checks(self):
        with pytest.raises(ParameterError, match="no matching"):
            fig(bands={"z": ([0], [1])})
        with pytest.raises(ParameterError, match="does not match"):
            fig(bands={"a": ([0, 0], [1, 1])})

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            fig(kind="pie")


class TestRender:
    def test_valid_xml(self):
        root = ET.fromstring(render_svg(fig(bands={"a": ([2, 1, 0], [4, 3, 2])})))
        assert root.tag == NS + "svg"
        assert len(root.findall(NS + "polyline")) == 2
        assert len(root.findall(NS + "polygon")) == 1
        texts = [t.text for t in root.iter(NS + "text")]
        assert "T & more" in texts and "a" in texts and "b" in texts

    def test_log_axes_and_nonfinite(self):
        f = fig(series={"a": ([1, 10, 100], [1.0, 0.0, np.nan])}, log_x=True, log_y=True)
        ET.fromstring(render_svg(f))

    def test_constant_series(self):
        ET.fromstring(render_svg(fig(series={"a": ([1], [2.0])})))

    def test_write(self, tmp_path):
        path = write_svg(fig(filename="x/y.svg"), tmp_path)
        assert path.exists() and path.read_text().startswith("<svg")
