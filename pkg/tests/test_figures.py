import pytest

from hauser.figures import render_scatter, render_sweep
from hauser.meta import SweepPoint

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_render_scatter_writes_a_png(tmp_path):
    out = render_scatter(
        [0.1, 0.5, 0.9],
        [1.0, 3.0, 4.5],
        tmp_path / "q.png",
        metric_label="Q",
        title="quality vs humans",
    )
    data = out.read_bytes()
    assert data.startswith(PNG_MAGIC)
    assert len(data) > 1000


def test_render_scatter_validation(tmp_path):
    with pytest.raises(ValueError):
        render_scatter([0.1], [1.0, 2.0], tmp_path / "bad.png")
    with pytest.raises(ValueError):
        render_scatter([], [], tmp_path / "empty.png")


def test_render_sweep_writes_a_png(tmp_path):
    points = [
        SweepPoint(0.01, 10, 0.2, 0.5, False),
        SweepPoint(1.0, 1000, 0.9, 0.001, False),
        SweepPoint(0.1, 100, 0.6, 0.05, False),
    ]
    out = render_sweep(points, tmp_path / "sweep.png", title="corpus size")
    assert out.read_bytes().startswith(PNG_MAGIC)


def test_render_sweep_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        render_sweep([], tmp_path / "none.png")
