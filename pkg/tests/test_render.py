import re
import xml.etree.ElementTree as ET

import matplotlib
import pytest

from vaxnet import render

SVG = "{http://www.w3.org/2000/svg}"


def _groups(path):
    root = ET.parse(path).getroot()
    return {g.get("id"): g for g in root.iter(f"{SVG}g") if g.get("id")}, root


def _path_points(g):
    d = g.find(f".//{SVG}path").get("d")
    nums = [float(v) for v in re.findall(r"-?\d+(?:\.\d+)?(?:e-?\d+)?", d)]
    return list(zip(nums[::2], nums[1::2]))


def _style(g):
    return g.find(f".//{SVG}path").get("style")


def _hex(rgba):
    return matplotlib.colors.to_hex(rgba)


def test_schema_error_names_column(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("group,base_url\nAnti,x.com\n")
    with pytest.raises(render.SchemaError, match="'percent'"):
        render.render_top_domains(p, tmp_path / "o.svg")
    q = tmp_path / "j.csv"
    q.write_text("w,0\n0,1\n")
    with pytest.raises(render.SchemaError, match="'window'"):
        render.render_jaccard(q, tmp_path / "o.svg")


def test_lorenz_equal_values_is_diagonal(tmp_path):
    rows = "\n".join(f"{k / 4},{k / 4}" for k in range(5))
    for g in ("anti", "pro"):
        (tmp_path / f"{g}.csv").write_text("population_share,content_share\n" + rows + "\n")
    out = render.render_lorenz({"Anti": tmp_path / "anti.csv", "Pro": tmp_path / "pro.csv"}, tmp_path / "l.svg")
    groups, _ = _groups(out)
    (x0, y0), (x1, y1) = _path_points(groups["diagonal"])[:2]
    for name in ("lorenz-Anti", "lorenz-Pro"):
        pts = _path_points(groups[name])
        assert len(pts) == 5
        for x, y in pts:
            cross = (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0)
            assert abs(cross) / ((x1 - x0) ** 2 + (y1 - y0) ** 2) < 1e-3
    assert render.ANTI_COLOR in _style(groups["lorenz-Anti"])
    assert render.PRO_COLOR in _style(groups["lorenz-Pro"])


def test_jaccard_identity_heatmap(tmp_path):
    n = 4
    lines = ["window," + ",".join(map(str, range(n)))]
    lines += [f"{i}," + ",".join("1" if i == j else "0" for j in range(n)) for i in range(n)]
    (tmp_path / "j.csv").write_text("\n".join(lines) + "\n")
    groups, _ = _groups(render.render_jaccard(tmp_path / "j.csv", tmp_path / "j.svg"))
    cmap = matplotlib.colormaps["viridis"]
    hi, lo = _hex(cmap(1.0)), _hex(cmap(0.0))
    for i in range(n):
        for j in range(n):
            style = _style(groups[f"cell-{i}-{j}"])
            assert (hi if i == j else lo) in style


def test_top_domains_golden(fixtures, tmp_path):
    out = render.render_top_domains(fixtures / "top_domains.csv", tmp_path / "t.svg")
    assert out.read_bytes() == (fixtures / "top_domains_golden.svg").read_bytes()
    again = render.render_top_domains(fixtures / "top_domains.csv", tmp_path / "u.svg")
    assert again.read_bytes() == out.read_bytes()


def test_group_colors(fixtures, tmp_path):
    out = render.render_top_domains(fixtures / "top_domains.csv", tmp_path / "t.svg")
    _, root = _groups(out)
    anti = [g for g in root.iter(f"{SVG}g") if g.get("id") == "bars-anti"]
    pro = [g for g in root.iter(f"{SVG}g") if g.get("id") == "bars-pro"]
    assert anti and pro
    assert all(render.ANTI_COLOR in _style(g) for g in anti)
    assert all(render.PRO_COLOR in _style(g) for g in pro)


def test_no_timestamps_in_svg(fixtures, tmp_path):
    text = render.render_top_domains(fixtures / "top_domains.csv", tmp_path / "t.svg").read_text()
    assert "<dc:date>" not in text and "Matplotlib v" not in text
