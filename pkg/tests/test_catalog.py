import pytest

from sneakernet.catalog import CatalogError, default_catalog, load_catalog, parse_catalog

HEADER = "name,pitch_m,gate_time_s,error_rate\n"


def test_default_has_six_platforms():
    names = [p.name for p in default_catalog()]
    assert names == ["NV- (optical)", "trapped ions", "transmons", "quantum dots", "NV-", "silicon"]


def test_comments_and_blank_lines():
    text = "# bundled\n" + HEADER + "\n# one\nx,1e-3,1e-6,1e-3\n"
    plats = parse_catalog(text)
    assert len(plats) == 1 and plats[0].pitch == 1e-3


@pytest.mark.parametrize("text,where", [
    ("", "empty"),
    ("a,b,c,d\n", ":1:"),
    (HEADER, "no platforms"),
    (HEADER + "x,1e-3,1e-6\n", ":2:"),
    (HEADER + "x,abc,1e-6,1e-3\n", ":2:"),
    (HEADER + "ok,1e-3,1e-6,1e-3\nx,1e-3,-1,1e-3\n", ":3:"),
])
def test_malformed_catalog_line_numbers(text, where):
    with pytest.raises(CatalogError, match=where):
        parse_catalog(text, "cat.csv")


def test_load_from_path(tmp_path):
    path = tmp_path / "cat.csv"
    path.write_text(HEADER + "y,1e-3,1e-6,1e-4\n")
    assert load_catalog(path)[0].name == "y"
    with pytest.raises(CatalogError):
        load_catalog(tmp_path / "missing.csv")
