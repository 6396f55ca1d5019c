import pytest

from qteich import catalog
from qteich.surface import is_lambda_simple, topology, validate_curve
from qteich.trace import is_boundary_parallel


def test_names_are_stable():
    assert catalog.names() == ["torus-1p", "torus-hole-1", "torus-hole-2", "sphere-4p",
                               "sphere-1h3p", "sphere-2h2p", "sphere-3h1p", "sphere-4h"]


def test_unknown_name():
    with pytest.raises(catalog.UnknownName):
        catalog.get("klein-bottle")
    with pytest.raises(KeyError):
        catalog.get("torus-1p").curve("zeta")


@pytest.mark.parametrize("name", catalog.names())
def test_curves_valid_and_named(name):
    cfg = catalog.get(name)
    for key, curve in cfg.curves.items():
        validate_curve(curve, cfg.tri)
        assert curve.name == key and curve.closed


@pytest.mark.parametrize("name", [n for n in catalog.names() if n.startswith("sphere")])
def test_sphere_variants(name):
    cfg = catalog.get(name)
    top = topology(cfg.tri)
    assert top.genus == 0 and top.interior_punctures + top.holes == 4
    for key in ("alpha", "beta", "slope-plus"):
        assert is_lambda_simple(cfg.curve(key), cfg.tri)
    for g in cfg.skein["gammas"]:
        assert is_boundary_parallel(cfg.curve(g), cfg.tri)
    # each peripheral curve appears in exactly one pair
    assert sorted(cfg.skein["gammas"]) == ["gamma-1", "gamma-2", "gamma-3", "gamma-4"]


def test_skein_configurations():
    with_skein = [n for n in catalog.names() if catalog.get(n).skein]
    assert "torus-1p" not in with_skein
    assert {"torus-hole-1", "torus-hole-2"} <= set(with_skein)


def test_simple_curve_names():
    cfg = catalog.get("torus-hole-1")
    names = catalog.simple_curve_names(cfg)
    assert "alpha" in names and "beta-alpha" not in names
