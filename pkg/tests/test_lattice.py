import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import latconv
from latconv import examples
from latconv.errors import DimensionMismatchError, ResourceLimitError
from latconv.lattice import LatticeFunction

from conftest import conv_oracle, power_oracle, random_function


def test_delta_is_identity():
    f = examples.intro()
    g = latconv.convolve(latconv.delta((0, 0)), f)
    assert g == f


def test_bernoulli_square():
    b = LatticeFunction.from_dict({(1,): 0.5, (-1,): 0.5})
    sq = latconv.convolve(b, b)
    assert sq.to_dict() == {(-2,): 0.25, (0,): 0.5, (2,): 0.25}
    assert latconv.power(b, 2, method="direct") == sq


def test_intro_selfconvolution_matches_double_sum_oracle():
    f = examples.intro()
    expected = conv_oracle(f.to_dict(), f.to_dict())
    got = latconv.convolve(f, f)
    assert set(got.to_dict()) == set(expected)
    for k, v in expected.items():
        assert abs(got.value_at(k) - v) < 1e-15


def test_power_translation():
    g = latconv.power(latconv.delta((2, -1)), 7, method="direct")
    assert g.to_dict() == {(14, -7): pytest.approx(1.0)}


def test_power_intro_n10_matches_direct_oracle():
    f = examples.intro()
    direct = latconv.power(f, 10, method="direct")
    oracle = power_oracle(f.to_dict(), 10)
    sup_direct = max(abs(v) for v in direct.to_dict().values())
    sup_oracle = max(abs(v) for v in oracle.values())
    assert abs(sup_direct - sup_oracle) < 1e-10
    fast = latconv.power(f, 10, method="fast")
    for k, v in oracle.items():
        assert abs(fast.value_at(k) - v) < 1e-10


def test_norms():
    f = examples.srw(3)
    assert latconv.norm_l1(f) == pytest.approx(1.0)
    d = latconv.delta((4, 5))
    assert latconv.norm_l1(d) == 1.0
    assert latconv.norm_linf(d) == 1.0
    intro = examples.intro()
    expected = sum(abs(v) for v in intro.to_dict().values())
    assert latconv.norm_l1(intro) == pytest.approx(expected, abs=1e-15)


def test_tensor_ex74_table():
    phi = examples.ex74()
    assert phi.value_at((0, 0)) == pytest.approx(19.0 / 128.0)
    assert phi.value_at((1, 1)) == pytest.approx(1.0 / 8.0)
    assert phi.value_at((4, 1)) == pytest.approx(1.0 / 512.0)
    assert phi.value_at((-2, 0)) == pytest.approx(-5.0 / 64.0)


def test_tensor_delta():
    t = latconv.tensor(latconv.delta((0,)), latconv.delta((0,)))
    assert t.to_dict() == {(0, 0): 1.0}


def test_tensor_power_identity():
    phi1, phi2 = examples.ex74_parts()
    lhs = latconv.power(latconv.tensor(phi1, phi2), 3, method="direct")
    rhs = latconv.tensor(latconv.power(phi1, 3, method="direct"),
                         latconv.power(phi2, 3, method="direct"))
    keys = set(lhs.to_dict()) | set(rhs.to_dict())
    for k in keys:
        assert abs(lhs.value_at(k) - rhs.value_at(k)) < 1e-12


def test_translate_identities():
    f = examples.ex73()
    assert latconv.translate(latconv.delta((0, 0)), (3, -2)) == latconv.delta((3, -2))
    assert latconv.translate(f, (0, 0)) == f
    assert latconv.translate(latconv.translate(f, (5, 1)), (-5, -1)) == f
    with pytest.raises(DimensionMismatchError):
        latconv.translate(f, (1, 2, 3))


def test_convolve_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        latconv.convolve(examples.intro(), examples.unstable1d())


def test_power_rejects_n_zero():
    with pytest.raises(ValueError):
        latconv.power(examples.intro(), 0)


def test_memory_cap(monkeypatch):
    from latconv import _config
    monkeypatch.setattr(_config, "MEMORY_CAP_BYTES", 10_000)
    with pytest.raises(ResourceLimitError):
        latconv.power(examples.intro(), 64, method="fast")


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_convolution_commutative_associative(data):
    dim = data.draw(st.integers(1, 2))
    entry = st.tuples(
        st.tuples(*[st.integers(-2, 2)] * dim),
        st.complex_numbers(max_magnitude=2.0, allow_nan=False,
                           allow_infinity=False))
    fd = dict(data.draw(st.lists(entry, min_size=1, max_size=5)))
    gd = dict(data.draw(st.lists(entry, min_size=1, max_size=5)))
    hd = dict(data.draw(st.lists(entry, min_size=1, max_size=5)))
    f = LatticeFunction.from_dict(fd, dim=dim)
    g = LatticeFunction.from_dict(gd, dim=dim)
    h = LatticeFunction.from_dict(hd, dim=dim)
    fg = latconv.convolve(f, g)
    gf = latconv.convolve(g, f)
    for k in set(fg.to_dict()) | set(gf.to_dict()):
        assert abs(fg.value_at(k) - gf.value_at(k)) < 1e-12
    lhs = latconv.convolve(fg, h)
    rhs = latconv.convolve(f, latconv.convolve(g, h))
    for k in set(lhs.to_dict()) | set(rhs.to_dict()):
        assert abs(lhs.value_at(k) - rhs.value_at(k)) < 1e-12


def test_power_paths_agree(rng):
    for _ in range(12):
        dim = int(rng.integers(1, 4))
        n = int(rng.integers(1, 33 if dim < 3 else 17))
        f = random_function(rng, dim, radius=2 if dim < 3 else 1)
        direct = latconv.power(f, n, method="direct")
        fast = latconv.power(f, n, method="fast")
        spectral = latconv.power(f, n, method="spectral")
        keys = (set(direct.to_dict()) | set(fast.to_dict())
                | set(spectral.to_dict()))
        for k in keys:
            v = direct.value_at(k)
            assert abs(fast.value_at(k) - v) < 1e-10
            assert abs(spectral.value_at(k) - v) < 1e-10


def test_support_in_minkowski_sum(rng):
    for _ in range(6):
        f = random_function(rng, 2, max_points=5, radius=2)
        n = int(rng.integers(2, 7))
        g = latconv.power(f, n, method="direct")
        base = set(map(tuple, f.points.tolist()))
        allowed = {(0, 0)}
        for _ in range(n):
            allowed = {(a[0] + b[0], a[1] + b[1]) for a in allowed for b in base}
        assert set(map(tuple, g.points.tolist())) <= allowed


def test_l1_submultiplicative(rng):
    for _ in range(8):
        f = random_function(rng, 2, normalized=False)
        g = random_function(rng, 2, normalized=False)
        prod = latconv.norm_l1(latconv.convolve(f, g))
        assert prod <= latconv.norm_l1(f) * latconv.norm_l1(g) + 1e-12


def test_file_roundtrip(tmp_path):
    f = examples.intro()
    path = tmp_path / "intro.fn"
    latconv.write_function(f, path)
    g = latconv.read_function(path)
    assert g == f
    text = path.read_text()
    assert text.splitlines()[0] == "dim 2"


def test_file_format_errors(tmp_path):
    bad = tmp_path / "bad.fn"
    bad.write_text("dim 2\n1 2 3\n")
    with pytest.raises(ValueError, match="bad.fn:2"):
        latconv.read_function(bad)
    bad.write_text("nodim\n")
    with pytest.raises(ValueError, match="dim"):
        latconv.read_function(bad)


def test_file_comments_and_order(tmp_path):
    path = tmp_path / "f.fn"
    path.write_text("# comment\ndim 1\n2 1.5 0\n-1 0.25 -0.5\n")
    f = latconv.read_function(path)
    assert f.to_dict() == {(2,): 1.5, (-1,): 0.25 - 0.5j}
    out = tmp_path / "g.fn"
    latconv.write_function(f, out)
    lines = out.read_text().splitlines()
    assert lines[1].startswith("-1 ")


def test_canonical_form_drops_zeros():
    f = LatticeFunction.from_dict({(0,): 1.0, (1,): 0.0})
    assert len(f) == 1
    g = LatticeFunction(1, np.array([[0], [0]]), np.array([1.0, -1.0]))
    assert len(g) == 0
