import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_trigpoly
from fejer_torus.funcspace import (
    AliasingError,
    CylinderGrid,
    QuadratureError,
    SpikeTensor,
    TrigPoly,
    evaluate,
    function_from_spec,
    function_to_spec,
    lemma_check,
    marginalize,
    orlicz_functional,
    read_grid,
    write_grid,
)
from fejer_torus.index_core import MultiIndex


class TestEvaluate:
    def test_character_and_constant(self):
        assert evaluate(TrigPoly.character([1]), [0.0]) == 1
        assert evaluate(TrigPoly.constant(2 - 1j), [0.3, 0.9, 0.1]) == 2 - 1j
        assert evaluate(TrigPoly.character([0, 1]), [0.0, 0.25]) == pytest.approx(1j)

    def test_spikes(self):
        f = SpikeTensor({1: 0.1, 2: 0.1})
        assert evaluate(f, [0.05, 0.05]) == pytest.approx(100.0)
        assert evaluate(f, [0.5, 0.05]) == 0

    def test_vectorized(self, rng):
        f = random_trigpoly(rng, 3, 4)
        pts = rng.random((7, 3))
        many = evaluate(f, pts)
        assert many.shape == (7,)
        assert all(evaluate(f, p) == pytest.approx(v) for p, v in zip(pts, many))

    def test_missing_coordinate(self):
        with pytest.raises(ValueError):
            evaluate(TrigPoly.character([0, 0, 1]), [0.1, 0.2])
        with pytest.raises(ValueError):
            evaluate(SpikeTensor({4: 0.5}), [0.1])

    def test_grid_nearest_node(self):
        g = CylinderGrid(np.arange(8.0).reshape(4, 2))
        assert evaluate(g, [0.26, 0.49]) == 3.0  # node (1, 1)
        assert evaluate(g, [0.9, 0.1]) == 0.0  # wraps to node (0, 0)

    def test_grid_samples_trigpoly(self, rng):
        f = random_trigpoly(rng, 2, 3)
        g = CylinderGrid.from_function(f, (8, 16))
        nodes = np.array([[i / 8, j / 16] for i in range(8) for j in range(16)])
        assert np.abs(g.samples.ravel() - evaluate(f, nodes)).max() < 1e-12

    def test_grid_aliasing(self):
        with pytest.raises(AliasingError):
            CylinderGrid.from_function(TrigPoly.character([4]), (8,))


class TestMarginalize:
    def test_examples(self):
        assert marginalize(TrigPoly.character([1, 1]), 1) == TrigPoly({})
        f = TrigPoly({MultiIndex(): 1, MultiIndex.from_dense([1]): 1})
        assert marginalize(f, 1) == f
        assert marginalize(SpikeTensor({1: 0.1, 2: 0.1}), 1) == SpikeTensor({1: 0.1})

    def test_spike_tail_integral_is_one(self):
        # the dropped factor integrates to 1: check on a fine grid
        g = CylinderGrid.from_function(SpikeTensor({1: 0.25, 2: 0.125}), (16, 64))
        direct = marginalize(g, 1).samples
        closed = CylinderGrid.from_function(SpikeTensor({1: 0.25}), (16,)).samples
        assert np.abs(direct - closed).max() < 1e-12

    @given(st.integers(0, 2**32 - 1), st.integers(0, 4), st.integers(0, 4))
    def test_tower(self, seed, m, k):
        rng = np.random.default_rng(seed)
        f = random_trigpoly(rng, 4, 3)
        assert marginalize(marginalize(f, m), k) == marginalize(f, min(m, k))
        s = SpikeTensor({j: float(rng.uniform(0.05, 1)) for j in range(1, 5)})
        assert marginalize(marginalize(s, m), k) == marginalize(s, min(m, k))

    def test_mass_preserved(self, rng):
        f = random_trigpoly(rng, 3, 2, n_terms=12)
        for m in range(4):
            assert marginalize(f, m).coeffs.get(MultiIndex(), 0) == f.coeffs.get(MultiIndex(), 0)

    def test_grid_marginal_matches_truncation(self, rng):
        f = random_trigpoly(rng, 3, 3)
        g = CylinderGrid.from_function(f, (8, 8, 8))
        for m in range(4):
            want = CylinderGrid.from_function(marginalize(f, m), (8,) * m)
            assert np.abs(marginalize(g, m).samples - want.samples).max() < 1e-12

    def test_jessen_convergence(self, rng):
        f = random_trigpoly(rng, 4, 2, n_terms=10)
        pts = rng.random((30, 4))
        errs = [np.abs(evaluate(marginalize(f, m), pts) - evaluate(f, pts)).max() for m in range(5)]
        assert errs[-1] == 0.0
        s = SpikeTensor({1: 0.3, 2: 0.6, 3: 0.9})
        assert np.abs(evaluate(marginalize(s, 3), pts) - evaluate(s, pts)).max() == 0.0


class TestOrlicz:
    def test_trivial(self):
        for d in range(4):
            assert orlicz_functional(TrigPoly({}), d) == 0.0
        assert orlicz_functional(TrigPoly.constant(1.0), 1) == pytest.approx(math.log(2), abs=1e-15)
        assert orlicz_functional(SpikeTensor({}), 1) == pytest.approx(math.log(2), abs=1e-15)

    def test_spike_closed_form(self):
        # integral_0^0.1 10 ln(10 + 1) dt
        assert orlicz_functional(SpikeTensor({1: 0.1}), 1) == pytest.approx(math.log(11), abs=1e-12)
        assert orlicz_functional(SpikeTensor({1: 0.1}), 0) == 1.0

    def test_spike_against_grid_quadrature(self):
        s = SpikeTensor({1: 0.25, 2: 0.5})
        g = CylinderGrid.from_function(s, (64, 64))
        for d in range(4):
            assert orlicz_functional(g, d) == pytest.approx(orlicz_functional(s, d), rel=1e-12)

    def test_resolution_errors(self):
        f = TrigPoly.character([5])
        with pytest.raises(QuadratureError):
            orlicz_functional(f, 1, sizes=(8,))
        wiggly = TrigPoly({MultiIndex.from_dense([k]): 1.0 for k in range(-6, 7)})
        with pytest.raises(QuadratureError):
            orlicz_functional(wiggly, 2, sizes=(14,), tol=1e-14)
        assert orlicz_functional(TrigPoly.constant(3.0), 2, tol=1e-14) == pytest.approx(3 * math.log(4) ** 2)


class TestLemma:
    def test_spike_example(self):
        r = lemma_check(SpikeTensor({1: 0.1, 2: 0.1}), 1, 1)
        assert r.lhs == pytest.approx(math.log(11), abs=1e-12)
        assert r.rhs == pytest.approx(math.log(101), abs=1e-12)
        assert r.holds

    @pytest.mark.parametrize("m", [0, 1, 3])
    def test_constant(self, m):
        r = lemma_check(TrigPoly.constant(2.5), m, 2)
        assert r.lhs == r.rhs and r.holds

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(0, 3), st.integers(1, 3))
    def test_random_nonnegative_polys(self, seed, m, d):
        rng = np.random.default_rng(seed)
        f = random_trigpoly(rng, 3, 2).conj_product()
        r = lemma_check(f, m, d)
        assert r.holds, (r.lhs, r.rhs)

    def test_grid_family(self, rng):
        g = CylinderGrid(np.abs(rng.standard_normal((16, 16, 8))) * 3)
        for d in (1, 2, 3):
            for m in range(4):
                assert lemma_check(g, m, d).holds


class TestConfigAndFiles:
    def test_spec_roundtrip(self, rng):
        f = random_trigpoly(rng, 3, 2)
        assert function_from_spec(function_to_spec(f)) == f
        s = SpikeTensor({1: 0.1, 3: 0.5})
        assert function_from_spec(function_to_spec(s)) == s

    def test_config_shape(self):
        f = function_from_spec({"type": "trigpoly", "terms": [{"index": {"1": 1, "2": 1}, "re": 1, "im": 0}]})
        assert f == TrigPoly.character([1, 1])

    def test_grid_file(self, tmp_path, rng):
        g = CylinderGrid((rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))).astype(np.complex64))
        path = tmp_path / "samples.bin"
        write_grid(g, path)
        assert path.stat().st_size == 4 * 6 * 8
        raw = np.frombuffer(path.read_bytes(), dtype="<f4")
        assert raw[0] == np.float32(g.samples[0, 0].real) and raw[3] == np.float32(g.samples[0, 1].imag)
        assert read_grid(path, (4, 6)) == g
        spec_grid = function_from_spec({"type": "grid", "file": "samples.bin", "sizes": [4, 6]}, tmp_path)
        assert spec_grid == g
        with pytest.raises(ValueError):
            read_grid(path, (5, 6))
