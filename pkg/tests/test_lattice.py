import math

import numpy as np
import pytest

from prefmoo.errors import LatticeSizeError, ValidationError
from prefmoo.lattice import (
    all_distinct,
    dedup_points,
    generate_das_dennis,
    generate_multilayer,
    lattice_point_count,
    project_to_simplex,
    read_dat,
    write_dat,
)


def grid_simplex(m: int, divisions: int) -> np.ndarray:
    """Dense simplex grid used as the projection oracle."""
    return generate_das_dennis(m, divisions).points


def projection_certificate(z: np.ndarray, w: np.ndarray, tol: float = 1e-9) -> bool:
    """Exact optimality check: w is the closest simplex point to z iff the
    active coordinates share one threshold and the inactive ones sit at or
    below it."""
    if abs(w.sum() - 1.0) > 1e-9 or np.any(w < -1e-12):
        return False
    active = w > 1e-12
    if not np.any(active):
        return False
    t_vals = z[active] - w[active]
    t = t_vals.mean()
    if np.max(np.abs(t_vals - t)) > tol:
        return False
    return bool(np.all(z[~active] <= t + tol))


class TestGeneration:
    def test_m2_h4_exact_set(self):
        pts = generate_das_dennis(2, 4).points
        expected = {(0.0, 1.0), (0.25, 0.75), (0.5, 0.5), (0.75, 0.25), (1.0, 0.0)}
        assert {tuple(p) for p in pts} == expected

    def test_ordering_first_coordinate_descending(self):
        pts = generate_das_dennis(3, 3).points
        firsts = pts[:, 0]
        assert np.all(np.diff(firsts) <= 1e-15)
        # within equal first coordinate, second descends too
        block = pts[np.isclose(firsts, 1.0 / 3.0)]
        assert np.all(np.diff(block[:, 1]) < 0)

    @pytest.mark.parametrize(
        "m,H,count",
        [(3, 12, 91), (3, 13, 105), (5, 6, 210), (10, 3, 220)],
    )
    def test_reported_counts(self, m, H, count):
        assert len(generate_das_dennis(m, H)) == count

    def test_count_law_exhaustive(self):
        for m in range(2, 11):
            for H in range(1, 14):
                assert len(generate_das_dennis(m, H)) == math.comb(H + m - 1, m - 1)

    def test_lattice_closure(self):
        for m, H in [(2, 4), (3, 12), (4, 7), (10, 3)]:
            pts = generate_das_dennis(m, H).points
            k = pts * H
            assert np.max(np.abs(k - np.round(k))) < 1e-12

    def test_all_points_distinct_and_on_simplex(self):
        rs = generate_das_dennis(3, 12)
        assert all_distinct(rs.points)
        assert np.allclose(rs.points.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(rs.points >= 0.0)

    def test_size_guard(self):
        with pytest.raises(LatticeSizeError):
            generate_das_dennis(60, 60)

    def test_bad_parameters(self):
        with pytest.raises(ValidationError):
            generate_das_dennis(1, 4)
        with pytest.raises(ValidationError):
            generate_das_dennis(3, 0)


class TestMultilayer:
    def test_three_layers_m8(self):
        layers = generate_multilayer(8, 3, 3)
        assert len(layers) == 3
        assert sum(len(l) for l in layers) == 360

    def test_single_layer_reduces_to_plain_generation(self):
        layers = generate_multilayer(3, 2, 1)
        assert len(layers) == 1
        assert len(layers[0]) == 6
        np.testing.assert_array_equal(layers[0].points, generate_das_dennis(3, 2).points)

    def test_m10_total(self):
        layers = generate_multilayer(10, 3, 3)
        assert sum(len(l) for l in layers) == 660

    def test_layers_identical(self):
        layers = generate_multilayer(4, 3, 3)
        for layer in layers[1:]:
            np.testing.assert_array_equal(layer.points, layers[0].points)


class TestProjection:
    def test_identity_on_simplex(self):
        np.testing.assert_allclose(project_to_simplex([0.5, 0.5]), [0.5, 0.5], atol=1e-15)

    def test_two_dim_case_against_grid_oracle(self):
        z = np.array([0.3, 0.4])
        w = project_to_simplex(z)
        # analytic threshold: (0.3 + 0.4 - 1) / 2 = -0.15
        np.testing.assert_allclose(w, [0.45, 0.55], atol=1e-12)
        t = np.linspace(0.0, 1.0, 100_001)  # step 1e-5 on the 1-simplex
        grid = np.column_stack([t, 1.0 - t])
        best = np.min(np.linalg.norm(grid - z, axis=1))
        assert np.linalg.norm(w - z) <= best + 1e-6

    def test_three_dim_case_against_grid_oracle(self):
        z = np.array([1.4, 1.9, 1.5])
        w = project_to_simplex(z)
        t_hat = (z.sum() - 1.0) / 3.0
        np.testing.assert_allclose(w, z - t_hat, atol=1e-12)
        grid = grid_simplex(3, 700)
        best = np.min(np.linalg.norm(grid - z, axis=1))
        assert np.linalg.norm(w - z) <= best + 1e-6

    def test_random_inputs_certificate_and_idempotence(self):
        rng = np.random.default_rng(7)
        for m in (2, 3, 4):
            for _ in range(300):
                z = rng.uniform(-1.0, 3.0, size=m)
                w = project_to_simplex(z)
                assert projection_certificate(z, w)
                w2 = project_to_simplex(w)
                assert np.max(np.abs(w2 - w)) < 1e-12
                assert abs(w.sum() - 1.0) <= 1e-12
                assert np.all(w >= 0.0)

    def test_negative_components_allowed(self):
        w = project_to_simplex([-0.5, 0.2, 0.1])
        assert abs(w.sum() - 1.0) <= 1e-12
        assert np.all(w >= 0.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValidationError):
            project_to_simplex([np.nan, 0.5])
        with pytest.raises(ValidationError):
            project_to_simplex([np.inf, 0.5])


class TestDatFormat:
    def test_round_trip(self, tmp_path):
        pts = generate_das_dennis(3, 7).points
        path = tmp_path / "refs.dat"
        write_dat(pts, path)
        back = read_dat(path)
        np.testing.assert_allclose(back, pts, atol=1e-9)

    def test_writer_is_byte_stable(self, tmp_path):
        pts = generate_das_dennis(4, 5).points
        p1, p2 = tmp_path / "a.dat", tmp_path / "b.dat"
        write_dat(pts, p1)
        write_dat(pts, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_reader_tolerates_whitespace_and_blanks(self, tmp_path):
        path = tmp_path / "messy.dat"
        path.write_text("\n  0.5\t0.5 \n\n1 0\n   \n")
        np.testing.assert_allclose(read_dat(path), [[0.5, 0.5], [1.0, 0.0]])

    def test_reader_rejects_ragged_rows(self, tmp_path):
        path = tmp_path / "ragged.dat"
        path.write_text("0.5 0.5\n0.1 0.2 0.7\n")
        with pytest.raises(ValidationError):
            read_dat(path)

    def test_six_significant_digits(self, tmp_path):
        path = tmp_path / "sig.dat"
        write_dat(np.array([[1.0 / 3.0, 2.0 / 3.0]]), path)
        text = path.read_text()
        assert "0.3333333" in text
        assert text.endswith("\n")


class TestDedup:
    def test_dedup_collapses_near_duplicates(self):
        pts = np.array([[0.5, 0.5], [0.5 + 5e-10, 0.5 - 5e-10], [0.25, 0.75]])
        out = dedup_points(pts)
        assert out.shape[0] == 2

    def test_dedup_keeps_distinct(self):
        pts = generate_das_dennis(3, 5).points
        assert dedup_points(pts).shape[0] == pts.shape[0]


def test_point_count_helper_matches_binomial():
    assert lattice_point_count(3, 12) == 91
    assert lattice_point_count(10, 3) == 220
