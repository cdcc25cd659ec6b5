"""Sample-set normalization, ball sampling, and dataset bookkeeping."""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from surrobench.sampling import (
    Dataset,
    DegenerateSampleError,
    PROVENANCE_TAGS,
    SampleSet,
    minimal_ball_exponent,
    sample_ball,
    select_local_sample,
    shift_scale,
    standard_sizes,
)


def test_from_points_defaults():
    s = SampleSet.from_points([[0.0, 0.0], [3.0, 4.0], [1.0, 0.0]])
    assert_allclose(s.base, [0.0, 0.0])
    assert s.delta == 5.0
    assert len(s) == 3 and s.dim == 2


def test_shift_scale_maps_into_unit_ball():
    s = SampleSet.from_points([[0.0, 0.0], [3.0, 4.0], [1.0, 0.0]],
                              fvalues=[1.0, 2.0, 3.0])
    z = shift_scale(s)
    assert z.normalized
    assert_allclose(z.points, [[0.0, 0.0], [0.6, 0.8], [0.2, 0.0]])
    assert np.max(np.linalg.norm(z.points, axis=1)) <= 1.0 + 1e-15
    assert_allclose(z.fvalues, s.fvalues)
    # idempotent, and round trips through the stored (base, delta)
    assert shift_scale(z) is z
    assert_allclose(z.to_original(z.points[1]), [3.0, 4.0])


def test_shift_scale_degenerate():
    s = SampleSet.from_points([[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(DegenerateSampleError):
        shift_scale(s)


def test_sample_ball_stays_inside_and_is_seeded():
    c = np.array([2.0, -1.0, 0.5])
    a = sample_ball(c, 0.3, 50, 7)
    b = sample_ball(c, 0.3, 50, 7)
    assert_allclose(a, b)
    assert np.all(np.linalg.norm(a - c, axis=1) <= 0.3 + 1e-15)
    assert not np.allclose(a, sample_ball(c, 0.3, 50, 8))


def test_sample_ball_is_uniform():
    # mean norm of uniform points in the unit n-ball is n/(n+1)
    for n in (2, 5):
        pts = sample_ball(np.zeros(n), 1.0, 10000, 123)
        mean = float(np.mean(np.linalg.norm(pts, axis=1)))
        assert abs(mean - n / (n + 1)) < 0.02 * n / (n + 1)


def test_standard_sizes():
    assert standard_sizes(20) == (231, 47)
    assert standard_sizes(2) == (6, 2)
    assert standard_sizes(1) == (3, 1)


def test_dataset_append_dedup_and_tags():
    ds = Dataset()
    assert ds.append([1.0, 2.0], 3.0, "poll")
    assert not ds.append([1.0, 2.0], 4.0, "poll")  # exact duplicate
    assert not ds.append([1.0 + 1e-15, 2.0], 4.0, "poll")  # within tolerance
    assert ds.append([1.0 + 1e-10, 2.0], 4.0, "fd-stencil")
    assert len(ds) == 2
    assert ds.tags == ["poll", "fd-stencil"]
    with pytest.raises(ValueError):
        ds.append([0.0, 0.0], 0.0, "bogus")


def test_dataset_csv_round_trip(tmp_path):
    ds = Dataset()
    rng = np.random.default_rng(5)
    for tag in PROVENANCE_TAGS:
        ds.append(rng.standard_normal(3), rng.standard_normal(), tag)
    path = tmp_path / "data.csv"
    ds.to_csv(path)
    back = Dataset.from_csv(path)
    assert_allclose(back.points_array(), ds.points_array())
    assert_allclose(back.values_array(), ds.values_array())
    assert back.tags == ds.tags


def test_minimal_ball_exponent():
    assert minimal_ball_exponent([0.05, 0.12, 0.2], 3) == 8
    assert minimal_ball_exponent([0.01, 0.02], 2) == -16
    assert minimal_ball_exponent([0.1], 1) == 0  # boundary: radius exactly 0.1
    with pytest.raises(ValueError):
        minimal_ball_exponent([0.1], 2)
    with pytest.raises(ValueError):
        minimal_ball_exponent([0.0, 0.0], 2)


def test_minimal_ball_exponent_is_minimal():
    rng = np.random.default_rng(17)
    for _ in range(50):
        d = rng.random(30) * 10 ** rng.uniform(-3, 1)
        need = int(rng.integers(1, 30))
        j = minimal_ball_exponent(d, need)
        assert np.sum(d <= 0.1 * 1.1**j) >= need
        assert np.sum(d <= 0.1 * 1.1 ** (j - 1)) < need


def test_select_local_sample():
    rng = np.random.default_rng(3)
    n = 2
    x_k = np.array([0.3, -0.7])
    ds = Dataset()
    ds.append(x_k, 1.0, "fd-stencil")
    for _ in range(30):
        ds.append(x_k + 0.05 * rng.standard_normal(n),
                  rng.standard_normal(), "poll")
    Y = select_local_sample(ds, x_k, n)
    assert len(Y) >= 6  # (n+1)(n+2)/2
    assert_allclose(Y.points[0], x_k)  # nearest point first
    dist = np.linalg.norm(Y.points - x_k, axis=1)
    assert np.all(np.diff(dist) >= 0) and Y.fvalues is not None
    # the ball radius is tight: one exponent lower would not hold enough
    j = minimal_ball_exponent(
        np.linalg.norm(ds.points_array() - x_k, axis=1), 6)
    assert np.all(dist <= 0.1 * 1.1**j)


def test_select_local_sample_needs_enough_points():
    ds = Dataset()
    ds.append([0.0, 0.0], 0.0, "poll")
    with pytest.raises(ValueError):
        select_local_sample(ds, np.zeros(2), 2)
