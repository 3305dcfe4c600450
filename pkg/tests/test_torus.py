import csv
import math

import numpy as np
import pytest

from scband import torus as tr
from scband.errors import DomainError


def test_combine_pair_constraints():
    for r1, r2 in [(1.0, 1.0), (1.0, 1 / 3), (0.2, 0.7)]:
        c1, c2, r = tr.combine_pair(r1, r2)
        assert c1**2 + c2**2 == pytest.approx(1.0, abs=1e-15)
        assert c1 * r1 == pytest.approx(c2 * r2, rel=1e-15)
        assert r == pytest.approx(c1 * r1, rel=1e-15)


def test_offset_radius():
    # tube of radius r/2 around a focal-radius-r core, rescaled by 1/(1 + r/2)
    for r in (1.0, 0.5, 0.1):
        assert tr.offset_radius(r) == pytest.approx((r / 2) / (1 + r / 2), rel=1e-15)


def test_table_values():
    table = tr.focal_radius_table(1024)
    assert table[2] == 1.0
    assert table[3] == pytest.approx(1 / 3)
    assert table[4] == pytest.approx(1 / (1 + 2 * math.sqrt(2)), rel=1e-15)
    assert table[8] == pytest.approx(0.0845420941816, rel=1e-11)
    assert table[8] > 1 / 13
    assert min(r * n**1.5 for n, r in table.items()) > 1 / 3
    assert min(table[2**i] * 2 ** (1.5 * i) for i in range(1, 11)) > 1


def test_build_tree_matches_table():
    table = tr.focal_radius_table(40)
    for n in range(2, 41):
        node = tr.build(n)
        assert node.focal_radius == pytest.approx(table[n], rel=1e-14)
        assert node.ambient_dim == n
        assert node.codim == 1
        assert node.n_angles == n - 1


def test_construction_invariants():
    with pytest.raises(DomainError):
        tr.TorusConstruction("circle", 3, 1.0)
    with pytest.raises(DomainError):
        tr.TorusConstruction("pair", 4, 0.5, tr.circle(), tr.circle(), c1=0.6, c2=0.6)
    with pytest.raises(DomainError):
        tr.offset(tr.circle())
    with pytest.raises(DomainError):
        tr.build(1)


def test_spherical_and_lipschitz_bounds():
    assert tr.spherical_width_lower_bound(3) == pytest.approx(math.pi / 2)
    assert tr.spherical_width_lower_bound(4) == pytest.approx(2 * tr.focal_radius_table(4)[4])
    assert tr.lipschitz_lower_bound(3, 6.0, math.pi / 2) == 0.75
    assert tr.crossover_vs_classical() == 6
    with pytest.raises(DomainError):
        tr.lipschitz_lower_bound(3, -1.0, 1.0)


def test_subsphere_data_matches_clifford():
    for n in (2, 3, 5):
        rad, curv = tr.subsphere_data(1 / math.sqrt(n))
        assert rad == pytest.approx(math.asin(1 / math.sqrt(n)))
        assert curv == pytest.approx(math.sqrt(n - 1))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_sampled_points_lie_on_unit_ball_and_frames_are_normal(n):
    cloud = tr.embed_and_sample(tr.build(n), 24)
    assert cloud.points.shape == (24 ** (n - 1), n)
    assert np.all(np.linalg.norm(cloud.points, axis=1) <= 1 + 1e-12)
    assert np.allclose(np.linalg.norm(cloud.normals, axis=1), 1.0)
    # normals are orthogonal to chords between nearby samples along the first angle
    chord = cloud.points[1] - cloud.points[0]
    assert abs(chord @ cloud.normals[0]) < 0.2 * np.linalg.norm(chord)


def test_distance_to_core_equals_offset():
    node = tr.build(4)
    cloud = tr.embed_and_sample(node, 32)
    core = tr.embed_and_sample(node.left, 32)
    # every tube point sits at distance delta * rescale from the rescaled core
    from scipy.spatial import cKDTree
    d, _ = cKDTree(core.points * node.rescale).query(cloud.points)
    assert np.allclose(d, node.delta * node.rescale, atol=1e-12)


@pytest.mark.parametrize(
    "node,ref,tol",
    [
        (tr.circle(), 1.0, 0.01),
        (tr.pair(tr.circle(), tr.circle()), 1 / math.sqrt(2), 0.02),
        (tr.build(3), 1 / 3, 0.05),
        (tr.build(4), 1 / (1 + 2 * math.sqrt(2)), 0.05),
    ],
)
def test_oracle_matches_recursion(node, ref, tol):
    est = tr.brute_force_focal_radius(tr.embed_and_sample(node, 48))
    assert abs(est / ref - 1) <= tol


def test_oracle_detects_global_collision():
    # concentric circles at radii 1 and 1.2: reach 0.1 from the gap, focal radius 1
    a = 2 * np.pi * np.arange(256) / 256
    u = np.stack([np.cos(a), np.sin(a)], axis=1)
    cloud = tr.PointCloud(np.vstack([u, 1.2 * u]), np.vstack([u, u])[:, None, :])
    assert tr.brute_force_focal_radius(cloud) == pytest.approx(0.1, rel=0.03)


def test_oracle_line_is_unbounded():
    xs = np.linspace(-1, 1, 200)
    pts = np.stack([xs, np.zeros_like(xs)], axis=1)
    frames = np.tile([[0.0, 1.0]], (200, 1))[:, None, :]
    assert tr.brute_force_focal_radius(tr.PointCloud(pts, frames)) == math.inf


def test_oracle_rejects_duplicates():
    pts = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(DomainError):
        tr.brute_force_focal_radius(tr.PointCloud(pts, pts[:, None, :]))


def test_sampling_limits():
    with pytest.raises(DomainError):
        tr.embed_and_sample(tr.build(6), 16)
    with pytest.raises(DomainError):
        tr.embed_and_sample(tr.circle(), 8)


def test_point_cloud_csv(tmp_path):
    cloud = tr.embed_and_sample(tr.build(3), 16)
    path = tmp_path / "y3.csv"
    cloud.to_csv(path)
    rows = list(csv.reader(open(path, newline="")))
    assert rows[0] == ["x0", "x1", "x2", "n0", "n1", "n2"]
    assert len(rows) == 1 + 256
    back = np.array(rows[1:], dtype=float)
    assert np.allclose(back[:, :3], cloud.points, atol=1e-11)
    assert open(path, "rb").read().count(b"\r") == 0
