"""Rigid transforms, configurations, and geometry description files."""

import numpy as np
import pytest

from casimir3d.geometry import (
    Configuration, GeometryFileError, ObjectInstance, OverlapError,
    RigidTransform, compose, parse_geometry, tetrahedron_pivot,
)
from casimir3d.mesh import generate_sphere, generate_tetrahedron


def _pair(d, mesh=None):
    mesh = mesh if mesh is not None else generate_sphere(1.0, 0)
    return Configuration([
        ObjectInstance("a", mesh),
        ObjectInstance("b", mesh, RigidTransform.translation_of([0, 0, d])),
    ])


def test_transform_identity_and_translation():
    t = RigidTransform.identity()
    p = np.array([[1.0, 2.0, 3.0]])
    assert np.allclose(t.apply(p), p)
    t = RigidTransform.translation_of([1, 0, -2])
    assert np.allclose(t.apply(p), [[2.0, 2.0, 1.0]])


def test_rotation_deg():
    r = RigidTransform.rotation_deg("z", 90.0)
    assert np.allclose(r.apply(np.array([[1.0, 0, 0]])), [[0, 1, 0]], atol=1e-15)
    # pivoted rotation keeps the pivot fixed
    pivot = np.array([1.0, 1.0, 0.0])
    r = RigidTransform.rotation_deg("z", 37.0, pivot=pivot)
    assert np.allclose(r.apply(pivot[None]), pivot[None])
    with pytest.raises(KeyError):
        RigidTransform.rotation_deg("w", 10.0)


def test_transform_validation():
    with pytest.raises(ValueError, match="orthogonal"):
        RigidTransform(np.eye(3) * 2.0, np.zeros(3))
    refl = np.diag([1.0, 1.0, -1.0])
    with pytest.raises(ValueError, match="det"):
        RigidTransform(refl, np.zeros(3))


def test_compose_and_inverse():
    a = RigidTransform.rotation_deg("x", 30.0)
    b = RigidTransform.translation_of([0.5, -1.0, 2.0])
    ab = compose(a, b)
    p = np.random.default_rng(0).normal(size=(5, 3))
    assert np.allclose(ab.apply(p), a.apply(b.apply(p)))
    assert np.allclose(compose(ab.inverse(), ab).apply(p), p)


def test_configuration_basics():
    cfg = _pair(4.0)
    assert len(cfg) == 2
    assert cfg.index_of("b") == 1
    with pytest.raises(KeyError):
        cfg.index_of("c")
    assert cfg.n_basis == cfg[0].n_basis + cfg[1].n_basis
    off, size = cfg.block(1)
    assert (off, size) == (cfg[0].n_basis, cfg[1].n_basis)
    with pytest.raises(ValueError, match="duplicate"):
        Configuration([cfg[0], ObjectInstance("a", cfg[0].mesh)])


def test_min_separation():
    cfg = _pair(4.0)
    # unit spheres, centers 4 apart: surface gap 2 (within mesh coarseness)
    gap = cfg.min_separation(0, 1)
    assert 2.0 <= gap < 2.3
    assert cfg.min_separation_all() == gap
    with pytest.raises(ValueError):
        cfg.min_separation(1, 1)


def test_overlap_detection():
    with pytest.raises(OverlapError):
        _pair(1.0)


def test_world_mesh_is_transformed():
    cfg = _pair(5.0)
    assert np.allclose(
        cfg[1].world_vertices, cfg[0].world_vertices + [0, 0, 5.0])


def test_transformed_configuration():
    cfg = _pair(4.0)
    shift = RigidTransform.translation_of([1.0, 2.0, 3.0])
    moved = cfg.transformed(shift)
    assert np.allclose(
        moved[0].world_vertices, cfg[0].world_vertices + [1.0, 2.0, 3.0])
    assert moved.min_separation(0, 1) == pytest.approx(
        cfg.min_separation(0, 1))


def test_tetrahedron_pivot():
    edge = 2.0
    piv = tetrahedron_pivot(edge)
    m = generate_tetrahedron(edge, 0)
    # on the symmetry axis, strictly between base plane and apex
    assert piv[0] == piv[1] == 0.0
    assert 0.0 < piv[2] < m.vertices[:, 2].max()
    # scales linearly with the edge length
    assert np.allclose(tetrahedron_pivot(2 * edge), 2 * piv)


def test_parse_geometry_generators():
    cfg = parse_geometry(
        "# two spheres\n"
        "object a sphere(1,1)\n"
        "object b sphere(1,1) move 0 0 4\n"
    )
    assert [o.label for o in cfg] == ["a", "b"]
    assert np.allclose(
        cfg[1].world_vertices, cfg[0].world_vertices + [0, 0, 4.0])


def test_parse_geometry_rot_and_pivot():
    cfg = parse_geometry(
        "object t tetrahedron(1,0) pivot 0 0 0.2 rot 90 z move 1 0 0\n"
    )
    ref = generate_tetrahedron(1.0, 0)
    rot = RigidTransform.rotation_deg("z", 90.0, pivot=[0, 0, 0.2])
    expect = RigidTransform.translation_of([1, 0, 0]).apply(
        rot.apply(ref.vertices))
    assert np.allclose(cfg[0].world_vertices, expect)


def test_parse_geometry_mesh_file(tmp_path):
    from test_mesh import MSH_TET
    (tmp_path / "tet.msh").write_text(MSH_TET)
    cfg = parse_geometry("object t mesh tet.msh", base_dir=tmp_path)
    assert cfg[0].mesh.n_panels == 4


@pytest.mark.parametrize("text,match", [
    ("sphere a object", "line 1: expected 'object"),
    ("object a blob(1)", "line 1: unknown mesh source"),
    ("object a mesh", "line 1: 'mesh' needs a path"),
    ("object a sphere(1,1) spin 90 z", "line 1: unknown clause"),
    ("object a sphere(1,1) move 1 2", "line 1: move needs 3"),
    ("\n# only comments\n", "no objects"),
])
def test_parse_geometry_errors(text, match):
    with pytest.raises(GeometryFileError, match=match):
        parse_geometry(text)


def test_parse_geometry_overlap_propagates():
    with pytest.raises(OverlapError):
        parse_geometry("object a sphere(1,1)\nobject b sphere(1,1)\n")
