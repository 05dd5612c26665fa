"""Triangulated geodesic caps on umbilic spheres (the n = 2 mesh path).

Vertices live in the ambient model: Euclidean 3-space for kappa = 0, the
hyperboloid in Minkowski 4-space for kappa < 0, the round 3-sphere in
Euclidean 4-space for kappa > 0.  Edge lengths are exact ambient geodesic
distances between vertices, which approximate the intrinsic cap metric to
second order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import MeshError
from .spaceforms import SphereGeometry, sphere_from_H

MODEL_CONSTRAINT_TOL = 1e-10


@dataclass
class TriMesh:
    """Triangulated disk with per-vertex boundary flags and stability potential."""

    vertices: np.ndarray  # (nv, 3) for kappa = 0, (nv, 4) otherwise
    faces: np.ndarray  # (nf, 3) int
    boundary: np.ndarray  # (nv,) bool
    potential: np.ndarray  # (nv,) |A|^2 + Ric(nu), before the (1-delta) factor
    kappa: float
    geometry: SphereGeometry | None = None
    rho: float | None = None
    level: int | None = None

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_faces(self) -> int:
        return self.faces.shape[0]

    @property
    def interior(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary)


def ambient_distance(kappa: float, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Geodesic distance in the ambient space form between model points."""
    p = np.atleast_2d(p)
    q = np.atleast_2d(q)
    if kappa == 0.0:
        return np.linalg.norm(p - q, axis=-1)
    if kappa < 0.0:
        # Minkowski signature (-, +, +, +): <x, x> = 1/kappa on the hyperboloid.
        inner = -p[:, 0] * q[:, 0] + np.sum(p[:, 1:] * q[:, 1:], axis=-1)
        ch = np.clip(-inner * (-kappa), 1.0, None)
        return np.arccosh(ch) / math.sqrt(-kappa)
    cos = np.clip(np.sum(p * q, axis=-1) * kappa, -1.0, 1.0)
    return np.arccos(cos) / math.sqrt(kappa)


def _model_points(kappa: float, r_ambient: float, phi: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Points of the geodesic r-sphere at polar angle phi, azimuth theta."""
    u = np.stack(
        [np.sin(phi) * np.cos(theta), np.sin(phi) * np.sin(theta), np.cos(phi)], axis=-1
    )
    if kappa == 0.0:
        return r_ambient * u
    if kappa < 0.0:
        sq = math.sqrt(-kappa)
        a = sq * r_ambient
        out = np.empty((u.shape[0], 4))
        out[:, 0] = math.cosh(a) / sq
        out[:, 1:] = math.sinh(a) / sq * u
        return out
    sq = math.sqrt(kappa)
    a = sq * r_ambient
    out = np.empty((u.shape[0], 4))
    out[:, :3] = math.sin(a) / sq * u
    out[:, 3] = math.cos(a) / sq
    return out


def _zip_rings(inner: np.ndarray, inner_ang: np.ndarray, outer: np.ndarray, outer_ang: np.ndarray):
    """Triangulate the band between two concentric vertex rings.

    Walks both rings by angle; orientation keeps the disk interior on the
    left of every directed edge (consistent CCW faces).
    """
    faces = []
    na, nb = len(inner), len(outer)
    ia = ib = 0
    ang_a = np.append(inner_ang, inner_ang[0] + 2.0 * math.pi)
    ang_b = np.append(outer_ang, outer_ang[0] + 2.0 * math.pi)
    while ia < na or ib < nb:
        advance_a = ib >= nb or (ia < na and ang_a[ia + 1] <= ang_b[ib + 1])
        if advance_a:
            faces.append((inner[(ia + 1) % na], inner[ia], outer[ib % nb]))
            ia += 1
        else:
            faces.append((outer[ib], outer[(ib + 1) % nb], inner[ia % na]))
            ib += 1
    return faces


def build_cap_mesh(kappa: float, H: float, rho: float, level: int) -> TriMesh:
    """Concentric-ring triangulation of the intrinsic geodesic cap of radius rho.

    level sets the resolution: 2**level rings, azimuthal counts scaled to
    the ring circumference so triangles stay near-equilateral.
    """
    if level < 0:
        raise MeshError(f"level must be nonnegative, got {level}")
    geom = sphere_from_H(2, kappa, H)
    c = geom.c_int
    full = math.pi / math.sqrt(c)
    if not 0.0 < rho < full:
        raise MeshError(f"cap radius must lie in (0, {full}), got {rho}")
    r_int = 1.0 / math.sqrt(c)  # intrinsic sphere radius
    rings = 2**level
    h = rho / rings

    phis = [0.0]
    thetas = [0.0]
    ring_indices: list[np.ndarray] = []
    ring_angles: list[np.ndarray] = []
    next_index = 1
    for i in range(1, rings + 1):
        s = i * h
        phi = s / r_int
        circumference = 2.0 * math.pi * r_int * math.sin(phi)
        count = max(3, int(round(circumference / h)))
        ang = 2.0 * math.pi * np.arange(count) / count
        phis.extend([phi] * count)
        thetas.extend(ang.tolist())
        ring_indices.append(np.arange(next_index, next_index + count))
        ring_angles.append(ang)
        next_index += count

    vertices = _model_points(
        kappa, geom.r_ambient, np.asarray(phis), np.asarray(thetas)
    )

    faces: list[tuple[int, int, int]] = []
    first = ring_indices[0]
    n0 = len(first)
    for j in range(n0):
        faces.append((int(first[j]), int(first[(j + 1) % n0]), 0))
    for i in range(1, rings):
        faces.extend(
            _zip_rings(ring_indices[i - 1], ring_angles[i - 1], ring_indices[i], ring_angles[i])
        )

    faces_arr = np.asarray(faces, dtype=np.int64)
    boundary = np.zeros(next_index, dtype=bool)
    boundary[ring_indices[-1]] = True
    potential = np.full(next_index, geom.normA2 + geom.ric_nu)
    mesh = TriMesh(
        vertices=vertices,
        faces=faces_arr,
        boundary=boundary,
        potential=potential,
        kappa=kappa,
        geometry=geom,
        rho=rho,
        level=level,
    )
    _check_topology(mesh)
    return mesh


def edge_face_counts(faces: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unique undirected edges and the number of faces containing each."""
    e = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    e = np.sort(e, axis=1)
    edges, counts = np.unique(e, axis=0, return_counts=True)
    return edges, counts


def _check_topology(mesh: TriMesh) -> None:
    edges, counts = edge_face_counts(mesh.faces)
    if counts.max(initial=0) > 2:
        raise MeshError("a mesh edge belongs to more than two faces")
    v = mesh.num_vertices
    f = mesh.num_faces
    if v - len(edges) + f != 1:
        raise MeshError(f"not a disk: Euler characteristic {v - len(edges) + f}")
    boundary_verts = np.unique(edges[counts == 1])
    flagged = np.flatnonzero(mesh.boundary)
    if not np.array_equal(boundary_verts, flagged):
        raise MeshError("boundary flags do not match the topological boundary")
    # Orientation consistency: every interior edge appears once per direction.
    directed = np.concatenate([mesh.faces[:, [0, 1]], mesh.faces[:, [1, 2]], mesh.faces[:, [2, 0]]])
    _, dir_counts = np.unique(directed, axis=0, return_counts=True)
    if dir_counts.max(initial=0) > 1:
        raise MeshError("inconsistent face orientation")


def model_constraint_residual(mesh: TriMesh) -> float:
    """Max deviation of vertices from the ambient model constraint."""
    v = mesh.vertices
    if mesh.kappa == 0.0:
        if mesh.geometry is None:
            return 0.0
        return float(np.abs(np.linalg.norm(v, axis=1) - mesh.geometry.r_ambient).max())
    if mesh.kappa < 0.0:
        norm = -v[:, 0] ** 2 + np.sum(v[:, 1:] ** 2, axis=1)
        return float(np.abs(norm - 1.0 / mesh.kappa).max())
    norm = np.sum(v**2, axis=1)
    return float(np.abs(norm - 1.0 / mesh.kappa).max())


def face_edge_lengths(mesh: TriMesh) -> np.ndarray:
    """(nf, 3) geodesic edge lengths, entry i opposite face corner i."""
    v = mesh.vertices
    f = mesh.faces
    lengths = np.empty((f.shape[0], 3))
    for i, (j, k) in enumerate(((1, 2), (2, 0), (0, 1))):
        lengths[:, i] = ambient_distance(mesh.kappa, v[f[:, j]], v[f[:, k]])
    return lengths


def edge_graph(mesh: TriMesh) -> csr_matrix:
    """Sparse symmetric graph of mesh edges weighted by geodesic length."""
    edges, _ = edge_face_counts(mesh.faces)
    d = ambient_distance(mesh.kappa, mesh.vertices[edges[:, 0]], mesh.vertices[edges[:, 1]])
    n = mesh.num_vertices
    rows = np.concatenate([edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 1], edges[:, 0]])
    return csr_matrix((np.concatenate([d, d]), (rows, cols)), shape=(n, n))


def intrinsic_radius(mesh: TriMesh) -> float:
    """Max over interior vertices of the edge-path distance to the boundary.

    Dijkstra over geodesic edge lengths; overestimates the smooth
    intrinsic radius by the mesh anisotropy factor.
    """
    sources = np.flatnonzero(mesh.boundary)
    if sources.size == 0:
        raise MeshError("mesh has no boundary")
    g = edge_graph(mesh)
    dist = dijkstra(g, directed=False, indices=sources, min_only=True)
    return float(dist[mesh.interior].max())


def save_mesh(mesh: TriMesh, path: str) -> None:
    """Plain-text polygon export: vertex lines, then 1-indexed face lines."""
    with open(path, "w") as fh:
        for row in mesh.vertices:
            fh.write("v " + " ".join(f"{x:.17g}" for x in row) + "\n")
        for a, b, c in mesh.faces:
            fh.write(f"f {a + 1} {b + 1} {c + 1}\n")
