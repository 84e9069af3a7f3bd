"""Compact polytopes ``{x : n_i·x <= b_i}`` used as invariant regions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import HalfspaceIntersection

from ..core.errors import DimensionMismatch


@dataclass(frozen=True, slots=True)
class Membership:
    status: Literal["inside", "boundary", "outside"]
    faces: tuple[int, ...] = ()


@dataclass(frozen=True, eq=False)
class Polytope:
    normals: np.ndarray
    offsets: np.ndarray
    label: str = "K"
    face_labels: tuple[str, ...] = ()
    _center: np.ndarray = field(init=False, repr=False)
    _radius: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        normals = np.atleast_2d(np.asarray(self.normals, dtype=float))
        offsets = np.asarray(self.offsets, dtype=float).ravel()
        if normals.shape[0] != offsets.size:
            raise ValueError(f"{normals.shape[0]} normals but {offsets.size} offsets")
        labels = self.face_labels or tuple(f"face{i}" for i in range(offsets.size))
        if len(labels) != offsets.size:
            raise ValueError("face_labels must name every inequality")
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "face_labels", tuple(labels))
        center, radius = self._chebyshev_center()
        object.__setattr__(self, "_center", center)
        object.__setattr__(self, "_radius", radius)
        self._check_bounded()

    @classmethod
    def from_inequalities(
        cls, inequalities: Sequence[tuple[Sequence[float], float, str]], label: str = "K"
    ) -> Polytope:
        normals = [n for n, _, _ in inequalities]
        offsets = [b for _, b, _ in inequalities]
        labels = tuple(name for _, _, name in inequalities)
        return cls(np.array(normals, dtype=float), np.array(offsets, dtype=float), label, labels)

    @classmethod
    def box(cls, lower: Sequence[float], upper: Sequence[float], label: str = "box") -> Polytope:
        rows = []
        for i, (lo, hi) in enumerate(zip(lower, upper)):
            e = np.zeros(len(lower))
            e[i] = 1.0
            rows.append((e, float(hi), f"x{i + 1}<={hi:g}"))
            rows.append((-e, -float(lo), f"x{i + 1}>={lo:g}"))
        return cls.from_inequalities(rows, label=label)

    @property
    def dim(self) -> int:
        return int(self.normals.shape[1])

    @property
    def center(self) -> np.ndarray:
        return self._center.copy()

    def _chebyshev_center(self) -> tuple[np.ndarray, float]:
        norms = np.linalg.norm(self.normals, axis=1)
        a_ub = np.hstack([self.normals, norms[:, None]])
        cost = np.zeros(self.dim + 1)
        cost[-1] = -1.0
        bounds = [(None, None)] * self.dim + [(0.0, None)]
        res = linprog(cost, A_ub=a_ub, b_ub=self.offsets, bounds=bounds, method="highs")
        if res.status != 0 or res.x[-1] <= 0:
            raise ValueError(f"polytope {self.label!r} is empty or has no interior")
        return res.x[:-1], float(res.x[-1])

    def _check_bounded(self) -> None:
        for i in range(self.dim):
            for sign in (1.0, -1.0):
                cost = np.zeros(self.dim)
                cost[i] = -sign
                res = linprog(
                    cost, A_ub=self.normals, b_ub=self.offsets,
                    bounds=[(None, None)] * self.dim, method="highs",
                )
                if res.status == 3:
                    raise ValueError(f"polytope {self.label!r} is unbounded along x{i + 1}")

    def vertices(self) -> np.ndarray:
        if self.dim == 1:
            lo = max((b / n[0] for n, b in zip(self.normals, self.offsets) if n[0] < 0), default=None)
            hi = min((b / n[0] for n, b in zip(self.normals, self.offsets) if n[0] > 0), default=None)
            return np.array([[lo], [hi]])
        halfspaces = np.hstack([self.normals, -self.offsets[:, None]])
        hs = HalfspaceIntersection(halfspaces, self._center)
        scale = max(1.0, float(np.max(np.abs(hs.intersections))))
        return np.unique(np.round(hs.intersections / scale, 12), axis=0) * scale

    def face_vertices(self, face: int, tol: float = 1e-9) -> np.ndarray:
        verts = self.vertices()
        slack = verts @ self.normals[face] - self.offsets[face]
        scale = max(1.0, abs(float(self.offsets[face])))
        return verts[np.abs(slack) <= tol * scale]

    def sample_face(self, face: int, n: int, rng: np.random.Generator) -> np.ndarray:
        """Face vertices followed by random convex combinations of them."""

        verts = self.face_vertices(face)
        if len(verts) == 0:
            return np.zeros((0, self.dim))
        picks = [v for v in verts[:n]]
        extra = n - len(picks)
        if extra > 0:
            weights = rng.dirichlet(np.ones(len(verts)), size=extra)
            picks.extend(weights @ verts)
        return np.asarray(picks)

    def sample_interior(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform samples by rejection from the bounding box of the vertices."""

        verts = self.vertices()
        lo, hi = verts.min(axis=0), verts.max(axis=0)
        out: list[np.ndarray] = []
        while len(out) < n:
            batch = rng.uniform(lo, hi, size=(max(4 * n, 64), self.dim))
            keep = batch[np.all(batch @ self.normals.T <= self.offsets, axis=1)]
            out.extend(keep[: n - len(out)])
        return np.asarray(out)

    def diameter(self) -> float:
        verts = self.vertices()
        return float(np.max(np.linalg.norm(verts[:, None, :] - verts[None, :, :], axis=-1)))


def membership(poly: Polytope, x: Sequence[float] | np.ndarray, tol: float = 1e-9) -> Membership:
    if tol <= 0:
        raise ValueError(f"membership tolerance must be positive, got {tol}")
    point = np.asarray(x, dtype=float).ravel()
    if point.size != poly.dim:
        raise DimensionMismatch(poly.dim, point.size)
    slack = poly.normals @ point - poly.offsets
    if np.any(slack > tol):
        return Membership("outside", tuple(int(i) for i in np.flatnonzero(slack > tol)))
    on_face = np.flatnonzero(np.abs(slack) <= tol)
    if on_face.size:
        return Membership("boundary", tuple(int(i) for i in on_face))
    return Membership("inside")
