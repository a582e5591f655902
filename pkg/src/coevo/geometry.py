"""Convex polygon helpers shared by body construction and challenge scoring."""

from __future__ import annotations

import math

import numpy as np


def regular_polygon(radius: float, n: int = 16) -> np.ndarray:
    """CCW regular n-gon around the origin; stands in for circles."""
    ang = np.arange(n) * (2.0 * math.pi / n)
    return np.column_stack([radius * np.cos(ang), radius * np.sin(ang)])


def box(half_w: float, half_h: float) -> np.ndarray:
    """CCW axis-aligned box around the origin."""
    return np.array(
        [[-half_w, -half_h], [half_w, -half_h], [half_w, half_h], [-half_w, half_h]]
    )


def rect_from_corners(x0: float, y0: float, x1: float, y1: float) -> np.ndarray:
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])


def polygon_area(verts: np.ndarray) -> float:
    """Signed area; positive for CCW winding."""
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_centroid(verts: np.ndarray) -> np.ndarray:
    x, y = verts[:, 0], verts[:, 1]
    cross = x * np.roll(y, -1) - np.roll(x, -1) * y
    area = 0.5 * float(np.sum(cross))
    cx = float(np.sum((x + np.roll(x, -1)) * cross)) / (6.0 * area)
    cy = float(np.sum((y + np.roll(y, -1)) * cross)) / (6.0 * area)
    return np.array([cx, cy])


def polygon_inertia(verts: np.ndarray, density: float) -> float:
    """Moment of inertia about the polygon centroid for a uniform lamina."""
    c = polygon_centroid(verts)
    v = verts - c
    x, y = v[:, 0], v[:, 1]
    x1, y1 = np.roll(x, -1), np.roll(y, -1)
    cross = x * y1 - x1 * y
    integral = float(np.sum(cross * (x * x + x * x1 + x1 * x1 + y * y + y * y1 + y1 * y1)))
    return density * integral / 12.0


def transform(verts: np.ndarray, position: np.ndarray, angle: float) -> np.ndarray:
    """Move body-local vertices into world space."""
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return verts @ rot.T + position


def polygons_intersect(a: np.ndarray, b: np.ndarray) -> bool:
    """Separating-axis test for convex polygons, closed-set convention:
    polygons that only touch (zero separation) count as intersecting."""
    for poly1, poly2 in ((a, b), (b, a)):
        for i in range(len(poly1)):
            ex, ey = poly1[(i + 1) % len(poly1)] - poly1[i]
            nx, ny = ey, -ex
            p1 = poly1 @ (nx, ny)
            p2 = poly2 @ (nx, ny)
            if p1.max() < p2.min() or p2.max() < p1.min():
                return False
    return True


def clip_polygon(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman intersection of a convex subject with a convex CCW
    clip polygon. Returns an (m, 2) array, possibly empty."""
    output = [tuple(p) for p in subject]
    n = len(clip)
    for i in range(n):
        if not output:
            break
        ax, ay = clip[i]
        bx, by = clip[(i + 1) % n]
        ex, ey = bx - ax, by - ay
        inputs = output
        output = []
        for j in range(len(inputs)):
            px, py = inputs[j]
            qx, qy = inputs[(j + 1) % len(inputs)]
            # side = cross(edge, point - edge start); inside (left) when >= 0
            side_p = ex * (py - ay) - ey * (px - ax)
            side_q = ex * (qy - ay) - ey * (qx - ax)
            if side_p >= 0.0:
                output.append((px, py))
            if (side_p >= 0.0) != (side_q >= 0.0):
                denom = side_p - side_q
                if denom != 0.0:
                    t = side_p / denom
                    output.append((px + t * (qx - px), py + t * (qy - py)))
    return np.array(output) if output else np.empty((0, 2))


def intersection_area(subject: np.ndarray, clip: np.ndarray) -> float:
    poly = clip_polygon(subject, clip)
    if len(poly) < 3:
        return 0.0
    return abs(polygon_area(poly))
