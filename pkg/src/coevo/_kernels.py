"""Numba-compiled inner loops of the rigid-body engine.

World state lives in flat float64/int64 arrays so one fixed-timestep step
runs without touching Python objects: integrate velocities, SAT narrow phase
with reference-face clipping, sequential impulses, positional correction,
integrate positions. All loops run in a fixed index order, which makes a
step bit-deterministic for identical inputs on one platform.

Set NUMBA_DISABLE_JIT=1 to run the same code uncompiled (slow, for debug).
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dep, but keep a fallback
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(fn):
            return fn

        return deco


@njit(cache=True)
def integrate_velocities(vel, omega, inv_mass, inv_inertia, force, torque, gx, gy, dt):
    n = vel.shape[0]
    for i in range(n):
        if inv_mass[i] > 0.0:
            vel[i, 0] += (gx + force[i, 0] * inv_mass[i]) * dt
            vel[i, 1] += (gy + force[i, 1] * inv_mass[i]) * dt
            omega[i] += torque[i] * inv_inertia[i] * dt


@njit(cache=True)
def integrate_positions(pos, angle, vel, omega, dt):
    n = pos.shape[0]
    for i in range(n):
        pos[i, 0] += vel[i, 0] * dt
        pos[i, 1] += vel[i, 1] * dt
        angle[i] += omega[i] * dt


@njit(cache=True)
def world_vertices(pos, angle, fx_body, fx_off, fx_n, verts_local):
    out = np.empty_like(verts_local)
    nf = fx_body.shape[0]
    for f in range(nf):
        b = fx_body[f]
        c = math.cos(angle[b])
        s = math.sin(angle[b])
        px = pos[b, 0]
        py = pos[b, 1]
        for v in range(fx_off[f], fx_off[f] + fx_n[f]):
            x = verts_local[v, 0]
            y = verts_local[v, 1]
            out[v, 0] = px + c * x - s * y
            out[v, 1] = py + s * x + c * y
    return out


@njit(cache=True)
def fixture_aabbs(wv, fx_off, fx_n):
    nf = fx_off.shape[0]
    boxes = np.empty((nf, 4))
    for f in range(nf):
        minx = 1e300
        miny = 1e300
        maxx = -1e300
        maxy = -1e300
        for v in range(fx_off[f], fx_off[f] + fx_n[f]):
            x = wv[v, 0]
            y = wv[v, 1]
            if x < minx:
                minx = x
            if x > maxx:
                maxx = x
            if y < miny:
                miny = y
            if y > maxy:
                maxy = y
        boxes[f, 0] = minx
        boxes[f, 1] = miny
        boxes[f, 2] = maxx
        boxes[f, 3] = maxy
    return boxes


@njit(cache=True)
def _best_separation(wv, off_a, n_a, off_b, n_b):
    """Max over A's face normals of the min separation of B's vertices.

    Returns (separation, face index). Positive separation proves the
    polygons disjoint along that axis.
    """
    best = -1e300
    best_face = 0
    for i in range(n_a):
        x0 = wv[off_a + i, 0]
        y0 = wv[off_a + i, 1]
        j = i + 1
        if j == n_a:
            j = 0
        x1 = wv[off_a + j, 0]
        y1 = wv[off_a + j, 1]
        ex = x1 - x0
        ey = y1 - y0
        ln = math.sqrt(ex * ex + ey * ey)
        if ln == 0.0:
            continue
        nx = ey / ln
        ny = -ex / ln
        m = 1e300
        for k in range(n_b):
            d = nx * (wv[off_b + k, 0] - x0) + ny * (wv[off_b + k, 1] - y0)
            if d < m:
                m = d
        if m > best:
            best = m
            best_face = i
    return best, best_face


@njit(cache=True)
def _clip_segment(p, nx, ny, offset):
    """Clip a 2-point segment buffer against dot(n, x) <= offset.

    Returns the number of points kept (segment buffer updated in place).
    """
    d0 = nx * p[0, 0] + ny * p[0, 1] - offset
    d1 = nx * p[1, 0] + ny * p[1, 1] - offset
    out = np.empty((2, 2))
    n = 0
    if d0 <= 0.0:
        out[n, 0] = p[0, 0]
        out[n, 1] = p[0, 1]
        n += 1
    if d1 <= 0.0:
        out[n, 0] = p[1, 0]
        out[n, 1] = p[1, 1]
        n += 1
    if d0 * d1 < 0.0 and n < 2:
        t = d0 / (d0 - d1)
        out[n, 0] = p[0, 0] + t * (p[1, 0] - p[0, 0])
        out[n, 1] = p[0, 1] + t * (p[1, 1] - p[0, 1])
        n += 1
    for i in range(n):
        p[i, 0] = out[i, 0]
        p[i, 1] = out[i, 1]
    return n


@njit(cache=True)
def collide(pos, angle, inv_mass, fx_body, fx_off, fx_n, verts_local):
    """Contact manifolds for every overlapping fixture pair of distinct,
    not-both-static bodies. Normals point from the lower-indexed body of the
    pair to the higher-indexed one; up to two contact points per manifold.
    """
    wv = world_vertices(pos, angle, fx_body, fx_off, fx_n, verts_local)
    boxes = fixture_aabbs(wv, fx_off, fx_n)
    nf = fx_body.shape[0]
    cap = nf * (nf - 1) // 2 + 1
    man_a = np.empty(cap, dtype=np.int64)
    man_b = np.empty(cap, dtype=np.int64)
    man_nx = np.empty(cap)
    man_ny = np.empty(cap)
    man_np = np.empty(cap, dtype=np.int64)
    man_px = np.empty((cap, 2))
    man_py = np.empty((cap, 2))
    man_pen = np.empty((cap, 2))
    m = 0

    seg = np.empty((2, 2))
    for fa in range(nf):
        body_a = fx_body[fa]
        for fb in range(fa + 1, nf):
            body_b = fx_body[fb]
            if body_a == body_b:
                continue
            if inv_mass[body_a] == 0.0 and inv_mass[body_b] == 0.0:
                continue
            if (
                boxes[fa, 2] < boxes[fb, 0]
                or boxes[fb, 2] < boxes[fa, 0]
                or boxes[fa, 3] < boxes[fb, 1]
                or boxes[fb, 3] < boxes[fa, 1]
            ):
                continue

            off_a = fx_off[fa]
            na = fx_n[fa]
            off_b = fx_off[fb]
            nb = fx_n[fb]
            sep_a, face_a = _best_separation(wv, off_a, na, off_b, nb)
            if sep_a > 0.0:
                continue
            sep_b, face_b = _best_separation(wv, off_b, nb, off_a, na)
            if sep_b > 0.0:
                continue

            # reference face = the shallower (less negative) axis
            if sep_b > sep_a + 1e-12:
                ref_off = off_b
                ref_n = nb
                ref_face = face_b
                inc_off = off_a
                inc_n = na
                flip = True
            else:
                ref_off = off_a
                ref_n = na
                ref_face = face_a
                inc_off = off_b
                inc_n = nb
                flip = False

            i2 = ref_face + 1
            if i2 == ref_n:
                i2 = 0
            rv1x = wv[ref_off + ref_face, 0]
            rv1y = wv[ref_off + ref_face, 1]
            rv2x = wv[ref_off + i2, 0]
            rv2y = wv[ref_off + i2, 1]
            ex = rv2x - rv1x
            ey = rv2y - rv1y
            ln = math.sqrt(ex * ex + ey * ey)
            tx = ex / ln
            ty = ey / ln
            rnx = ty
            rny = -tx

            # incident face: most anti-parallel face of the other polygon
            best_dot = 1e300
            inc_face = 0
            for i in range(inc_n):
                j = i + 1
                if j == inc_n:
                    j = 0
                iex = wv[inc_off + j, 0] - wv[inc_off + i, 0]
                iey = wv[inc_off + j, 1] - wv[inc_off + i, 1]
                iln = math.sqrt(iex * iex + iey * iey)
                if iln == 0.0:
                    continue
                d = (iey * rnx - iex * rny) / iln
                if d < best_dot:
                    best_dot = d
                    inc_face = i
            j2 = inc_face + 1
            if j2 == inc_n:
                j2 = 0
            seg[0, 0] = wv[inc_off + inc_face, 0]
            seg[0, 1] = wv[inc_off + inc_face, 1]
            seg[1, 0] = wv[inc_off + j2, 0]
            seg[1, 1] = wv[inc_off + j2, 1]

            # clip to the reference face's side planes
            if _clip_segment(seg, -tx, -ty, -(tx * rv1x + ty * rv1y)) < 2:
                continue
            if _clip_segment(seg, tx, ty, tx * rv2x + ty * rv2y) < 2:
                continue

            npts = 0
            for i in range(2):
                s = rnx * (seg[i, 0] - rv1x) + rny * (seg[i, 1] - rv1y)
                if s <= 0.0:
                    man_px[m, npts] = seg[i, 0]
                    man_py[m, npts] = seg[i, 1]
                    man_pen[m, npts] = -s
                    npts += 1
            if npts == 0:
                continue

            man_a[m] = body_a
            man_b[m] = body_b
            if flip:
                man_nx[m] = -rnx
                man_ny[m] = -rny
            else:
                man_nx[m] = rnx
                man_ny[m] = rny
            man_np[m] = npts
            m += 1

    return man_a[:m], man_b[:m], man_nx[:m], man_ny[:m], man_np[:m], man_px[:m], man_py[:m], man_pen[:m]


@njit(cache=True)
def solve_contacts(
    man_a,
    man_b,
    man_nx,
    man_ny,
    man_np,
    man_px,
    man_py,
    man_pen,
    pos,
    vel,
    omega,
    inv_mass,
    inv_inertia,
    friction,
    restitution,
    iterations,
    baumgarte,
    slop,
    rest_threshold,
):
    """Sequential impulses with accumulated clamping, Coulomb friction and a
    one-shot positional correction; mutates vel/omega/pos in place."""
    m = man_a.shape[0]
    if m == 0:
        return
    ra_x = np.empty((m, 2))
    ra_y = np.empty((m, 2))
    rb_x = np.empty((m, 2))
    rb_y = np.empty((m, 2))
    mass_n = np.empty((m, 2))
    mass_t = np.empty((m, 2))
    bias = np.empty((m, 2))
    acc_n = np.zeros((m, 2))
    acc_t = np.zeros((m, 2))
    mu = np.empty(m)

    for c in range(m):
        a = man_a[c]
        b = man_b[c]
        nx = man_nx[c]
        ny = man_ny[c]
        tx = -ny
        ty = nx
        e = max(restitution[a], restitution[b])
        mu[c] = math.sqrt(friction[a] * friction[b])
        for p in range(man_np[c]):
            rax = man_px[c, p] - pos[a, 0]
            ray = man_py[c, p] - pos[a, 1]
            rbx = man_px[c, p] - pos[b, 0]
            rby = man_py[c, p] - pos[b, 1]
            ra_x[c, p] = rax
            ra_y[c, p] = ray
            rb_x[c, p] = rbx
            rb_y[c, p] = rby
            rna = rax * ny - ray * nx
            rnb = rbx * ny - rby * nx
            kn = inv_mass[a] + inv_mass[b] + inv_inertia[a] * rna * rna + inv_inertia[b] * rnb * rnb
            mass_n[c, p] = 1.0 / kn if kn > 0.0 else 0.0
            rta = rax * ty - ray * tx
            rtb = rbx * ty - rby * tx
            kt = inv_mass[a] + inv_mass[b] + inv_inertia[a] * rta * rta + inv_inertia[b] * rtb * rtb
            mass_t[c, p] = 1.0 / kt if kt > 0.0 else 0.0
            # restitution target from the pre-solve approach speed
            dvx = vel[b, 0] - omega[b] * rby - vel[a, 0] + omega[a] * ray
            dvy = vel[b, 1] + omega[b] * rbx - vel[a, 1] - omega[a] * rax
            vn0 = dvx * nx + dvy * ny
            if vn0 < -rest_threshold:
                bias[c, p] = -e * vn0
            else:
                bias[c, p] = 0.0

    for _ in range(iterations):
        for c in range(m):
            a = man_a[c]
            b = man_b[c]
            nx = man_nx[c]
            ny = man_ny[c]
            tx = -ny
            ty = nx
            for p in range(man_np[c]):
                rax = ra_x[c, p]
                ray = ra_y[c, p]
                rbx = rb_x[c, p]
                rby = rb_y[c, p]
                dvx = vel[b, 0] - omega[b] * rby - vel[a, 0] + omega[a] * ray
                dvy = vel[b, 1] + omega[b] * rbx - vel[a, 1] - omega[a] * rax
                vn = dvx * nx + dvy * ny
                dpn = -(vn - bias[c, p]) * mass_n[c, p]
                pn0 = acc_n[c, p]
                pn1 = pn0 + dpn
                if pn1 < 0.0:
                    pn1 = 0.0
                acc_n[c, p] = pn1
                dpn = pn1 - pn0
                ix = dpn * nx
                iy = dpn * ny
                vel[a, 0] -= ix * inv_mass[a]
                vel[a, 1] -= iy * inv_mass[a]
                omega[a] -= inv_inertia[a] * (rax * iy - ray * ix)
                vel[b, 0] += ix * inv_mass[b]
                vel[b, 1] += iy * inv_mass[b]
                omega[b] += inv_inertia[b] * (rbx * iy - rby * ix)

                dvx = vel[b, 0] - omega[b] * rby - vel[a, 0] + omega[a] * ray
                dvy = vel[b, 1] + omega[b] * rbx - vel[a, 1] - omega[a] * rax
                vt = dvx * tx + dvy * ty
                dpt = -vt * mass_t[c, p]
                max_t = mu[c] * acc_n[c, p]
                pt0 = acc_t[c, p]
                pt1 = pt0 + dpt
                if pt1 < -max_t:
                    pt1 = -max_t
                elif pt1 > max_t:
                    pt1 = max_t
                acc_t[c, p] = pt1
                dpt = pt1 - pt0
                ix = dpt * tx
                iy = dpt * ty
                vel[a, 0] -= ix * inv_mass[a]
                vel[a, 1] -= iy * inv_mass[a]
                omega[a] -= inv_inertia[a] * (rax * iy - ray * ix)
                vel[b, 0] += ix * inv_mass[b]
                vel[b, 1] += iy * inv_mass[b]
                omega[b] += inv_inertia[b] * (rbx * iy - rby * ix)

    for c in range(m):
        a = man_a[c]
        b = man_b[c]
        inv_sum = inv_mass[a] + inv_mass[b]
        if inv_sum == 0.0:
            continue
        pen = man_pen[c, 0]
        if man_np[c] > 1 and man_pen[c, 1] > pen:
            pen = man_pen[c, 1]
        corr = baumgarte * (pen - slop)
        if corr <= 0.0:
            continue
        corr /= inv_sum
        pos[a, 0] -= corr * inv_mass[a] * man_nx[c]
        pos[a, 1] -= corr * inv_mass[a] * man_ny[c]
        pos[b, 0] += corr * inv_mass[b] * man_nx[c]
        pos[b, 1] += corr * inv_mass[b] * man_ny[c]


@njit(cache=True)
def step_kernel(
    pos,
    angle,
    vel,
    omega,
    inv_mass,
    inv_inertia,
    friction,
    restitution,
    force,
    torque,
    fx_body,
    fx_off,
    fx_n,
    verts_local,
    gx,
    gy,
    dt,
    iterations,
    baumgarte,
    slop,
    rest_threshold,
):
    integrate_velocities(vel, omega, inv_mass, inv_inertia, force, torque, gx, gy, dt)
    man = collide(pos, angle, inv_mass, fx_body, fx_off, fx_n, verts_local)
    solve_contacts(
        man[0],
        man[1],
        man[2],
        man[3],
        man[4],
        man[5],
        man[6],
        man[7],
        pos,
        vel,
        omega,
        inv_mass,
        inv_inertia,
        friction,
        restitution,
        iterations,
        baumgarte,
        slop,
        rest_threshold,
    )
    integrate_positions(pos, angle, vel, omega, dt)
