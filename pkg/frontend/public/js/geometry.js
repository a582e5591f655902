// Client-side chain geometry. Mirrors the server's rectangle construction so
// population thumbnails and editor previews render without a round trip; the
// server remains authoritative for all state.
export const ANGLE_STEP = Math.PI / 12;
export const ANGLE_COUNT = 24;
export const MAX_BRICKS = 32;
/** Wrap an integer step index into [-12, 12). */
export function wrapIndex(k) {
    return ((((k + 12) % 24) + 24) % 24) - 12;
}
/** Snap an arbitrary radian angle to the 15-degree grid in [-pi, pi). */
export function snapAngle(angle) {
    return wrapIndex(Math.round(angle / ANGLE_STEP)) * ANGLE_STEP;
}
/** Absolute heading of each brick: cumulative sum of relative angles. */
export function headings(design) {
    const out = [];
    let k = 0;
    for (const a of design.angles) {
        k = wrapIndex(k + Math.round(a / ANGLE_STEP));
        out.push(k * ANGLE_STEP);
    }
    return out;
}
/** Joint points; joint 0 is the anchor, joint i+1 ends brick i. */
export function joints(design) {
    const pts = [[design.anchor[0], design.anchor[1]]];
    let [x, y] = design.anchor;
    for (const phi of headings(design)) {
        x += design.brick_length * Math.cos(phi);
        y += design.brick_length * Math.sin(phi);
        pts.push([x, y]);
    }
    return pts;
}
/** Corner points of every brick rectangle, counterclockwise. */
export function chainRects(design) {
    const js = joints(design);
    const hs = headings(design);
    const half = design.brick_thickness / 2;
    const rects = [];
    for (let i = 0; i < hs.length; i++) {
        const phi = hs[i];
        const nx = -Math.sin(phi) * half;
        const ny = Math.cos(phi) * half;
        const a = js[i];
        const b = js[i + 1];
        rects.push([
            [a[0] - nx, a[1] - ny],
            [b[0] - nx, b[1] - ny],
            [b[0] + nx, b[1] + ny],
            [a[0] + nx, a[1] + ny],
        ]);
    }
    return rects;
}
/** Compound center of mass: bricks share one mass, so it is the mean of the
 * brick centers (each rectangle's centroid is its centerline midpoint). */
export function chainCom(design) {
    const js = joints(design);
    let cx = 0;
    let cy = 0;
    const n = design.angles.length;
    for (let i = 0; i < n; i++) {
        cx += (js[i][0] + js[i + 1][0]) / 2;
        cy += (js[i][1] + js[i + 1][1]) / 2;
    }
    return [cx / n, cy / n];
}
export function bounds(pts) {
    let x0 = Infinity;
    let y0 = Infinity;
    let x1 = -Infinity;
    let y1 = -Infinity;
    for (const [x, y] of pts) {
        x0 = Math.min(x0, x);
        y0 = Math.min(y0, y);
        x1 = Math.max(x1, x);
        y1 = Math.max(y1, y);
    }
    return { x0, y0, x1, y1 };
}
/** Index of the joint nearest to a point, with its distance. */
export function nearestJoint(design, p) {
    const js = joints(design);
    let best = 0;
    let bestD = Infinity;
    for (let i = 0; i < js.length; i++) {
        const d = Math.hypot(js[i][0] - p[0], js[i][1] - p[1]);
        if (d < bestD) {
            bestD = d;
            best = i;
        }
    }
    return { index: best, dist: bestD };
}
/** Index of the brick whose center is nearest to a point. */
export function nearestBrick(design, p) {
    const js = joints(design);
    let best = 0;
    let bestD = Infinity;
    for (let i = 0; i < design.angles.length; i++) {
        const cx = (js[i][0] + js[i + 1][0]) / 2;
        const cy = (js[i][1] + js[i + 1][1]) / 2;
        const d = Math.hypot(cx - p[0], cy - p[1]);
        if (d < bestD) {
            bestD = d;
            best = i;
        }
    }
    return { index: best, dist: bestD };
}
