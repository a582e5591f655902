// Canvas rendering: world-space drawing of chains, arenas and episode
// frames behind a fit-to-content camera. The y axis points up in world
// space and down on canvas, so the camera flips it.
import { bounds, chainCom, chainRects, joints } from "./geometry.js";
export function fitCamera(width, height, box, pad = 20) {
    const w = Math.max(box.x1 - box.x0, 1e-6);
    const h = Math.max(box.y1 - box.y0, 1e-6);
    const scale = Math.min((width - 2 * pad) / w, (height - 2 * pad) / h);
    const cx = (box.x0 + box.x1) / 2;
    const cy = (box.y0 + box.y1) / 2;
    return { scale, ox: width / 2 - cx * scale, oy: height / 2 + cy * scale };
}
export function toCanvas(cam, p) {
    return [cam.ox + p[0] * cam.scale, cam.oy - p[1] * cam.scale];
}
export function toWorld(cam, p) {
    return [(p[0] - cam.ox) / cam.scale, (cam.oy - p[1]) / cam.scale];
}
function polygon(ctx, cam, pts) {
    ctx.beginPath();
    pts.forEach((p, i) => {
        const [x, y] = toCanvas(cam, p);
        if (i === 0)
            ctx.moveTo(x, y);
        else
            ctx.lineTo(x, y);
    });
    ctx.closePath();
}
export function drawChain(ctx, cam, design, opts = {}) {
    const rects = chainRects(design);
    rects.forEach((rect, i) => {
        polygon(ctx, cam, rect);
        ctx.fillStyle = i === opts.selected ? "#e8a33d" : (opts.fill ?? "#4a90d9");
        ctx.globalAlpha = 0.85;
        ctx.fill();
        ctx.globalAlpha = 1;
        ctx.strokeStyle = "#1d3f5e";
        ctx.lineWidth = 1;
        ctx.stroke();
    });
    for (const j of joints(design)) {
        const [x, y] = toCanvas(cam, j);
        ctx.beginPath();
        ctx.arc(x, y, 3, 0, 2 * Math.PI);
        ctx.fillStyle = "#1d3f5e";
        ctx.fill();
    }
}
export function chainBounds(design, pad = 1.0) {
    const box = bounds(chainRects(design).flat());
    return { x0: box.x0 - pad, y0: box.y0 - pad, x1: box.x1 + pad, y1: box.y1 + pad };
}
function rotate(p, angle) {
    const c = Math.cos(angle);
    const s = Math.sin(angle);
    return [p[0] * c - p[1] * s, p[0] * s + p[1] * c];
}
function drawArenaAndGoal(ctx, cam, spec) {
    for (const box of spec.arena) {
        const corners = [
            [-box.half_w, -box.half_h],
            [box.half_w, -box.half_h],
            [box.half_w, box.half_h],
            [-box.half_w, box.half_h],
        ].map((p) => {
            const r = rotate(p, box.angle);
            return [r[0] + box.center[0], r[1] + box.center[1]];
        });
        polygon(ctx, cam, corners);
        ctx.fillStyle = "#6b7280";
        ctx.fill();
    }
    const goal = spec.goal;
    if (goal.kind === "protect") {
        polygon(ctx, cam, goal.zone);
        ctx.fillStyle = "rgba(234, 120, 35, 0.45)";
        ctx.fill();
    }
    else if (goal.kind === "cut") {
        const [x0, x1] = goal.x_range;
        polygon(ctx, cam, [
            [x0, goal.entry_y - goal.depth],
            [x1, goal.entry_y - goal.depth],
            [x1, goal.entry_y],
            [x0, goal.entry_y],
        ]);
        ctx.fillStyle = "rgba(40, 40, 60, 0.5)";
        ctx.fill();
    }
    else if (goal.kind === "move") {
        const [x, y] = toCanvas(cam, goal.target);
        ctx.beginPath();
        ctx.arc(x, y, 6, 0, 2 * Math.PI);
        ctx.strokeStyle = "#d94a4a";
        ctx.lineWidth = 2;
        ctx.stroke();
    }
    else if (goal.kind === "collect") {
        const [, y] = toCanvas(cam, [0, goal.kill_plane_y]);
        ctx.setLineDash([6, 4]);
        ctx.strokeStyle = "#d94a4a";
        ctx.beginPath();
        ctx.moveTo(0, y);
        ctx.lineTo(ctx.canvas.width, y);
        ctx.stroke();
        ctx.setLineDash([]);
    }
}
/** Arena extents plus the design placement; the playback camera. */
export function arenaBounds(spec) {
    const pts = [spec.design_placement.position];
    for (const box of spec.arena) {
        pts.push([box.center[0] - box.half_w, box.center[1] - box.half_h], [box.center[0] + box.half_w, box.center[1] + box.half_h]);
    }
    const goal = spec.goal;
    if (goal.kind === "protect")
        pts.push(...goal.zone);
    if (goal.kind === "move")
        pts.push(goal.target);
    if (goal.kind === "cut") {
        pts.push([goal.x_range[0], goal.entry_y - goal.depth], [goal.x_range[1], goal.entry_y + 3]);
    }
    if (goal.kind === "collect")
        pts.push([0, 8.5], [0, goal.kill_plane_y]);
    for (const s of spec.spawn_schedule)
        pts.push(s.position);
    const box = bounds(pts);
    return { x0: box.x0 - 2, y0: box.y0 - 2, x1: box.x1 + 2, y1: box.y1 + 2 };
}
/** One playback frame: design as its brick rectangles posed by the frame's
 * body transform, balls/projectiles as circles from the spawn schedule. */
export function drawFrame(ctx, cam, spec, design, frame) {
    drawArenaAndGoal(ctx, cam, spec);
    const com = chainCom(design);
    const locals = chainRects(design).map((rect) => rect.map((p) => [p[0] - com[0], p[1] - com[1]]));
    let ballCursor = 0;
    for (const body of frame.bodies) {
        if (body.tag === "design") {
            for (const rect of locals) {
                const world = rect.map((p) => {
                    const r = rotate(p, body.angle);
                    return [r[0] + body.pos[0], r[1] + body.pos[1]];
                });
                polygon(ctx, cam, world);
                ctx.fillStyle = "#4a90d9";
                ctx.globalAlpha = 0.85;
                ctx.fill();
                ctx.globalAlpha = 1;
                ctx.strokeStyle = "#1d3f5e";
                ctx.stroke();
            }
        }
        else if (body.tag === "ball" || body.tag === "projectile") {
            const radius = spec.spawn_schedule[ballCursor]?.radius ?? 0.15;
            ballCursor += 1;
            const [x, y] = toCanvas(cam, body.pos);
            ctx.beginPath();
            ctx.arc(x, y, Math.max(2, radius * cam.scale), 0, 2 * Math.PI);
            ctx.fillStyle = body.tag === "ball" ? "#3dbd6e" : "#d94a4a";
            ctx.fill();
        }
    }
}
