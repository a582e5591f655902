// Server-authoritative chain editor. Gestures map to exactly one action from
// the shared vocabulary; every angle is snapped to the 15-degree grid before
// it reaches the wire. The client chain is always the chain returned by the
// latest successful append: a rejected append leaves it untouched. Appends
// are queued one-in-flight to preserve the log's sequence order.
import { ApiCallError } from "./api.js";
import { ANGLE_STEP, MAX_BRICKS, headings, snapAngle, wrapIndex } from "./geometry.js";
export class EditorController {
    api;
    actor;
    events;
    chain = null;
    selected = null;
    sessionId = null;
    lastResult = null;
    queue = [];
    draining = null;
    constructor(api, actor, events = {}) {
        this.api = api;
        this.actor = actor;
        this.events = events;
    }
    async open(challengeId) {
        const { session_id } = await this.api.createSession(this.actor, challengeId);
        this.sessionId = session_id;
        this.chain = null;
        this.selected = null;
        this.lastResult = null;
        return session_id;
    }
    /** Map a gesture to its single action, or null when the gesture is not
     * legal on the current chain (callers disable those controls). */
    gestureToAction(gesture) {
        const chain = this.chain;
        if (gesture.kind === "add") {
            if (chain !== null && chain.angles.length >= MAX_BRICKS)
                return null;
            let rel;
            if (chain === null || gesture.end === "head") {
                // a head brick's angle is the chain's new absolute heading
                rel = snapAngle(gesture.worldAngle);
            }
            else {
                const hs = headings(chain);
                rel = snapAngle(gesture.worldAngle - hs[hs.length - 1]);
            }
            return { type: "add", end: chain === null ? "tail" : gesture.end, rel_angle: rel };
        }
        if (chain === null)
            return null;
        if (gesture.kind === "delete") {
            // the vocabulary removes from the ends only
            if (gesture.index === 0)
                return { type: "remove", end: "head" };
            if (gesture.index === chain.angles.length - 1)
                return { type: "remove", end: "tail" };
            return null;
        }
        if (gesture.index < 0 || gesture.index >= chain.angles.length)
            return null;
        const hs = headings(chain);
        const prev = gesture.index === 0 ? 0 : hs[gesture.index - 1];
        const rel = snapAngle(gesture.worldAngle - prev);
        if (relEquals(rel, chain.angles[gesture.index]))
            return null; // no-op drag
        return { type: "rotate", index: gesture.index, new_rel_angle: rel };
    }
    /** Enqueue a gesture; resolves once the server accepted or rejected it. */
    apply(gesture) {
        const action = this.gestureToAction(gesture);
        if (action === null)
            return Promise.resolve();
        return this.submit(action);
    }
    submit(action) {
        this.queue.push(action);
        if (this.draining === null) {
            this.draining = this.drain();
        }
        return this.draining;
    }
    async drain() {
        try {
            while (this.queue.length > 0) {
                const action = this.queue.shift();
                if (this.sessionId === null)
                    throw new Error("no open session");
                try {
                    const { chain } = await this.api.appendAction(this.sessionId, action);
                    this.chain = chain;
                    if (this.selected !== null && (chain === null || this.selected >= chain.angles.length)) {
                        this.selected = null;
                    }
                    this.events.onChange?.(chain);
                }
                catch (err) {
                    if (err instanceof ApiCallError) {
                        this.events.onReject?.(err, action); // chain untouched
                    }
                    else {
                        throw err;
                    }
                }
            }
        }
        finally {
            this.draining = null;
        }
    }
    /** Load a genotype (e.g. a population individual) as a fresh session by
     * replaying its angles as tail adds. */
    async loadDesign(challengeId, design) {
        await this.open(challengeId);
        let heading = 0;
        for (let i = 0; i < design.angles.length; i++) {
            const k = Math.round(design.angles[i] / ANGLE_STEP);
            heading = i === 0 ? wrapIndex(k) : wrapIndex(heading + k);
            await this.submit({ type: "add", end: "tail", rel_angle: wrapIndex(k) * ANGLE_STEP });
        }
    }
    async evaluate(challengeId, seed, frames = true) {
        if (this.chain === null)
            throw new Error("empty chain");
        const result = await this.api.evaluate(challengeId, this.chain, seed, frames);
        this.lastResult = result;
        return result;
    }
}
function relEquals(a, b) {
    return wrapIndex(Math.round((a - b) / ANGLE_STEP)) === 0;
}
