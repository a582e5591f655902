// Episode playback clock: frames play back at the wall-clock rate they were
// simulated at (frame t renders at elapsed time t). Pausing and scrubbing
// reuse the cached frames; nothing is re-requested.
export class Playback {
    frames = [];
    playing = false;
    startedAt = 0; // wall-clock ms when play began
    offset = 0; // seconds into the episode when play began
    load(frames) {
        this.frames = frames;
        this.playing = false;
        this.offset = 0;
    }
    get loaded() {
        return this.frames.length > 0;
    }
    get duration() {
        return this.frames.length > 0 ? this.frames[this.frames.length - 1].t : 0;
    }
    get isPlaying() {
        return this.playing;
    }
    play(now) {
        if (this.frames.length === 0)
            return;
        if (this.offset >= this.duration)
            this.offset = 0;
        this.playing = true;
        this.startedAt = now;
    }
    pause(now) {
        if (!this.playing)
            return;
        this.offset = this.position(now);
        this.playing = false;
    }
    seek(t) {
        this.offset = Math.max(0, Math.min(t, this.duration));
        if (this.playing)
            this.startedAt = 0; // next position() call re-bases
        this.playing = false;
    }
    /** Episode time in seconds at wall-clock `now` (ms). */
    position(now) {
        if (!this.playing)
            return this.offset;
        const t = this.offset + (now - this.startedAt) / 1000;
        if (t >= this.duration) {
            this.playing = false;
            this.offset = this.duration;
            return this.duration;
        }
        return t;
    }
    /** Latest frame at or before episode time t. */
    frameAt(t) {
        if (this.frames.length === 0)
            return null;
        let lo = 0;
        let hi = this.frames.length - 1;
        while (lo < hi) {
            const mid = (lo + hi + 1) >> 1;
            if (this.frames[mid].t <= t)
                lo = mid;
            else
                hi = mid - 1;
        }
        return this.frames[lo];
    }
}
