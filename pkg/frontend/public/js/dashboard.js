// Live run dashboard state: polls the run view on an interval while the run
// is active, and funnels injections from the editor into the run. The view
// shown is always the most recent poll; injection is disabled once the run
// is done.
export class DashboardState {
    api;
    onUpdate;
    intervalMs;
    view = null;
    selected = null; // population index
    timer = null;
    constructor(api, onUpdate = () => { }, intervalMs = 1000) {
        this.api = api;
        this.onUpdate = onUpdate;
        this.intervalMs = intervalMs;
    }
    get runId() {
        return this.view?.run_id ?? null;
    }
    get injectEnabled() {
        return this.view !== null && this.view.status !== "done";
    }
    async attach(runId) {
        const view = await this.api.run(runId);
        this.view = view;
        this.onUpdate(view);
        return view;
    }
    async poll() {
        if (this.view === null)
            return null;
        const view = await this.api.run(this.view.run_id);
        this.view = view;
        this.onUpdate(view);
        return view;
    }
    startPolling() {
        if (this.timer !== null)
            return;
        this.timer = setInterval(() => {
            void this.poll().catch(() => undefined);
        }, this.intervalMs);
    }
    stopPolling() {
        if (this.timer !== null) {
            clearInterval(this.timer);
            this.timer = null;
        }
    }
    async advance(generations) {
        if (this.view === null)
            throw new Error("no run attached");
        await this.api.advance(this.view.run_id, generations);
    }
    /** Poll until the run has no pending generations (test and script helper). */
    async waitIdle(timeoutMs = 60_000, stepMs = 100) {
        const deadline = Date.now() + timeoutMs;
        for (;;) {
            const view = await this.poll();
            if (view !== null && view.pending_generations === 0)
                return view;
            if (Date.now() > deadline)
                throw new Error("run did not go idle in time");
            await new Promise((r) => setTimeout(r, stepMs));
        }
    }
    async inject(design, actor) {
        if (this.view === null)
            throw new Error("no run attached");
        await this.api.inject(this.view.run_id, design, actor);
        await this.poll();
    }
    /** Genotype of the selected (or best) individual, for copying into the editor. */
    editableGenotype() {
        if (this.view === null)
            return null;
        if (this.selected !== null && this.view.population[this.selected]) {
            return this.view.population[this.selected].genotype;
        }
        return this.view.best.genotype;
    }
}
