import { fetchNextPair, fetchProgress, submitLabel } from './api.js';
// One pair on screen at a time, no client state beyond it: a refresh simply
// reloads the next pending pair from the server. Submissions disable the
// controls while in flight so no gesture can produce two records.
export class AnnotationApp {
    constructor(el, baseUrl = '') {
        this.el = el;
        this.baseUrl = baseUrl;
        this.phase = 'loading';
        this.current = null;
        this.pendingNote = null;
    }
    async start() {
        await this.loadNext();
    }
    async loadNext() {
        this.setPhase('loading');
        try {
            const pair = await fetchNextPair(this.baseUrl);
            if (pair === null) {
                const progress = await fetchProgress(this.baseUrl);
                this.el.progress.textContent = `${progress.labeled} labeled, ${progress.pending} pending`;
                this.setBanner('all pairs labeled, thank you', 'done');
                this.setPhase('done');
                return;
            }
            this.current = pair;
            this.el.program.textContent = pair.program;
            this.el.query.textContent = pair.query;
            this.el.left.textContent = pair.left;
            this.el.right.textContent = pair.right;
            this.el.progress.textContent = `${pair.labeled} labeled, ${pair.pending} pending`;
            if (this.pendingNote !== null) {
                this.setBanner(this.pendingNote, 'note');
                this.pendingNote = null;
            }
            else {
                this.setBanner('', '');
            }
            this.setPhase('pair');
        }
        catch (err) {
            this.showError(`could not reach the annotation service (${String(err)})`);
        }
    }
    async submit(choice) {
        if (this.phase !== 'pair' || this.current === null) {
            return; // ignore gestures while loading, submitting, or done
        }
        const pairId = this.current.pair_id;
        this.setPhase('submitting');
        try {
            const outcome = await submitLabel(pairId, choice, this.baseUrl);
            if (outcome.kind === 'conflict') {
                this.pendingNote = 'already labeled elsewhere, skipping ahead';
            }
            else if (outcome.kind === 'unknown_pair') {
                this.pendingNote = 'pair vanished from the queue, reloading';
            }
            await this.loadNext();
        }
        catch (err) {
            this.showError(`label submission failed (${String(err)})`);
        }
    }
    setPhase(phase) {
        this.phase = phase;
        const interactive = phase === 'pair';
        this.el.buttons.left.disabled = !interactive;
        this.el.buttons.right.disabled = !interactive;
        this.el.buttons.tie.disabled = !interactive;
        this.el.retry.hidden = phase !== 'error';
    }
    setBanner(message, kind) {
        this.el.banner.textContent = message;
        this.el.banner.className = kind === '' ? 'banner' : `banner ${kind}`;
    }
    showError(message) {
        this.setBanner(message, 'error');
        this.setPhase('error');
    }
}
