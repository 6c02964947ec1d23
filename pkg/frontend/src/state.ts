// Panel state for the width-rating experiment. Deliberately DOM-free so the
// whole protocol can be driven headlessly in tests.

export const SCORE_MIN = 0;
export const SCORE_MAX = 120;
export const DEFAULT_SCORE = 60;
export const MARKER_LOW = 10;   // R10 anchor position on the scale
export const MARKER_HIGH = 100; // R100 anchor position on the scale

export interface References {
  r10_id: string;
  r100_id: string;
  narrow_id: string;
}

export interface SessionInfo {
  session_id: string;
  stimulus_order: string[];
  references: References;
}

export type SubmitBlock = "not-played" | "not-a-test" | "already-submitted";
export type SubmitCheck = { ok: true } | { ok: false; reason: SubmitBlock };

// Minimal slice of window.localStorage, injectable for tests.
export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

interface PersistedPanel {
  session: SessionInfo;
  sliders: Record<string, number>;
  submitted: Record<string, number>;
  played: string[];
}

const LAST_SESSION_KEY = "eswidth-panel:last";

export function clampScore(value: number): number {
  if (!Number.isFinite(value)) return DEFAULT_SCORE;
  return Math.min(SCORE_MAX, Math.max(SCORE_MIN, Math.round(value)));
}

export function panelKey(sessionId: string): string {
  return `eswidth-panel:${sessionId}`;
}

/** Restore the descriptor of the most recent unfinished session, if any. */
export function loadLastSession(store: KeyValueStore): SessionInfo | null {
  const raw = store.getItem(LAST_SESSION_KEY);
  if (!raw) return null;
  try {
    return JSON.parse(raw) as SessionInfo;
  } catch {
    return null;
  }
}

export function clearLastSession(store: KeyValueStore): void {
  store.removeItem(LAST_SESSION_KEY);
}

export class PanelState {
  readonly session: SessionInfo;
  private sliders = new Map<string, number>();
  private played = new Set<string>();
  private submitted = new Map<string, number>();
  private nowPlaying: string | null = null;
  private store?: KeyValueStore;

  constructor(session: SessionInfo, store?: KeyValueStore) {
    this.session = session;
    this.store = store;
    for (const id of session.stimulus_order) this.sliders.set(id, DEFAULT_SCORE);
    this.restore();
    this.persist();
  }

  get testIds(): string[] {
    return [...this.session.stimulus_order];
  }

  get referenceIds(): string[] {
    const r = this.session.references;
    return [r.r10_id, r.r100_id, r.narrow_id].filter((id) => id.length > 0);
  }

  isTest(id: string): boolean {
    return this.session.stimulus_order.includes(id);
  }

  slider(id: string): number {
    return this.sliders.get(id) ?? DEFAULT_SCORE;
  }

  setSlider(id: string, value: number): number {
    const clamped = clampScore(value);
    this.sliders.set(id, clamped);
    this.persist();
    return clamped;
  }

  /** Mark playback of `id` starting; returns the stimulus to stop, if any. */
  startPlayback(id: string): string | null {
    const previous = this.nowPlaying;
    this.nowPlaying = id;
    this.played.add(id);
    this.persist();
    return previous !== id ? previous : null;
  }

  stopPlayback(): void {
    this.nowPlaying = null;
  }

  get playing(): string | null {
    return this.nowPlaying;
  }

  hasPlayed(id: string): boolean {
    return this.played.has(id);
  }

  submitCheck(id: string): SubmitCheck {
    if (!this.isTest(id)) return { ok: false, reason: "not-a-test" };
    if (!this.played.has(id)) return { ok: false, reason: "not-played" };
    return { ok: true };
  }

  markSubmitted(id: string, score: number): void {
    this.submitted.set(id, score);
    this.persist();
  }

  isSubmitted(id: string): boolean {
    return this.submitted.has(id);
  }

  submittedScore(id: string): number | undefined {
    return this.submitted.get(id);
  }

  isComplete(): boolean {
    return this.session.stimulus_order.every((id) => this.submitted.has(id));
  }

  remaining(): number {
    return this.session.stimulus_order.filter((id) => !this.submitted.has(id)).length;
  }

  private persist(): void {
    if (!this.store) return;
    const doc: PersistedPanel = {
      session: this.session,
      sliders: Object.fromEntries(this.sliders),
      submitted: Object.fromEntries(this.submitted),
      played: [...this.played],
    };
    this.store.setItem(panelKey(this.session.session_id), JSON.stringify(doc));
    if (this.isComplete()) {
      this.store.removeItem(LAST_SESSION_KEY);
    } else {
      this.store.setItem(LAST_SESSION_KEY, JSON.stringify(this.session));
    }
  }

  private restore(): void {
    if (!this.store) return;
    const raw = this.store.getItem(panelKey(this.session.session_id));
    if (!raw) return;
    try {
      const doc = JSON.parse(raw) as PersistedPanel;
      for (const [id, v] of Object.entries(doc.sliders ?? {})) {
        if (this.sliders.has(id)) this.sliders.set(id, clampScore(v));
      }
      for (const [id, v] of Object.entries(doc.submitted ?? {})) {
        this.submitted.set(id, v);
      }
      for (const id of doc.played ?? []) this.played.add(id);
    } catch {
      // corrupted persistence: start clean rather than failing the session
    }
  }
}
