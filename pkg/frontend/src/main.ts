// DOM layer: wires the panel state to audio playback, sliders and the API.
// Stimulus identities are never shown; tests are labeled by position only.

import { createSession, stimulusUrl, submitRatingWithRetry } from "./api.js";
import {
  DEFAULT_SCORE,
  MARKER_HIGH,
  MARKER_LOW,
  PanelState,
  SCORE_MAX,
  SCORE_MIN,
  type SessionInfo,
  clearLastSession,
  loadLastSession,
} from "./state.js";

const BASE = "";
const root = document.getElementById("app") as HTMLElement;
const audio = new Audio();
let state: PanelState | null = null;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function showStart(): void {
  root.replaceChildren();
  const box = el("div", "card start");
  box.append(el("h1", undefined, "Source width listening test"));
  box.append(
    el(
      "p",
      "instructions",
      "Use headphones. Rate how wide each test sound feels on a 0–120 scale: " +
        "R10 marks 10, R100 marks 100. You may rate below 10 or above 100. " +
        "Play a sound at least once before submitting its rating.",
    ),
  );
  const form = el("form");
  const input = el("input") as HTMLInputElement;
  input.placeholder = "listener id";
  input.required = true;
  const go = el("button", "primary", "Start") as HTMLButtonElement;
  form.append(input, go);
  box.append(form);

  const last = loadLastSession(window.localStorage);
  if (last) {
    const resume = el("button", undefined, "Resume previous session") as HTMLButtonElement;
    resume.type = "button";
    resume.addEventListener("click", () => {
      state = new PanelState(last, window.localStorage);
      showPanel();
    });
    box.append(resume);
  }

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    go.disabled = true;
    try {
      const session: SessionInfo = await createSession(BASE, input.value.trim());
      state = new PanelState(session, window.localStorage);
      showPanel();
    } catch (err) {
      go.disabled = false;
      alert(`could not start a session: ${String(err)}`);
    }
  });
  root.append(box);
}

function playButton(id: string, label: string): HTMLButtonElement {
  const button = el("button", "play", label) as HTMLButtonElement;
  button.addEventListener("click", () => {
    if (!state) return;
    if (state.playing === id && !audio.paused) {
      audio.pause();
      state.stopPlayback();
      refreshPlayback();
      return;
    }
    state.startPlayback(id); // stops whatever else was playing
    audio.src = stimulusUrl(BASE, state.session.session_id, id);
    void audio.play().catch(() => state?.stopPlayback());
    refreshPlayback();
  });
  button.dataset.stimulus = id;
  return button;
}

function refreshPlayback(): void {
  const playing = state?.playing ?? null;
  document.querySelectorAll<HTMLButtonElement>("button.play").forEach((button) => {
    button.classList.toggle("active", button.dataset.stimulus === playing && !audio.paused);
  });
  document.querySelectorAll<HTMLButtonElement>("button.submit").forEach((button) => {
    const id = button.dataset.stimulus!;
    if (state && !state.isSubmitted(id)) button.disabled = !state.submitCheck(id).ok;
  });
}

function sliderRow(id: string): HTMLElement {
  const row = el("div", "slider-row");
  const slider = el("input") as HTMLInputElement;
  slider.type = "range";
  slider.min = String(SCORE_MIN);
  slider.max = String(SCORE_MAX);
  slider.step = "1";
  slider.value = String(state?.slider(id) ?? DEFAULT_SCORE);
  const value = el("span", "value", slider.value);
  slider.addEventListener("input", () => {
    if (!state) return;
    value.textContent = String(state.setSlider(id, Number(slider.value)));
  });
  const scale = el("div", "scale");
  // reference markers on the rating scale
  for (const [pos, label] of [
    [MARKER_LOW, "R10"],
    [MARKER_HIGH, "R100"],
  ] as const) {
    const mark = el("span", "marker", label);
    mark.style.left = `${(pos / SCORE_MAX) * 100}%`;
    scale.append(mark);
  }
  row.append(slider, scale, value);
  return row;
}

function showPanel(): void {
  const active = state;
  if (!active) return;
  root.replaceChildren();
  const panel = el("div", "card panel");
  panel.append(el("h1", undefined, "Rate the perceived width"));

  const refs = el("div", "references");
  refs.append(el("span", "label", "References:"));
  const names: Record<string, string> = {
    [active.session.references.r10_id]: "R10",
    [active.session.references.r100_id]: "R100",
    [active.session.references.narrow_id]: "NS",
  };
  for (const id of active.referenceIds) refs.append(playButton(id, names[id] ?? id));
  panel.append(refs);

  const list = el("div", "tests");
  active.testIds.forEach((id, index) => {
    const row = el("div", "test-row");
    row.append(el("span", "label", `Test ${index + 1}`));
    row.append(playButton(id, "▶"));
    row.append(sliderRow(id));
    const submit = el("button", "submit", "Submit") as HTMLButtonElement;
    submit.dataset.stimulus = id;
    const status = el("span", "status", active.isSubmitted(id) ? "submitted" : "");
    if (active.isSubmitted(id)) submit.disabled = true;
    submit.addEventListener("click", async () => {
      const panel = state;
      if (!panel) return;
      const check = panel.submitCheck(id);
      if (!check.ok) {
        status.textContent = check.reason === "not-played" ? "play it first" : check.reason;
        return;
      }
      submit.disabled = true;
      status.textContent = "sending…";
      const score = panel.slider(id);
      try {
        await submitRatingWithRetry(BASE, {
          session_id: panel.session.session_id,
          stimulus_id: id,
          score,
        });
        panel.markSubmitted(id, score);
        status.textContent = "submitted";
        if (panel.isComplete()) showDone();
      } catch (err) {
        submit.disabled = false; // slider state is persisted; user can retry
        status.textContent = `failed, retry (${String(err)})`;
      }
    });
    row.append(submit, status);
    list.append(row);
  });
  panel.append(list);
  root.append(panel);
  refreshPlayback();
}

function showDone(): void {
  audio.pause();
  if (state) clearLastSession(window.localStorage);
  root.replaceChildren();
  const box = el("div", "card done");
  box.append(el("h1", undefined, "All done"));
  box.append(el("p", undefined, "Every test stimulus has been rated. Thank you!"));
  root.append(box);
}

audio.addEventListener("ended", () => {
  state?.stopPlayback();
  refreshPlayback();
});

showStart();
