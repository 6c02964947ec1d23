// End-to-end: a scripted listener session against the real Python service.
// Builds a 4-stimulus set with the CLI, starts `serve`, then drives the panel
// protocol (play gate, sliders, submissions) through the typed API client.

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { createSession, fetchResults, stimulusUrl, submitRating } from "../src/api.js";
import { PanelState } from "../src/state.js";

const PYTHON = process.env.ESWIDTH_PYTHON ?? "python3";
const PORT = 8765 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;

let work: string;
let server: ChildProcess | null = null;

function runCli(args: string[]): void {
  const result = spawnSync(PYTHON, ["-m", "eswidth.cli", ...args], { encoding: "utf-8" });
  if (result.status !== 0) {
    throw new Error(`eswidth ${args[0]} failed: ${result.stderr || result.stdout}`);
  }
}

async function waitForServer(timeoutMs = 30000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const resp = await fetch(`${BASE}/api/results`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("service did not come up");
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
}

beforeAll(async () => {
  work = mkdtempSync(join(tmpdir(), "eswidth-e2e-"));
  const bank = join(work, "bank.json");
  runCli(["synth-hrir", "--grid", "5", "--fs", "48000", "-o", bank]);
  const config = {
    seed: 11,
    duration_s: 0.4,
    signals: [
      { name: "w", noise_seed: 1 },
      { name: "x", noise_seed: 2 },
      { name: "y", noise_seed: 3 },
      { name: "z", noise_seed: 4 },
    ],
  };
  writeFileSync(join(work, "config.json"), JSON.stringify(config));
  runCli(["make-stimuli", "--config", join(work, "config.json"), "--bank", bank, "-o", join(work, "stimuli")]);
  server = spawn(
    PYTHON,
    [
      "-m", "eswidth.cli", "serve",
      "--stimuli", join(work, "stimuli"),
      "--results", join(work, "ratings.jsonl"),
      "--port", String(PORT),
      "--seed", "1",
    ],
    { stdio: "ignore" },
  );
  await waitForServer();
}, 60000);

afterAll(() => {
  server?.kill();
  rmSync(work, { recursive: true, force: true });
});

describe("scripted listener session", () => {
  it("completes a 4-stimulus experiment and the server log matches", async () => {
    const session = await createSession(BASE, "e2e-listener");
    expect(session.stimulus_order).toHaveLength(4);
    const state = new PanelState(session);

    // references are streamable WAVs
    const refResp = await fetch(stimulusUrl(BASE, session.session_id, session.references.r100_id));
    expect(refResp.status).toBe(200);
    const head = Buffer.from(await refResp.arrayBuffer()).subarray(0, 4).toString("ascii");
    expect(head).toBe("RIFF");

    // submit-before-playback is blocked
    const first = session.stimulus_order[0];
    expect(state.submitCheck(first)).toEqual({ ok: false, reason: "not-played" });
    await expect(
      (async () => {
        const check = state.submitCheck(first);
        if (!check.ok) throw new Error(check.reason);
        await submitRating(BASE, { session_id: session.session_id, stimulus_id: first, score: 50 });
      })(),
    ).rejects.toThrow("not-played");

    // play each stimulus, set a distinct slider value, submit
    const chosen: Record<string, number> = {};
    for (const [index, id] of session.stimulus_order.entries()) {
      const audioResp = await fetch(stimulusUrl(BASE, session.session_id, id));
      expect(audioResp.status).toBe(200);
      state.startPlayback(id);
      const score = state.setSlider(id, 25 + 20 * index);
      chosen[id] = score;
      const check = state.submitCheck(id);
      expect(check.ok).toBe(true);
      await submitRating(BASE, { session_id: session.session_id, stimulus_id: id, score });
      state.markSubmitted(id, score);
    }
    expect(state.isComplete()).toBe(true);

    // server log contains exactly our four ratings with the slider values
    const results = await fetchResults(BASE);
    const ours = results.ratings.filter((r) => r.session_id === session.session_id);
    expect(ours).toHaveLength(4);
    for (const rating of ours) {
      expect(rating.score).toBe(chosen[rating.stimulus_id]);
    }
  }, 30000);

  it("rejects out-of-range scores with 422", async () => {
    const session = await createSession(BASE, "e2e-bounds");
    const id = session.stimulus_order[0];
    await fetch(stimulusUrl(BASE, session.session_id, id));
    await expect(
      submitRating(BASE, { session_id: session.session_id, stimulus_id: id, score: 125 }),
    ).rejects.toMatchObject({ status: 422 });
  });
});
