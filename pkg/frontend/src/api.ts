// Thin typed client for the experiment service.

import type { SessionInfo } from "./state.js";

export interface RatingBody {
  session_id: string;
  stimulus_id: string;
  score: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function detail(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { detail?: string };
    return body.detail ?? resp.statusText;
  } catch {
    return resp.statusText;
  }
}

export async function createSession(base: string, listenerId: string): Promise<SessionInfo> {
  const resp = await fetch(`${base}/api/session`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ listener_id: listenerId }),
  });
  if (resp.status !== 201) throw new ApiError(resp.status, await detail(resp));
  return (await resp.json()) as SessionInfo;
}

export function stimulusUrl(base: string, sessionId: string, stimulusId: string): string {
  return `${base}/api/stimulus/${encodeURIComponent(sessionId)}/${encodeURIComponent(stimulusId)}`;
}

export async function submitRating(base: string, body: RatingBody): Promise<void> {
  const resp = await fetch(`${base}/api/rating`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  if (resp.status !== 204) throw new ApiError(resp.status, await detail(resp));
}

/** Retry transient failures; server-side rejections (4xx) surface immediately. */
export async function submitRatingWithRetry(
  base: string,
  body: RatingBody,
  attempts = 3,
  delayMs = 400,
): Promise<void> {
  let lastError: unknown;
  for (let i = 0; i < attempts; i++) {
    try {
      await submitRating(base, body);
      return;
    } catch (err) {
      if (err instanceof ApiError && err.status < 500) throw err;
      lastError = err;
      await new Promise((resolve) => setTimeout(resolve, delayMs * (i + 1)));
    }
  }
  throw lastError;
}

export async function fetchResults(base: string): Promise<{ ratings: RatingBody[] }> {
  const resp = await fetch(`${base}/api/results`);
  if (!resp.ok) throw new ApiError(resp.status, await detail(resp));
  return (await resp.json()) as { ratings: RatingBody[] };
}
