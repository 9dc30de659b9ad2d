// @vitest-environment jsdom
//
// Live round-trip against the real recommendation service: spawns the
// Python process, drives the typed client, and renders the responses.
import { spawn, type ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderPivotCard } from "../src/pivotCard.js";
import { specKey } from "../src/types.js";

const PORT = 8917 + Math.floor(Math.random() * 80);
const BASE = `http://127.0.0.1:${PORT}`;
const CSV_PATH = join(__dirname, "..", "..", "tests", "data", "employees.csv");

let server: ChildProcess;

async function waitForHealth(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("service did not become healthy in time");
}

beforeAll(async () => {
  server = spawn(
    "python3",
    [
      "-c",
      "import uvicorn; from pivotrec.server import create_app; " +
        `uvicorn.run(create_app(), host='127.0.0.1', port=${PORT}, log_level='warning')`,
    ],
    { stdio: "ignore" }
  );
  await waitForHealth();
}, 40_000);

afterAll(() => {
  server?.kill();
});

describe("live service round trip", () => {
  it("accepting a card excludes it from the next rendered batch", async () => {
    const api = new ApiClient(BASE);
    const csvText = readFileSync(CSV_PATH, "utf-8");

    const datasetId = await api.uploadDataset(csvText);
    const sessionId = await api.createSession(datasetId, { k: 3, theta: 0.1 });

    const first = await api.getRecommendations(sessionId);
    expect(first.batch.length).toBeGreaterThan(0);
    expect(first.diversity).toBeGreaterThanOrEqual(0.1);

    // render the batch; every card carries a grid table
    const cards = first.batch.map((item) => renderPivotCard(item));
    for (const card of cards) {
      expect(card.classList.contains("pivot-card--error")).toBe(false);
      expect(card.querySelector("table.pivot-grid")).not.toBeNull();
    }

    const acceptedItem = first.batch[0]!;
    const rejectedItem = first.batch[1];
    const summary = await api.postFeedback(sessionId, acceptedItem.spec, "accepted");
    expect(summary.accepted_count).toBe(1);
    if (rejectedItem) {
      await api.postFeedback(sessionId, rejectedItem.spec, "rejected");
    }

    // server-confirmed exclusion: the accepted and rejected specs never
    // reappear in the next batch
    const second = await api.getRecommendations(sessionId);
    const secondKeys = second.batch.map((item) => specKey(item.spec));
    expect(secondKeys).not.toContain(specKey(acceptedItem.spec));
    if (rejectedItem) {
      expect(secondKeys).not.toContain(specKey(rejectedItem.spec));
    }
    for (const key of first.batch.map((item) => specKey(item.spec))) {
      expect(secondKeys).not.toContain(key);
    }
  }, 60_000);

  it("feedback on a never-served spec is a 409 conflict", async () => {
    const api = new ApiClient(BASE);
    const csvText = readFileSync(CSV_PATH, "utf-8");
    const datasetId = await api.uploadDataset(csvText);
    const sessionId = await api.createSession(datasetId, { k: 1, theta: 0.0 });
    await expect(
      api.postFeedback(
        sessionId,
        { fn: "MIN", attr: "Age", groups: ["Degree", "Gender"] },
        "accepted"
      )
    ).rejects.toMatchObject({ status: 409 });
  }, 60_000);
});
