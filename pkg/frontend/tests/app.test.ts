// @vitest-environment jsdom
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionApp } from "../src/app.js";
import { parseCsvHeader } from "../src/app.js";
import type { BatchItem } from "../src/types.js";
import { specKey } from "../src/types.js";
import { avgSalaryItem, scorecard } from "./fixtures.js";

function makePool(): BatchItem[] {
  const groupsOptions = [
    ["Degree", "Department"],
    ["Degree", "Gender"],
    ["Department", "Gender"],
    ["Age", "Department"],
    ["Experience", "Gender"],
  ];
  return groupsOptions.map((groups, i) => ({
    spec: { fn: "AVG", attr: "Salary", groups },
    grid: {
      spec: { fn: "AVG", attr: "Salary", groups },
      row_headers: [["a"], ["b"]],
      col_headers: [["x"], ["y"]],
      cells: [
        [1, 2],
        [3, null],
      ],
    },
    scorecard,
    rank: i + 1,
  }));
}

/** In-memory stand-in for the service: serves k unexplored pool items per
 * GET, marks them explored, 409s feedback on never-served specs. */
class FakeServer {
  explored = new Set<string>();
  verdicts = new Map<string, string>();
  pool = makePool();
  k = 2;
  feedbackCalls: string[] = [];

  private json(body: unknown, status = 200): Response {
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  }

  private error(status: number, code: string, message: string): Response {
    return this.json({ error: { code, message } }, status);
  }

  async handle(url: string, init?: RequestInit): Promise<Response> {
    const method = init?.method ?? "GET";
    if (url === "/datasets" && method === "POST") {
      return this.json({ dataset_id: "ds1" }, 201);
    }
    if (url === "/sessions" && method === "POST") {
      const body = JSON.parse(String(init?.body));
      this.k = body.config.k ?? 2;
      return this.json({ session_id: "s1" }, 201);
    }
    if (url === "/sessions/s1/recommendations" && method === "GET") {
      const fresh = this.pool.filter((item) => !this.explored.has(specKey(item.spec)));
      const batch = fresh.slice(0, this.k).map((item, i) => ({ ...item, rank: i + 1 }));
      for (const item of batch) this.explored.add(specKey(item.spec));
      return this.json({
        batch,
        diversity: batch.length > 1 ? 0.4 : 1.0,
        exhausted: batch.length < this.k,
      });
    }
    if (url === "/sessions/s1/feedback" && method === "POST") {
      const body = JSON.parse(String(init?.body));
      const key = specKey(body.spec);
      this.feedbackCalls.push(key);
      if (!this.explored.has(key)) {
        return this.error(409, "bad_request", "never recommended");
      }
      this.verdicts.set(key, body.verdict);
      return this.json({
        session_id: "s1",
        explored_count: this.explored.size,
        accepted_count: [...this.verdicts.values()].filter((v) => v === "accepted").length,
        rejected_count: [...this.verdicts.values()].filter((v) => v === "rejected").length,
      });
    }
    return this.error(404, "not_found", `no route ${method} ${url}`);
  }
}

const CSV = "ID,Gender,Age,Degree,Department,Salary\n1,Male,48,PhD,IT,50000\n";

describe("SessionApp", () => {
  let server: FakeServer;
  let app: SessionApp;

  beforeEach(() => {
    server = new FakeServer();
    vi.stubGlobal("fetch", (url: string, init?: RequestInit) =>
      server.handle(String(url), init)
    );
    document.body.innerHTML = '<main id="app"></main>';
    app = new SessionApp(new ApiClient(""));
    app.mount(document.getElementById("app")!);
  });

  afterEach(() => {
    vi.unstubAllGlobals();
  });

  it("parses csv headers for the focus selector", () => {
    expect(parseCsvHeader(CSV)).toEqual([
      "ID", "Gender", "Age", "Degree", "Department", "Salary",
    ]);
    expect(parseCsvHeader('a,"b,c",d\n1,2,3')).toEqual(["a", "b,c", "d"]);
  });

  it("runs the loop: upload, session, batch, verdict, next batch excludes", async () => {
    await app.uploadDataset(CSV);
    expect(app.state.datasetId).toBe("ds1");
    expect(app.state.attributes).toContain("Department");

    await app.startSession({ k: 2, theta: 0.2, alpha: 0.5 });
    expect(app.state.sessionId).toBe("s1");
    expect(app.state.batch).toHaveLength(2);
    const firstBatchKeys = app.batchSpecs().map(specKey);

    // cards are in the DOM
    expect(document.querySelectorAll(".pivot-card")).toHaveLength(2);

    // accept the first card: optimistic removal, then server-confirmed
    const accepted = app.state.batch[0]!;
    const pending = app.handleVerdict(accepted, "accepted");
    expect(app.state.batch).toHaveLength(1);  // removed before the call returns
    expect(document.querySelectorAll(".pivot-card")).toHaveLength(1);
    await pending;
    expect(server.verdicts.get(specKey(accepted.spec))).toBe("accepted");
    expect(app.state.history).toEqual([
      { spec: accepted.spec, verdict: "accepted" },
    ]);

    // next batch comes from the server with everything shown so far excluded
    const next = await app.loadNextBatch();
    expect(next).not.toBeNull();
    const nextKeys = app.batchSpecs().map(specKey);
    for (const key of nextKeys) {
      expect(firstBatchKeys).not.toContain(key);
    }
    expect(document.querySelectorAll(".pivot-card")).toHaveLength(2);
  });

  it("restores the card when the server rejects feedback", async () => {
    await app.uploadDataset(CSV);
    await app.startSession({ k: 2, theta: 0.2 });

    const foreign: BatchItem = {
      ...avgSalaryItem,
      spec: { fn: "MIN", attr: "Age", groups: ["Gender", "Degree"] },
    };
    app.state.batch.push(foreign);  // shown locally but unknown to the server
    app.renderBatch();
    const before = app.state.batch.length;

    await app.handleVerdict(foreign, "accepted");
    expect(app.state.batch).toHaveLength(before);  // restored after the 409
    expect(app.state.history.map((h) => specKey(h.spec))).not.toContain(
      specKey(foreign.spec)
    );
    expect(app.state.notice).toContain("feedback failed");
  });

  it("queues feedback calls FIFO", async () => {
    await app.uploadDataset(CSV);
    await app.startSession({ k: 2, theta: 0.2 });
    const [first, second] = [...app.state.batch];
    const p1 = app.handleVerdict(first!, "accepted");
    const p2 = app.handleVerdict(second!, "rejected");
    await Promise.all([p1, p2]);
    expect(server.feedbackCalls).toEqual([
      specKey(first!.spec),
      specKey(second!.spec),
    ]);
  });

  it("shows the exhausted flag once the pool is drained", async () => {
    await app.uploadDataset(CSV);
    await app.startSession({ k: 4, theta: 0.0 });
    await app.loadNextBatch();
    await app.loadNextBatch();
    expect(app.state.exhausted).toBe(true);
    expect(document.getElementById("batch-meta")!.textContent).toContain("exhausted");
  });
});
