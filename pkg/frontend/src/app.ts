/** Session controller for the adaptive recommendation loop.
 *
 * UI state is a projection of server session state plus in-flight
 * optimistic edits: verdicts remove the card immediately and are queued
 * FIFO to the service; a rejected call restores the card. Every shown
 * pivot is excluded from later batches by the server itself.
 */

import { ApiClient, ApiError } from "./api.js";
import { renderPivotCard } from "./pivotCard.js";
import type {
  BatchItem,
  BatchResponse,
  HistoryEntry,
  PivotSpec,
  Verdict,
} from "./types.js";
import { specKey } from "./types.js";

interface AppState {
  datasetId: string | null;
  attributes: string[];
  sessionId: string | null;
  batch: BatchItem[];
  history: HistoryEntry[];
  diversity: number | null;
  exhausted: boolean;
  busy: boolean;
  notice: string;
}

export function parseCsvHeader(csvText: string): string[] {
  const firstLine = csvText.split(/\r?\n/, 1)[0] ?? "";
  const names: string[] = [];
  let current = "";
  let quoted = false;
  for (const ch of firstLine) {
    if (ch === '"') quoted = !quoted;
    else if (ch === "," && !quoted) {
      names.push(current.trim());
      current = "";
    } else current += ch;
  }
  names.push(current.trim());
  return names.filter((n) => n.length > 0 || names.length === 1);
}

export class SessionApp {
  readonly state: AppState = {
    datasetId: null,
    attributes: [],
    sessionId: null,
    batch: [],
    history: [],
    diversity: null,
    exhausted: false,
    busy: false,
    notice: "",
  };

  private root: HTMLElement | null = null;
  private feedbackQueue: Promise<void> = Promise.resolve();

  constructor(private readonly api: ApiClient) {}

  mount(root: HTMLElement): void {
    this.root = root;
    root.innerHTML = `
      <section class="panel" id="upload-panel">
        <h2>1. Dataset</h2>
        <textarea id="csv-input" rows="6"
          placeholder="Paste CSV with a header row"></textarea>
        <input type="file" id="csv-file" accept=".csv,text/csv">
        <button id="upload-btn" type="button">Upload</button>
        <span id="upload-status"></span>
      </section>
      <section class="panel" id="config-panel" hidden>
        <h2>2. Session</h2>
        <label>budget k <input type="range" id="cfg-k" min="1" max="10" value="5">
          <output id="cfg-k-out">5</output></label>
        <label>diversity θ <input type="range" id="cfg-theta" min="0" max="100" value="20">
          <output id="cfg-theta-out">0.20</output></label>
        <label>insight weight α <input type="range" id="cfg-alpha" min="0" max="100" value="50">
          <output id="cfg-alpha-out">0.50</output></label>
        <label>focus attributes
          <select id="cfg-focus" multiple size="5"></select></label>
        <button id="start-btn" type="button">Start session</button>
        <span class="hint">starting again applies new settings to a fresh session</span>
      </section>
      <section class="panel" id="batch-panel" hidden>
        <h2>3. Recommendations</h2>
        <div id="batch-meta"></div>
        <div id="batch-cards"></div>
        <button id="next-btn" type="button" disabled>Next batch</button>
      </section>
      <section class="panel" id="history-panel" hidden>
        <h2>History</h2>
        <ul id="history-list"></ul>
      </section>
      <div id="notice" role="status"></div>
    `;

    this.el<HTMLButtonElement>("upload-btn").addEventListener("click", () => {
      void this.handleUploadClick();
    });
    this.el<HTMLInputElement>("csv-file").addEventListener("change", (event) => {
      const input = event.target as HTMLInputElement;
      const file = input.files?.[0];
      if (!file) return;
      void file.text().then((text) => {
        this.el<HTMLTextAreaElement>("csv-input").value = text;
      });
    });
    this.el<HTMLButtonElement>("start-btn").addEventListener("click", () => {
      void this.startSession();
    });
    this.el<HTMLButtonElement>("next-btn").addEventListener("click", () => {
      void this.loadNextBatch();
    });
    for (const [id, out, scale] of [
      ["cfg-k", "cfg-k-out", 1],
      ["cfg-theta", "cfg-theta-out", 0.01],
      ["cfg-alpha", "cfg-alpha-out", 0.01],
    ] as const) {
      const input = this.el<HTMLInputElement>(id);
      input.addEventListener("input", () => {
        const value = Number(input.value) * scale;
        this.el<HTMLOutputElement>(out).textContent =
          scale === 1 ? String(value) : value.toFixed(2);
      });
    }
  }

  private el<T extends HTMLElement>(id: string): T {
    const found = this.root?.querySelector(`#${id}`);
    if (!found) throw new Error(`missing element #${id}`);
    return found as T;
  }

  private notify(message: string): void {
    this.state.notice = message;
    if (this.root) this.el<HTMLElement>("notice").textContent = message;
  }

  private async handleUploadClick(): Promise<void> {
    const csvText = this.el<HTMLTextAreaElement>("csv-input").value;
    if (!csvText.trim()) {
      this.notify("paste or choose a CSV first");
      return;
    }
    await this.uploadDataset(csvText);
  }

  async uploadDataset(csvText: string): Promise<void> {
    this.state.busy = true;
    try {
      this.state.datasetId = await this.api.uploadDataset(csvText);
      this.state.attributes = parseCsvHeader(csvText);
      this.state.sessionId = null;
      this.state.batch = [];
      this.state.history = [];
      this.notify(`dataset uploaded (${this.state.attributes.length} attributes)`);
      if (this.root) {
        this.el<HTMLElement>("config-panel").hidden = false;
        this.el<HTMLElement>("upload-status").textContent = "uploaded";
        const select = this.el<HTMLSelectElement>("cfg-focus");
        select.innerHTML = "";
        for (const name of this.state.attributes) {
          const option = document.createElement("option");
          option.value = name;
          option.textContent = name;
          select.appendChild(option);
        }
      }
    } catch (error) {
      this.notify(this.describe(error));
    } finally {
      this.state.busy = false;
    }
  }

  private configFromControls(): {
    k: number;
    theta: number;
    alpha: number;
    focus_attrs: string[] | null;
  } {
    if (!this.root) return { k: 5, theta: 0.2, alpha: 0.5, focus_attrs: null };
    const focus = Array.from(
      this.el<HTMLSelectElement>("cfg-focus").selectedOptions
    ).map((o) => o.value);
    return {
      k: Number(this.el<HTMLInputElement>("cfg-k").value),
      theta: Number(this.el<HTMLInputElement>("cfg-theta").value) / 100,
      alpha: Number(this.el<HTMLInputElement>("cfg-alpha").value) / 100,
      focus_attrs: focus.length ? focus : null,
    };
  }

  async startSession(config?: {
    k: number;
    theta: number;
    alpha?: number;
    focus_attrs?: string[] | null;
  }): Promise<void> {
    if (!this.state.datasetId) {
      this.notify("upload a dataset first");
      return;
    }
    const effective = config ?? this.configFromControls();
    this.state.busy = true;
    try {
      this.state.sessionId = await this.api.createSession(
        this.state.datasetId,
        effective
      );
      this.state.batch = [];
      this.state.history = [];
      this.state.exhausted = false;
      this.notify("session started");
      await this.loadNextBatch();
    } catch (error) {
      this.notify(this.describe(error));
      this.state.busy = false;
    }
  }

  /** Fetch the next batch; the server never repeats an explored pivot. */
  async loadNextBatch(): Promise<BatchResponse | null> {
    if (!this.state.sessionId) return null;
    this.state.busy = true;
    try {
      const response = await this.api.getRecommendations(this.state.sessionId);
      this.state.batch = response.batch;
      this.state.diversity = response.diversity;
      this.state.exhausted = response.exhausted;
      this.renderBatch();
      return response;
    } catch (error) {
      this.notify(this.describe(error));
      return null;
    } finally {
      this.state.busy = false;
    }
  }

  /** Optimistic accept/reject: the card leaves the batch immediately and
   * the call is queued; a server rejection restores the card. */
  handleVerdict(item: BatchItem, verdict: Verdict): Promise<void> {
    const index = this.state.batch.findIndex(
      (b) => specKey(b.spec) === specKey(item.spec)
    );
    if (index >= 0) this.state.batch.splice(index, 1);
    const entry: HistoryEntry = { spec: item.spec, verdict };
    this.state.history.push(entry);
    this.renderBatch();

    const sessionId = this.state.sessionId;
    if (!sessionId) return Promise.resolve();
    this.feedbackQueue = this.feedbackQueue.then(async () => {
      try {
        await this.api.postFeedback(sessionId, item.spec, verdict);
      } catch (error) {
        // undo the optimistic edit
        const at = this.state.history.indexOf(entry);
        if (at >= 0) this.state.history.splice(at, 1);
        this.state.batch.splice(Math.min(index < 0 ? 0 : index, this.state.batch.length), 0, item);
        this.renderBatch();
        this.notify(`feedback failed: ${this.describe(error)}`);
      }
    });
    return this.feedbackQueue;
  }

  batchSpecs(): PivotSpec[] {
    return this.state.batch.map((item) => item.spec);
  }

  private describe(error: unknown): string {
    if (error instanceof ApiError) return `${error.code}: ${error.message}`;
    return error instanceof Error ? error.message : String(error);
  }

  renderBatch(): void {
    if (!this.root) return;
    this.el<HTMLElement>("batch-panel").hidden = false;
    this.el<HTMLElement>("history-panel").hidden = false;

    const meta = this.el<HTMLElement>("batch-meta");
    const diversity =
      this.state.diversity === null ? "-" : this.state.diversity.toFixed(3);
    meta.textContent = this.state.exhausted
      ? `diversity ${diversity} — candidate space exhausted`
      : `diversity ${diversity}`;

    const cards = this.el<HTMLElement>("batch-cards");
    cards.innerHTML = "";
    for (const item of this.state.batch) {
      cards.appendChild(
        renderPivotCard(item, {
          onVerdict: (card, verdict) => void this.handleVerdict(card, verdict),
        })
      );
    }
    if (this.state.batch.length === 0 && !this.state.exhausted) {
      const empty = document.createElement("p");
      empty.textContent = "no cards left — request the next batch";
      cards.appendChild(empty);
    }
    this.el<HTMLButtonElement>("next-btn").disabled = this.state.sessionId === null;

    const history = this.el<HTMLElement>("history-list");
    history.innerHTML = "";
    for (const entry of this.state.history) {
      const li = document.createElement("li");
      li.className = `history history--${entry.verdict}`;
      li.textContent = `${entry.verdict === "accepted" ? "✓" : "✗"} ${specKey(entry.spec)}`;
      history.appendChild(li);
    }
  }
}
