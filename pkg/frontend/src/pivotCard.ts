/** A recommendation card: canonical grid, score badges, verdict buttons. */

import type { BatchItem, ScoreCardJson, Verdict } from "./types.js";

export interface CardHandlers {
  onVerdict?: (item: BatchItem, verdict: Verdict) => void;
}

function formatCell(value: number | null): string {
  if (value === null) return "null";
  if (Number.isInteger(value)) return String(value);
  return value.toLocaleString("en-US", { maximumFractionDigits: 2 });
}

function queryLabel(item: BatchItem): string {
  const { fn, attr, groups } = item.spec;
  return `${fn}(${attr}) by ${groups.join(", ")}`;
}

/** The insight channel that actually drives the insightfulness max. */
export function dominantChannel(card: ScoreCardJson): string {
  const channels: Array<[string, number]> = [
    ["informativeness", card.s_inf],
    ["trend", card.s_trend],
    ["surprise", card.s_sur],
  ];
  channels.sort((a, b) => b[1] - a[1]);
  const top = channels[0];
  return top && top[1] > 0 ? top[0] : "none";
}

function gridTable(item: BatchItem): HTMLTableElement {
  const grid = item.grid;
  const table = document.createElement("table");
  table.className = "pivot-grid";

  const thead = document.createElement("thead");
  const headRow = document.createElement("tr");
  const corner = document.createElement("th");
  corner.textContent = item.spec.groups.slice(0, grid.row_headers[0]?.length ?? 1).join(" x ");
  headRow.appendChild(corner);
  for (const header of grid.col_headers) {
    const th = document.createElement("th");
    th.textContent = header.join(" / ");
    headRow.appendChild(th);
  }
  thead.appendChild(headRow);
  table.appendChild(thead);

  const tbody = document.createElement("tbody");
  grid.row_headers.forEach((header, i) => {
    const tr = document.createElement("tr");
    const th = document.createElement("th");
    th.textContent = header.join(" / ");
    tr.appendChild(th);
    const row = grid.cells[i] ?? [];
    grid.col_headers.forEach((_, j) => {
      const td = document.createElement("td");
      const value = row[j] ?? null;
      td.textContent = formatCell(value);
      td.className = value === null ? "cell cell--null" : "cell";
      tr.appendChild(td);
    });
    tbody.appendChild(tr);
  });
  table.appendChild(tbody);
  return table;
}

function badge(label: string, value: number, extra = ""): HTMLElement {
  const span = document.createElement("span");
  span.className = `badge ${extra}`.trim();
  span.textContent = `${label} ${value.toFixed(2)}`;
  return span;
}

function scorePanel(card: ScoreCardJson): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "score-panel";

  const composites = document.createElement("div");
  composites.className = "score-composites";
  composites.appendChild(badge("utility", card.utility, "badge--utility"));
  composites.appendChild(badge("insight", card.insightfulness));
  composites.appendChild(badge("interpret", card.interpretability));
  const channel = document.createElement("span");
  channel.className = "badge badge--channel";
  channel.textContent = `driven by ${dominantChannel(card)}`;
  composites.appendChild(channel);
  panel.appendChild(composites);

  const subs = document.createElement("div");
  subs.className = "score-subs";
  const parts: Array<[string, number]> = [
    ["sig", card.s_sig], ["inf", card.s_inf], ["cor", card.s_cor],
    ["ratio", card.s_ratio], ["sur", card.s_sur], ["den", card.s_den],
    ["sem", card.s_sem], ["con", card.s_con],
  ];
  for (const [label, value] of parts) {
    subs.appendChild(badge(label, value, "badge--sub"));
  }
  panel.appendChild(subs);
  return panel;
}

export function renderErrorCard(message: string): HTMLElement {
  const card = document.createElement("article");
  card.className = "pivot-card pivot-card--error";
  const body = document.createElement("p");
  body.textContent = `could not render recommendation: ${message}`;
  card.appendChild(body);
  return card;
}

/**
 * Render one recommendation. Malformed payloads produce an error card
 * instead of throwing, so one bad item never takes down the batch view.
 */
export function renderPivotCard(
  item: BatchItem,
  handlers: CardHandlers = {}
): HTMLElement {
  try {
    if (!item || !item.spec || !item.grid || !item.scorecard) {
      throw new Error("missing spec, grid, or scorecard");
    }
    if (!Array.isArray(item.grid.cells) || !Array.isArray(item.grid.row_headers)) {
      throw new Error("grid is not tabular");
    }
    const card = document.createElement("article");
    card.className = "pivot-card";
    card.dataset.rank = String(item.rank);

    const title = document.createElement("h3");
    title.textContent = `${item.rank}. ${queryLabel(item)}`;
    card.appendChild(title);

    card.appendChild(gridTable(item));
    card.appendChild(scorePanel(item.scorecard));

    const actions = document.createElement("div");
    actions.className = "card-actions";
    for (const verdict of ["accepted", "rejected"] as const) {
      const button = document.createElement("button");
      button.type = "button";
      button.className = `verdict verdict--${verdict}`;
      button.textContent = verdict === "accepted" ? "Accept" : "Reject";
      button.addEventListener("click", () => handlers.onVerdict?.(item, verdict));
      actions.appendChild(button);
    }
    card.appendChild(actions);
    return card;
  } catch (error) {
    return renderErrorCard(error instanceof Error ? error.message : String(error));
  }
}
