/** JSON shapes of the recommendation service. */

export interface PivotSpec {
  fn: string;
  attr: string;
  groups: string[];
}

export interface GridJson {
  spec: PivotSpec;
  row_headers: string[][];
  col_headers: string[][];
  cells: (number | null)[][];
}

export interface ScoreCardJson {
  s_sig: number;
  s_inf: number;
  s_cor: number;
  s_ratio: number;
  s_trend: number;
  s_sur: number;
  insightfulness: number;
  s_den: number;
  s_sem: number;
  s_con: number;
  interpretability: number;
  utility: number;
}

export interface BatchItem {
  spec: PivotSpec;
  grid: GridJson;
  scorecard: ScoreCardJson;
  rank: number;
}

export interface BatchResponse {
  batch: BatchItem[];
  diversity: number;
  exhausted: boolean;
}

export interface SessionConfig {
  k: number;
  theta: number;
  alpha?: number;
  focus_attrs?: string[] | null;
}

export interface SessionSummary {
  session_id: string;
  explored_count: number;
  accepted_count: number;
  rejected_count: number;
}

export type Verdict = "accepted" | "rejected";

export interface HistoryEntry {
  spec: PivotSpec;
  verdict: Verdict;
}

/** Stable identity of a spec, matching the server's canonical key. */
export function specKey(spec: PivotSpec): string {
  return `${spec.fn}(${spec.attr})|${spec.groups.join(",")}`;
}
