import type { BatchItem, ScoreCardJson } from "../src/types.js";

export const scorecard: ScoreCardJson = {
  s_sig: 1.0,
  s_inf: 0.32,
  s_cor: 0.39,
  s_ratio: 0.38,
  s_trend: 0.39,
  s_sur: 0.0,
  insightfulness: 0.39,
  s_den: 1.0,
  s_sem: 1.0,
  s_con: 0.82,
  interpretability: 0.94,
  utility: 0.67,
};

/** Average salary by degree and department: the canonical 3x2 grid. */
export const avgSalaryItem: BatchItem = {
  spec: { fn: "AVG", attr: "Salary", groups: ["Degree", "Department"] },
  grid: {
    spec: { fn: "AVG", attr: "Salary", groups: ["Degree", "Department"] },
    row_headers: [["BS"], ["MS"], ["PhD"]],
    col_headers: [["IT"], ["Sales"]],
    cells: [
      [200000, 100000],
      [300000, 200000],
      [900000, 400000],
    ],
  },
  scorecard,
  rank: 1,
};

/** Sparse counts: one null cell and one true zero, side by side. */
export const sparseItem: BatchItem = {
  spec: { fn: "SUM", attr: "Bonus", groups: ["Degree", "Department"] },
  grid: {
    spec: { fn: "SUM", attr: "Bonus", groups: ["Degree", "Department"] },
    row_headers: [["BS"], ["MS"]],
    col_headers: [["IT"], ["Sales"]],
    cells: [
      [0, null],
      [null, 120],
    ],
  },
  scorecard: { ...scorecard, s_den: 0.5, s_sur: 0.8, s_trend: 0.1, s_inf: 0.2 },
  rank: 2,
};
