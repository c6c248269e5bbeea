/**
 * Reader for the simulator's per-round summary CSV:
 * `round,mean_regret,std_regret,comm_cost`, one row per round, 1..T.
 */

import { readFileSync } from "node:fs";

export interface SummarySeries {
  /** Round indices, 1..T in order. */
  rounds: number[];
  meanRegret: number[];
  stdRegret: number[];
  commCost: number[];
}

export class SchemaError extends Error {}

const HEADER = ["round", "mean_regret", "std_regret", "comm_cost"];

export function parseSummary(path: string): SummarySeries {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${path}: empty file`);
  }
  const header = lines[0].split(",");
  if (header.length !== HEADER.length || !HEADER.every((h, i) => header[i] === h)) {
    throw new SchemaError(
      `${path}: expected header "${HEADER.join(",")}", got "${lines[0]}"`,
    );
  }
  const series: SummarySeries = { rounds: [], meanRegret: [], stdRegret: [], commCost: [] };
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== HEADER.length) {
      throw new SchemaError(`${path}: row ${i + 1} has ${cells.length} fields, expected 4`);
    }
    const values = cells.map(Number);
    if (values.some((v) => Number.isNaN(v))) {
      throw new SchemaError(`${path}: row ${i + 1} contains a non-numeric field`);
    }
    if (values[0] !== i) {
      throw new SchemaError(`${path}: row ${i + 1} has round ${values[0]}, expected ${i}`);
    }
    series.rounds.push(values[0]);
    series.meanRegret.push(values[1]);
    series.stdRegret.push(values[2]);
    series.commCost.push(values[3]);
  }
  if (series.rounds.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return series;
}
