/**
 * SVG regret figure: one mean line plus a shaded ±1 std band per input
 * series. No drawing dependencies; the SVG is assembled directly so output
 * is byte-reproducible.
 */

import { parseSummary, SummarySeries } from "./csv.js";

export interface FigureInput {
  label: string;
  /** Path to a summary CSV. */
  path: string;
}

export interface FigureSpec {
  inputs: FigureInput[];
  out: string;
  xLabel?: string;
  yLabel?: string;
  logY?: boolean;
}

export class HorizonMismatchError extends Error {}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 24, right: 24, bottom: 48, left: 72 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

interface Loaded {
  label: string;
  series: SummarySeries;
  color: string;
}

function fmt(value: number): string {
  return Number(value.toPrecision(6)).toString();
}

/** Round-number tick positions covering [0, max]. */
function ticks(max: number, count: number): number[] {
  if (max <= 0) return [0];
  const step = Math.pow(10, Math.floor(Math.log10(max / count)));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => max / s <= count) ?? 10 * step;
  const result: number[] = [];
  for (let v = 0; v <= max + 1e-9; v += chosen) result.push(Number(v.toPrecision(12)));
  return result;
}

export function loadInputs(inputs: FigureInput[]): Loaded[] {
  if (inputs.length === 0) {
    throw new Error("a figure needs at least one input series");
  }
  const loaded = inputs.map((input, i) => ({
    label: input.label,
    series: parseSummary(input.path),
    color: PALETTE[i % PALETTE.length],
  }));
  const horizon = loaded[0].series.rounds.length;
  for (const { series } of loaded.slice(1)) {
    if (series.rounds.length !== horizon) {
      const offender = inputs[loaded.findIndex((l) => l.series === series)];
      throw new HorizonMismatchError(
        `${offender.path}: horizon ${series.rounds.length} does not match ` +
          `${inputs[0].path} (horizon ${horizon})`,
      );
    }
  }
  return loaded;
}

export function renderFigure(spec: FigureSpec): string {
  const loaded = loadInputs(spec.inputs);
  const horizon = loaded[0].series.rounds.length;
  const logY = spec.logY ?? false;

  let yMax = 0;
  for (const { series } of loaded) {
    for (let i = 0; i < horizon; i++) {
      yMax = Math.max(yMax, series.meanRegret[i] + series.stdRegret[i]);
    }
  }
  if (yMax === 0) yMax = 1;
  const yFloor = logY ? Math.max(1e-3, yMax * 1e-4) : 0;

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const x = (round: number) => MARGIN.left + ((round - 1) / Math.max(1, horizon - 1)) * plotW;
  const y = (value: number) => {
    if (logY) {
      const v = Math.max(value, yFloor);
      const t = Math.log(v / yFloor) / Math.log(yMax / yFloor);
      return MARGIN.top + plotH * (1 - t);
    }
    return MARGIN.top + plotH * (1 - value / yMax);
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  // axes and ticks
  const axisY = MARGIN.top + plotH;
  parts.push(
    `<line x1="${MARGIN.left}" y1="${axisY}" x2="${MARGIN.left + plotW}" y2="${axisY}" stroke="black"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${axisY}" stroke="black"/>`,
  );
  for (const tick of ticks(horizon, 6)) {
    if (tick < 1) continue;
    const tx = x(tick);
    parts.push(
      `<line x1="${fmt(tx)}" y1="${axisY}" x2="${fmt(tx)}" y2="${axisY + 5}" stroke="black"/>`,
      `<text x="${fmt(tx)}" y="${axisY + 20}" text-anchor="middle">${tick}</text>`,
    );
  }
  if (!logY) {
    for (const tick of ticks(yMax, 5)) {
      const ty = y(tick);
      parts.push(
        `<line x1="${MARGIN.left - 5}" y1="${fmt(ty)}" x2="${MARGIN.left}" y2="${fmt(ty)}" stroke="black"/>`,
        `<text x="${MARGIN.left - 8}" y="${fmt(ty + 4)}" text-anchor="end">${tick}</text>`,
      );
    }
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 10}" text-anchor="middle">` +
      `${spec.xLabel ?? "round"}</text>`,
    `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">${spec.yLabel ?? "cumulative regret"}</text>`,
  );

  // std bands first so every mean line draws on top
  for (const { series, color } of loaded) {
    const upper = series.rounds.map(
      (r, i) => `${fmt(x(r))},${fmt(y(series.meanRegret[i] + series.stdRegret[i]))}`,
    );
    const lower = series.rounds
      .map((r, i) => `${fmt(x(r))},${fmt(y(Math.max(0, series.meanRegret[i] - series.stdRegret[i])))}`)
      .reverse();
    parts.push(
      `<polygon points="${upper.concat(lower).join(" ")}" fill="${color}" fill-opacity="0.2" stroke="none"/>`,
    );
  }
  for (const { series, color } of loaded) {
    const points = series.rounds.map((r, i) => `${fmt(x(r))},${fmt(y(series.meanRegret[i]))}`);
    parts.push(
      `<polyline points="${points.join(" ")}" fill="none" stroke="${color}" stroke-width="1.5"/>`,
    );
  }

  // legend, in input order
  loaded.forEach(({ label, color }, i) => {
    const ly = MARGIN.top + 8 + i * 18;
    parts.push(
      `<line x1="${MARGIN.left + 12}" y1="${ly}" x2="${MARGIN.left + 40}" y2="${ly}" ` +
        `stroke="${color}" stroke-width="1.5"/>`,
      `<text x="${MARGIN.left + 46}" y="${ly + 4}">${label}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
