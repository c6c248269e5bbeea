#!/usr/bin/env node
/**
 * plot — render regret summary CSVs into an SVG figure.
 *
 * Usage:
 *   plot spec.json --out figure.svg
 *   plot --input "DeMABAR=results/demabar/summary.csv" \
 *        --input "IND-UCB=results/ucb/summary.csv" --out figure.svg [--log]
 *
 * A spec file is JSON with the same fields as the flags:
 *   { "inputs": [{"label": ..., "path": ...}], "out": ..., "logY": false }
 */

import { readFileSync, writeFileSync } from "node:fs";
import { FigureInput, FigureSpec, renderFigure } from "./figure.js";

export function parseArgs(argv: string[]): FigureSpec {
  const inputs: FigureInput[] = [];
  let out: string | undefined;
  let logY = false;
  let specFile: string | undefined;

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--input") {
      const value = argv[++i];
      if (value === undefined) throw new Error("--input needs label=path");
      const eq = value.indexOf("=");
      if (eq <= 0) throw new Error(`--input expects label=path, got "${value}"`);
      inputs.push({ label: value.slice(0, eq), path: value.slice(eq + 1) });
    } else if (arg === "--out") {
      out = argv[++i];
      if (out === undefined) throw new Error("--out needs a file path");
    } else if (arg === "--log") {
      logY = true;
    } else if (arg.startsWith("--")) {
      throw new Error(`unknown flag ${arg}`);
    } else if (specFile === undefined) {
      specFile = arg;
    } else {
      throw new Error(`unexpected argument ${arg}`);
    }
  }

  let spec: FigureSpec = { inputs, out: out ?? "", logY };
  if (specFile !== undefined) {
    const fromFile = JSON.parse(readFileSync(specFile, "utf8")) as Partial<FigureSpec>;
    spec = {
      inputs: inputs.length > 0 ? inputs : (fromFile.inputs ?? []),
      out: out ?? fromFile.out ?? "",
      xLabel: fromFile.xLabel,
      yLabel: fromFile.yLabel,
      logY: logY || (fromFile.logY ?? false),
    };
  }
  if (spec.inputs.length === 0) throw new Error("no input series given");
  if (!spec.out) throw new Error("no output file given (--out)");
  return spec;
}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    writeFileSync(spec.out, renderFigure(spec));
    return 0;
  } catch (err) {
    console.error(`plot: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!)) {
  process.exit(main(process.argv.slice(2)));
}
