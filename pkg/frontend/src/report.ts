import { readdirSync, writeFileSync, mkdirSync } from "fs";
import { basename, join } from "path";

import { column, numericColumn, readCsv, Table } from "./csv";
import { buildBins, FigureSpec, renderPng, renderSvg } from "./figure";

/** Map a recognized CSV schema onto its default figure. */
export function specForCsv(path: string): FigureSpec | null {
  const { table } = readCsv(path);
  const header = table.header.join(",");
  const name = basename(path, ".csv");
  if (header === "file,sha256,master_seed,config_hash") {
    return null; // manifest: metadata, nothing to plot
  }
  if (table.header[0] === "coord") {
    const coords = numericColumn(table, "coord", path);
    if (coords.length < 2) throw new Error(`${path}: need at least 2 points`);
    const gaps = coords.slice(1).map((v, i) => v - coords[i]);
    return {
      kind: "histogram",
      title: `${name}: gap lengths`,
      xLabel: "gap",
      yLabel: "count",
      bins: buildBins(gaps),
    };
  }
  if (table.header[0] === "state_id") {
    const energy = numericColumn(table, "energy", path);
    const prob = numericColumn(table, "probability", path);
    if (energy.length === 0) throw new Error(`${path}: empty table`);
    return {
      kind: "histogram",
      title: `${name}: energy distribution`,
      xLabel: "energy",
      yLabel: "probability",
      bins: buildBins(energy, prob),
    };
  }
  if (table.header[0] === "observable") {
    const freq = numericColumn(table, "freq", path);
    const err = numericColumn(table, "stderr", path);
    if (freq.length === 0) throw new Error(`${path}: empty empirical law`);
    const order = freq.map((f, i) => i).sort((a, b) => freq[b] - freq[a] || a - b);
    const top = order.slice(0, 40);
    return {
      kind: "curve",
      title: `${name}: frequency spectrum`,
      xLabel: "rank",
      yLabel: "frequency",
      points: top.map((idx, r) => ({
        x: r + 1,
        y: freq[idx],
        err: Number.isFinite(err[idx]) ? err[idx] : 0,
      })),
    };
  }
  if (table.header[0] === "check_id") {
    const margin = numericColumn(table, "margin", path);
    column(table, "pass", path); // schema check
    if (margin.length === 0) throw new Error(`${path}: empty report`);
    return {
      kind: "scatter",
      title: `${name}: check margins`,
      xLabel: "instance",
      yLabel: "margin",
      points: margin.map((m, i) => ({
        x: i + 1,
        y: Number.isFinite(m) ? m : 0,
      })),
    };
  }
  if (table.header[0] === "pair") {
    const tv = numericColumn(table, "tv", path);
    const err = numericColumn(table, "stderr", path);
    if (tv.length === 0) throw new Error(`${path}: empty scan`);
    return {
      kind: "curve",
      title: `${name}: volume convergence`,
      xLabel: "volume pair",
      yLabel: "total variation",
      points: tv.map((t, i) => ({ x: i + 1, y: t, err: err[i] })),
    };
  }
  throw new Error(`${path}: unrecognized CSV schema (header: ${header})`);
}

export interface RenderResult {
  rendered: string[];
  skipped: string[];
  errors: string[];
}

/** Render every recognized CSV in a directory to SVG and PNG files. */
export function renderDirectory(inDir: string, outDir: string): RenderResult {
  const result: RenderResult = { rendered: [], skipped: [], errors: [] };
  let files: string[];
  try {
    files = readdirSync(inDir)
      .filter((f) => f.endsWith(".csv"))
      .sort();
  } catch (e) {
    result.errors.push(`cannot read ${inDir}: ${(e as Error).message}`);
    return result;
  }
  if (files.length === 0) {
    result.errors.push(`no CSV files in ${inDir}`);
    return result;
  }
  mkdirSync(outDir, { recursive: true });
  for (const file of files) {
    const path = join(inDir, file);
    const name = basename(file, ".csv");
    try {
      const spec = specForCsv(path);
      if (spec === null) {
        result.skipped.push(file);
        continue;
      }
      const svg = renderSvg(spec);
      const png = renderPng(spec);
      writeFileSync(join(outDir, `${name}.svg`), svg, "utf-8");
      writeFileSync(join(outDir, `${name}.png`), png);
      result.rendered.push(file);
    } catch (e) {
      result.errors.push((e as Error).message);
    }
  }
  return result;
}

export function main(argv: string[]): number {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith("--") || i + 1 >= argv.length) {
      console.error("usage: report --in <dir> --out <dir>");
      return 2;
    }
    args.set(argv[i].slice(2), argv[i + 1]);
  }
  const inDir = args.get("in");
  const outDir = args.get("out");
  if (!inDir || !outDir) {
    console.error("usage: report --in <dir> --out <dir>");
    return 2;
  }
  const result = renderDirectory(inDir, outDir);
  for (const f of result.rendered) console.log(`rendered ${f}`);
  for (const f of result.skipped) console.log(`skipped ${f}`);
  for (const e of result.errors) console.error(`error: ${e}`);
  return result.errors.length > 0 ? 1 : 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
