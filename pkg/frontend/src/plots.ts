/**
 * SVG plots for minsynth benchmark CSVs.
 *
 * Reads the comparison harness output
 * (instance,family,pipeline,revdfa_states,dfa_states_or_statevars,
 *  construct_ms,game_ms,total_ms,iterations,realizable,status)
 * and renders one of three figures:
 *
 *   cactus          — per-pipeline count of instances solved within a time
 *                     budget (curves sweep right as budgets grow)
 *   scatter-states  — reverse-automaton size vs canonical-automaton size,
 *                     one point per random instance, with a y = x guide
 *   growth          — automaton sizes against the kv family parameter m
 *
 * Usage:
 *   node plots.js <cactus|scatter-states|growth> <in.csv> <out.svg> [--log]
 */

import { readFileSync, writeFileSync } from "node:fs";

// ---------------------------------------------------------------------------
// CSV

export interface HarnessRow {
  instance: string;
  family: string;
  pipeline: string;
  revdfa_states: number | null;
  dfa_states_or_statevars: number | null;
  construct_ms: number | null;
  game_ms: number | null;
  total_ms: number | null;
  iterations: number | null;
  realizable: string;
  status: string;
}

const HEADER = [
  "instance", "family", "pipeline", "revdfa_states",
  "dfa_states_or_statevars", "construct_ms", "game_ms", "total_ms",
  "iterations", "realizable", "status",
];

export function parseCsv(text: string): HarnessRow[] {
  const lines = text.split(/\r?\n/).filter((ln) => ln.trim().length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  const header = lines[0].split(",");
  if (HEADER.some((name, i) => header[i] !== name)) {
    throw new Error(`unexpected CSV header: ${lines[0]}`);
  }
  return lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== HEADER.length) {
      throw new Error(`malformed CSV row ${i + 2}: ${line}`);
    }
    const num = (cell: string): number | null => {
      if (cell === "") return null;
      const value = Number(cell);
      if (!Number.isFinite(value)) {
        throw new Error(`malformed number in CSV row ${i + 2}: ${cell}`);
      }
      return value;
    };
    return {
      instance: cells[0],
      family: cells[1],
      pipeline: cells[2],
      revdfa_states: num(cells[3]),
      dfa_states_or_statevars: num(cells[4]),
      construct_ms: num(cells[5]),
      game_ms: num(cells[6]),
      total_ms: num(cells[7]),
      iterations: num(cells[8]),
      realizable: cells[9],
      status: cells[10],
    };
  });
}

// ---------------------------------------------------------------------------
// Layout helpers

const W = 560;
const H = 360;
const ML = 64;
const MR = 24;
const MT = 36;
const MB = 52;
const PW = W - ML - MR;
const PH = H - MT - MB;

const COLORS: Record<string, string> = {
  hopcroft: "#1f6fb2",
  "brz-explicit": "#c25b1e",
  "brz-symbolic": "#3c8a4b",
};

function colorOf(name: string, index: number): string {
  return COLORS[name] ?? ["#7a4ba0", "#a03b63", "#57707d"][index % 3];
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

interface Scale {
  (value: number): number;
  ticks: number[];
  label(value: number): string;
}

function makeScale(lo: number, hi: number, pixels: [number, number],
                   log: boolean): Scale {
  if (log) {
    lo = Math.max(lo, 1);
    hi = Math.max(hi, lo * 10);
    const la = Math.log10(lo);
    const lb = Math.log10(hi);
    const scale = ((value: number) =>
      pixels[0] + ((Math.log10(Math.max(value, lo)) - la) / (lb - la))
        * (pixels[1] - pixels[0])) as Scale;
    const ticks: number[] = [];
    for (let e = Math.floor(la); e <= Math.ceil(lb); e++) {
      ticks.push(10 ** e);
    }
    scale.ticks = ticks;
    scale.label = (v) => (v >= 10000 ? `1e${Math.round(Math.log10(v))}` : String(v));
    return scale;
  }
  if (hi <= lo) hi = lo + 1;
  const span = hi - lo;
  const rough = span / 5;
  const mag = 10 ** Math.floor(Math.log10(rough));
  const step = [1, 2, 5, 10].map((k) => k * mag).find((k) => k >= rough) ?? rough;
  const scale = ((value: number) =>
    pixels[0] + ((value - lo) / span) * (pixels[1] - pixels[0])) as Scale;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step / 100; v += step) {
    ticks.push(v);
  }
  scale.ticks = ticks;
  scale.label = (v) => (Number.isInteger(v) ? String(v) : v.toFixed(1));
  return scale;
}

interface Frame {
  body: string[];
  xscale: Scale;
  yscale: Scale;
}

function openFrame(title: string, xlabel: string, ylabel: string,
                   xscale: Scale, yscale: Scale): Frame {
  const body: string[] = [];
  body.push(`<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">`);
  body.push(`<rect width="${W}" height="${H}" fill="#fff"/>`);
  body.push(`<text x="${ML}" y="${MT - 14}" font-size="12" font-weight="600" fill="#222">${esc(title)}</text>`);
  for (const v of yscale.ticks) {
    const y = yscale(v).toFixed(1);
    body.push(`<line x1="${ML}" y1="${y}" x2="${ML + PW}" y2="${y}" stroke="#eee" stroke-width="0.6"/>`);
    body.push(`<text x="${ML - 6}" y="${y}" dy="3" text-anchor="end" font-size="9" fill="#555">${esc(yscale.label(v))}</text>`);
  }
  for (const v of xscale.ticks) {
    const x = xscale(v).toFixed(1);
    body.push(`<line x1="${x}" y1="${MT + PH}" x2="${x}" y2="${MT + PH + 4}" stroke="#333" stroke-width="0.6"/>`);
    body.push(`<text x="${x}" y="${MT + PH + 16}" text-anchor="middle" font-size="9" fill="#555">${esc(xscale.label(v))}</text>`);
  }
  body.push(`<line x1="${ML}" y1="${MT}" x2="${ML}" y2="${MT + PH}" stroke="#333" stroke-width="0.8"/>`);
  body.push(`<line x1="${ML}" y1="${MT + PH}" x2="${ML + PW}" y2="${MT + PH}" stroke="#333" stroke-width="0.8"/>`);
  body.push(`<text x="${ML + PW / 2}" y="${H - 10}" text-anchor="middle" font-size="10" fill="#333">${esc(xlabel)}</text>`);
  body.push(`<text x="16" y="${MT + PH / 2}" text-anchor="middle" font-size="10" fill="#333" transform="rotate(-90,16,${MT + PH / 2})">${esc(ylabel)}</text>`);
  return { body, xscale, yscale };
}

function legend(frame: Frame, entries: [string, string][]): void {
  entries.forEach(([label, color], i) => {
    const y = MT + 10 + i * 14;
    frame.body.push(`<line x1="${ML + PW - 130}" y1="${y}" x2="${ML + PW - 112}" y2="${y}" stroke="${color}" stroke-width="2"/>`);
    frame.body.push(`<text x="${ML + PW - 106}" y="${y}" dy="3" font-size="9" fill="#333">${esc(label)}</text>`);
  });
}

function closeFrame(frame: Frame): string {
  frame.body.push("</svg>");
  return frame.body.join("\n") + "\n";
}

// ---------------------------------------------------------------------------
// Figures

export function buildCactus(rows: HarnessRow[], log: boolean): string {
  const solved = rows.filter((r) => r.status === "ok" && r.total_ms !== null);
  if (solved.length === 0) {
    throw new Error("no ok rows to plot");
  }
  const pipelines = [...new Set(solved.map((r) => r.pipeline))].sort();
  const maxTime = Math.max(...solved.map((r) => r.total_ms as number), 1);
  const maxCount = Math.max(
    ...pipelines.map((p) => solved.filter((r) => r.pipeline === p).length));
  const xscale = makeScale(log ? 1 : 0, maxTime, [ML, ML + PW], log);
  const yscale = makeScale(0, maxCount, [MT + PH, MT], false);
  const frame = openFrame("Instances solved within a time budget",
    "total time (ms)", "instances solved", xscale, yscale);
  pipelines.forEach((pipeline, i) => {
    const times = solved.filter((r) => r.pipeline === pipeline)
      .map((r) => r.total_ms as number)
      .sort((a, b) => a - b);
    const points = times
      .map((t, k) => `${xscale(t).toFixed(1)},${yscale(k + 1).toFixed(1)}`)
      .join(" ");
    frame.body.push(`<polyline class="curve" data-pipeline="${esc(pipeline)}" fill="none" stroke="${colorOf(pipeline, i)}" stroke-width="1.6" points="${points}"/>`);
  });
  legend(frame, pipelines.map((p, i) => [p, colorOf(p, i)]));
  return closeFrame(frame);
}

export function buildScatter(rows: HarnessRow[], log: boolean): string {
  const usable = rows.filter((r) =>
    r.status === "ok" && r.pipeline === "brz-explicit"
    && r.revdfa_states !== null && r.dfa_states_or_statevars !== null);
  if (usable.length === 0) {
    throw new Error("no ok rows with both automaton sizes to plot");
  }
  const xs = usable.map((r) => r.revdfa_states as number);
  const ys = usable.map((r) => r.dfa_states_or_statevars as number);
  const hi = Math.max(...xs, ...ys, 2);
  const lo = log ? 1 : 0;
  const xscale = makeScale(lo, hi, [ML, ML + PW], log);
  const yscale = makeScale(lo, hi, [MT + PH, MT], log);
  const frame = openFrame("Canonical automaton size against reverse size",
    "reverse automaton states", "canonical automaton states", xscale, yscale);
  frame.body.push(`<line class="guide" x1="${xscale(Math.max(lo, 1)).toFixed(1)}" y1="${yscale(Math.max(lo, 1)).toFixed(1)}" x2="${xscale(hi).toFixed(1)}" y2="${yscale(hi).toFixed(1)}" stroke="#999" stroke-width="1" stroke-dasharray="5,4"/>`);
  for (const row of usable) {
    const x = xscale(row.revdfa_states as number).toFixed(1);
    const y = yscale(row.dfa_states_or_statevars as number).toFixed(1);
    frame.body.push(`<circle class="point" cx="${x}" cy="${y}" r="2.6" fill="#1f6fb2" fill-opacity="0.55"/>`);
  }
  return closeFrame(frame);
}

export function buildGrowth(rows: HarnessRow[], log: boolean): string {
  const usable = rows.filter((r) =>
    r.status === "ok" && r.family === "kv" && r.pipeline === "brz-explicit"
    && r.revdfa_states !== null && r.dfa_states_or_statevars !== null);
  if (usable.length === 0) {
    throw new Error("no ok kv rows to plot");
  }
  const byM = usable
    .map((r) => ({
      m: Number(r.instance.replace(/^kv-/, "")),
      dfa: r.dfa_states_or_statevars as number,
      rev: r.revdfa_states as number,
    }))
    .filter((p) => Number.isFinite(p.m))
    .sort((a, b) => a.m - b.m);
  const hi = Math.max(...byM.map((p) => Math.max(p.dfa, p.rev)), 2);
  const xscale = makeScale(byM[0].m, byM[byM.length - 1].m, [ML, ML + PW], false);
  const yscale = makeScale(log ? 1 : 0, hi, [MT + PH, MT], log);
  const frame = openFrame("Automaton growth with the family parameter",
    "parameter m", "states", xscale, yscale);
  const series: [string, (p: { dfa: number; rev: number }) => number, string][] = [
    ["canonical automaton", (p) => p.dfa, "#1f6fb2"],
    ["reverse automaton", (p) => p.rev, "#c25b1e"],
  ];
  for (const [label, pick, color] of series) {
    const points = byM
      .map((p) => `${xscale(p.m).toFixed(1)},${yscale(pick(p)).toFixed(1)}`)
      .join(" ");
    frame.body.push(`<polyline class="curve" data-series="${esc(label)}" fill="none" stroke="${color}" stroke-width="1.6" points="${points}"/>`);
    for (const p of byM) {
      frame.body.push(`<circle cx="${xscale(p.m).toFixed(1)}" cy="${yscale(pick(p)).toFixed(1)}" r="2.4" fill="${color}"/>`);
    }
  }
  legend(frame, series.map(([label, , color]) => [label, color]));
  return closeFrame(frame);
}

export const KINDS = ["cactus", "scatter-states", "growth"] as const;
export type Kind = (typeof KINDS)[number];

export function render(kind: Kind, csvText: string, log: boolean): string {
  const rows = parseCsv(csvText);
  if (kind === "cactus") return buildCactus(rows, log);
  if (kind === "scatter-states") return buildScatter(rows, log);
  return buildGrowth(rows, log);
}

// ---------------------------------------------------------------------------
// CLI

export function main(argv: string[]): number {
  const positional = argv.filter((a) => !a.startsWith("--"));
  const log = argv.includes("--log");
  if (positional.length !== 3 || !KINDS.includes(positional[0] as Kind)) {
    console.error("usage: plots <cactus|scatter-states|growth> <in.csv> <out.svg> [--log]");
    return 2;
  }
  const [kind, csvPath, outPath] = positional;
  let svg: string;
  try {
    svg = render(kind as Kind, readFileSync(csvPath, "utf-8"), log);
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  writeFileSync(outPath, svg);
  console.log(`wrote ${kind} figure to ${outPath}`);
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
