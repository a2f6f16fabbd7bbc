#!/usr/bin/env node
/**
 * Figure renderers for the fitting CLI's CSV outputs.
 *
 * Subcommands:
 *   render-priors     --body LABEL=path ... --tail LABEL=path ... --out fig.svg
 *   render-posteriors --panel "LABEL:NAME=path,NAME=path" ...     --out fig.svg
 *   render-intervals  --top hotspots.csv --random random10.csv    --out fig.svg
 *
 * Every number displayed comes verbatim from the input CSVs.
 */
import { readCurve, readIntervals } from "./csv";
import { renderIntervals } from "./intervals";
import { renderMarginalPriors } from "./marginalPriors";
import { renderPosteriors } from "./posteriors";
import { writeSvg } from "./render";

interface Parsed {
  command: string;
  single: Map<string, string>;
  multi: Map<string, string[]>;
}

function parseArgs(argv: string[]): Parsed {
  if (argv.length === 0) {
    throw new Error("missing subcommand");
  }
  const [command, ...rest] = argv;
  const single = new Map<string, string>();
  const multi = new Map<string, string[]>();
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new Error(`malformed arguments near '${flag}'`);
    }
    const key = flag.slice(2);
    single.set(key, value);
    const list = multi.get(key) ?? [];
    list.push(value);
    multi.set(key, list);
  }
  return { command, single, multi };
}

function labelled(value: string): { label: string; path: string } {
  const k = value.indexOf("=");
  if (k <= 0) {
    throw new Error(`expected LABEL=path, got '${value}'`);
  }
  return { label: value.slice(0, k), path: value.slice(k + 1) };
}

function requireOut(p: Parsed): string {
  const out = p.single.get("out");
  if (!out) {
    throw new Error("--out is required");
  }
  return out;
}

export function run(argv: string[]): number {
  const p = parseArgs(argv);
  switch (p.command) {
    case "render-priors": {
      const body = (p.multi.get("body") ?? []).map(labelled)
        .map(({ label, path }) => readCurve(path, label));
      const tailArgs = p.multi.get("tail") ?? p.multi.get("body") ?? [];
      const tail = tailArgs.map(labelled)
        .map(({ label, path }) => readCurve(path, label));
      writeSvg(requireOut(p), renderMarginalPriors({ body, tail }));
      return 0;
    }
    case "render-posteriors": {
      const panels = (p.multi.get("panel") ?? []).map((spec) => {
        const colon = spec.indexOf(":");
        if (colon <= 0) {
          throw new Error(`expected LABEL:NAME=path,... got '${spec}'`);
        }
        const label = spec.slice(0, colon);
        const curves = spec.slice(colon + 1).split(",").map(labelled)
          .map(({ label: l, path }) => readCurve(path, l));
        return { label, curves };
      });
      writeSvg(requireOut(p), renderPosteriors(panels));
      return 0;
    }
    case "render-intervals": {
      const top = readIntervals(required(p, "top"));
      const random = readIntervals(required(p, "random"));
      writeSvg(requireOut(p), renderIntervals({ top, random }));
      return 0;
    }
    default:
      throw new Error(`unknown subcommand '${p.command}'`);
  }
}

function required(p: Parsed, key: string): string {
  const v = p.single.get(key);
  if (!v) {
    throw new Error(`--${key} is required`);
  }
  return v;
}

if (require.main === module) {
  try {
    process.exitCode = run(process.argv.slice(2));
  } catch (err) {
    console.error(`countshrink-figures: ${err instanceof Error ? err.message : err}`);
    process.exitCode = 1;
  }
}
