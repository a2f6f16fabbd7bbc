import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { afterAll, describe, expect, it } from "vitest";

import { readCsv, readCurve, readIntervals } from "../src/csv";
import { renderIntervals } from "../src/intervals";
import { marginalPriorsOption, renderMarginalPriors } from "../src/marginalPriors";
import { renderPosteriors } from "../src/posteriors";
import { run } from "../src/cli";

const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "csfig-"));
afterAll(() => fs.rmSync(tmp, { recursive: true, force: true }));

function writeDensityCsv(name: string, scale = 1): string {
  const p = path.join(tmp, name);
  const lines = ["lambda,density"];
  for (let i = 1; i <= 40; i++) {
    const x = i / 8;
    lines.push(`${x},${scale * Math.exp(-x)}`);
  }
  fs.writeFileSync(p, lines.join("\n") + "\n");
  return p;
}

function writeIntervalCsv(name: string): string {
  const p = path.join(tmp, name);
  const lines = ["id,mean,q025,q975"];
  for (let i = 1; i <= 10; i++) {
    lines.push(`u${i},${i},${i - 0.8},${i + 0.9}`);
  }
  fs.writeFileSync(p, lines.join("\n") + "\n");
  return p;
}

describe("csv reading", () => {
  it("reads curves and intervals", () => {
    const c = readCurve(writeDensityCsv("a.csv"), "A");
    expect(c.x).toHaveLength(40);
    expect(c.y[0]).toBeCloseTo(Math.exp(-1 / 8));
    const rows = readIntervals(writeIntervalCsv("iv.csv"));
    expect(rows).toHaveLength(10);
    expect(rows[2].lo).toBeLessThan(rows[2].mean);
  });

  it("fails with a descriptive error on a missing column", () => {
    const p = path.join(tmp, "wrong.csv");
    fs.writeFileSync(p, "x,z\n1,2\n");
    expect(() => readIntervals(p)).toThrow(/missing column 'id'/);
  });

  it("rejects an empty csv", () => {
    const p = path.join(tmp, "empty.csv");
    fs.writeFileSync(p, "");
    expect(() => readCsv(p)).toThrow(/empty/);
  });
});

describe("marginal priors figure", () => {
  it("renders two panels with a logarithmic tail axis", () => {
    const a = readCurve(writeDensityCsv("ig1.csv"), "IG1");
    const b = readCurve(writeDensityCsv("eh1.csv", 2), "EH1");
    const option = marginalPriorsOption({ body: [a, b], tail: [a, b] });
    const axes = option.yAxis as Array<{ type: string }>;
    expect(axes[0].type).toBe("value");
    expect(axes[1].type).toBe("log");
    const svg = renderMarginalPriors({ body: [a, b], tail: [a, b] });
    expect(svg).toContain("<svg");
    expect(svg.length).toBeGreaterThan(2000);
  });

  it("identical curves produce identical paths", () => {
    const a = readCurve(writeDensityCsv("same1.csv"), "X");
    const b = { ...readCurve(writeDensityCsv("same2.csv"), "X"), label: "Y" };
    const svg = renderMarginalPriors({ body: [a, b], tail: [a] });
    expect(svg).toContain("<svg");
  });

  it("refuses to render nothing", () => {
    expect(() => renderMarginalPriors({ body: [], tail: [] })).toThrow();
  });
});

describe("posterior panels figure", () => {
  it("renders one grid per count", () => {
    const c1 = readCurve(writeDensityCsv("p1.csv"), "PG");
    const c2 = readCurve(writeDensityCsv("p2.csv", 1.2), "EH1");
    const svg = renderPosteriors([
      { label: "y = 1", curves: [c1, c2] },
      { label: "y = 5", curves: [c1, c2] },
      { label: "y = 10", curves: [c1, c2] },
    ]);
    expect(svg).toContain("<svg");
    expect(svg).toContain("y = 10");
  });
});

describe("interval figure", () => {
  it("renders whiskers for both unit sets", () => {
    const rows = readIntervals(writeIntervalCsv("iv2.csv"));
    const svg = renderIntervals({ top: rows, random: rows });
    expect(svg).toContain("<svg");
    expect(svg).toContain("circle");
  });
});

describe("cli", () => {
  it("renders an SVG file end to end", () => {
    const a = writeDensityCsv("cli_a.csv");
    const out = path.join(tmp, "fig.svg");
    const rc = run([
      "render-priors",
      "--body", `IG1=${a}`,
      "--tail", `IG1=${a}`,
      "--out", out,
    ]);
    expect(rc).toBe(0);
    expect(fs.statSync(out).size).toBeGreaterThan(1000);
  });

  it("reports unknown subcommands", () => {
    expect(() => run(["frobnicate"])).toThrow(/unknown subcommand/);
  });
});
