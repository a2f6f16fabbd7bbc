import * as fs from "node:fs";

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

/** Minimal CSV reader for the numeric tables the fitting CLI emits
 *  (no quoting or embedded separators in that schema). */
export function readCsv(path: string): Table {
  const text = fs.readFileSync(path, "utf8").trim();
  if (text.length === 0) {
    throw new Error(`${path}: empty CSV`);
  }
  const lines = text.split(/\r?\n/);
  const columns = lines[0].split(",").map((s) => s.trim());
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new Error(`${path}: line ${i + 2}: expected ${columns.length} cells, got ${cells.length}`);
    }
    const row: Record<string, string> = {};
    columns.forEach((c, j) => (row[c] = cells[j].trim()));
    return row;
  });
  if (rows.length === 0) {
    throw new Error(`${path}: no data rows`);
  }
  return { columns, rows };
}

export function numericColumn(table: Table, name: string, path = "<csv>"): number[] {
  if (!table.columns.includes(name)) {
    throw new Error(`${path}: missing column '${name}' (have: ${table.columns.join(", ")})`);
  }
  return table.rows.map((r, i) => {
    const v = Number(r[name]);
    if (!Number.isFinite(v)) {
      throw new Error(`${path}: line ${i + 2}: column '${name}' is not numeric: '${r[name]}'`);
    }
    return v;
  });
}

export interface Curve {
  label: string;
  x: number[];
  y: number[];
}

/** Load a density or bias grid: first column is the abscissa, `valueColumn`
 *  the ordinate. */
export function readCurve(path: string, label: string, valueColumn?: string): Curve {
  const table = readCsv(path);
  const xName = table.columns[0];
  const yName = valueColumn ?? table.columns[1];
  return {
    label,
    x: numericColumn(table, xName, path),
    y: numericColumn(table, yName, path),
  };
}

export interface IntervalRow {
  id: string;
  mean: number;
  lo: number;
  hi: number;
}

/** Load an interval CSV (id, mean, q025, q975). */
export function readIntervals(path: string): IntervalRow[] {
  const table = readCsv(path);
  for (const c of ["id", "mean", "q025", "q975"]) {
    if (!table.columns.includes(c)) {
      throw new Error(`${path}: missing column '${c}'`);
    }
  }
  const mean = numericColumn(table, "mean", path);
  const lo = numericColumn(table, "q025", path);
  const hi = numericColumn(table, "q975", path);
  return table.rows.map((r, i) => ({ id: r.id, mean: mean[i], lo: lo[i], hi: hi[i] }));
}
