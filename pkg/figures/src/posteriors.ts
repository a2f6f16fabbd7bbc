import type { EChartsOption, SeriesOption } from "echarts";
import { Curve } from "./csv";
import { PALETTE, renderSvg } from "./render";

export interface PosteriorPanel {
  /** Panel label, e.g. "y = 5". */
  label: string;
  curves: Curve[];
}

/** One row of density panels per observed count, shared styling across
 *  methods. */
export function posteriorsOption(panels: PosteriorPanel[]): EChartsOption {
  if (panels.length === 0) {
    throw new Error("no posterior panels given");
  }
  const n = panels.length;
  const rowH = 100 / n;
  const grids = panels.map((_, i) => ({
    left: "8%",
    right: "5%",
    top: `${i * rowH + 8}%`,
    height: `${rowH - 12}%`,
  }));
  const series: SeriesOption[] = [];
  panels.forEach((panel, i) => {
    panel.curves.forEach((c, k) => {
      series.push({
        type: "line",
        name: c.label,
        xAxisIndex: i,
        yAxisIndex: i,
        showSymbol: false,
        lineStyle: { width: 2, color: PALETTE[k % PALETTE.length] },
        itemStyle: { color: PALETTE[k % PALETTE.length] },
        data: c.x.map((x, j) => [x, c.y[j]]),
      });
    });
  });
  return {
    legend: { bottom: 0, data: panels[0].curves.map((c) => c.label) },
    xAxis: panels.map((p, i) => ({
      type: "value" as const,
      gridIndex: i,
      name: p.label,
      nameLocation: "middle" as const,
      nameGap: 22,
    })),
    yAxis: panels.map((_, i) => ({ type: "value" as const, gridIndex: i })),
    grid: grids,
    series,
  };
}

export function renderPosteriors(panels: PosteriorPanel[]): string {
  return renderSvg(posteriorsOption(panels), {
    width: 760,
    height: 190 * panels.length + 40,
  });
}
