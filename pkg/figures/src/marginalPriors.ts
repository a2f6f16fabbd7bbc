import type { EChartsOption, SeriesOption } from "echarts";
import { Curve } from "./csv";
import { PALETTE, renderSvg } from "./render";

export interface MarginalPriorSpec {
  /** Curves for the linear-scale body panel. */
  body: Curve[];
  /** Curves for the tail panel; its vertical axis is logarithmic. */
  tail: Curve[];
  title?: string;
}

function lineSeries(curves: Curve[], xAxisIndex: number, yAxisIndex: number): SeriesOption[] {
  return curves.map((c, i) => ({
    type: "line",
    name: c.label,
    xAxisIndex,
    yAxisIndex,
    showSymbol: false,
    lineStyle: { width: 2, color: PALETTE[i % PALETTE.length] },
    itemStyle: { color: PALETTE[i % PALETTE.length] },
    data: c.x.map((x, j) => [x, c.y[j]]),
  }));
}

/** Two-panel marginal-density figure: full-scale body on the left, tail on
 *  the right with a logarithmic vertical axis. */
export function marginalPriorsOption(spec: MarginalPriorSpec): EChartsOption {
  if (spec.body.length === 0 || spec.tail.length === 0) {
    throw new Error("marginal-priors figure needs at least one body and one tail curve");
  }
  const tailPositive = spec.tail.map((c) => ({
    ...c,
    // a log axis cannot represent zeros; drop underflowed density values
    x: c.x.filter((_, j) => c.y[j] > 0),
    y: c.y.filter((v) => v > 0),
  }));
  return {
    title: { text: spec.title ?? "Marginal densities of the rate", left: "center" },
    legend: { bottom: 0, data: spec.body.map((c) => c.label) },
    grid: [
      { left: "7%", right: "55%", top: 60, bottom: 60 },
      { left: "55%", right: "5%", top: 60, bottom: 60 },
    ],
    xAxis: [
      { type: "value", gridIndex: 0, name: "rate" },
      { type: "value", gridIndex: 1, name: "rate (tail)" },
    ],
    yAxis: [
      { type: "value", gridIndex: 0, name: "density" },
      { type: "log", gridIndex: 1, name: "density (log scale)" },
    ],
    series: [
      ...lineSeries(spec.body, 0, 0),
      ...lineSeries(tailPositive, 1, 1),
    ],
  };
}

export function renderMarginalPriors(spec: MarginalPriorSpec): string {
  return renderSvg(marginalPriorsOption(spec), { width: 1000, height: 420 });
}
