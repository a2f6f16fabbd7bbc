import type {
  CustomSeriesRenderItemAPI,
  CustomSeriesRenderItemParams,
  CustomSeriesRenderItemReturn,
  EChartsOption,
} from "echarts";
import { IntervalRow } from "./csv";
import { renderSvg } from "./render";

export interface IntervalPanelSpec {
  /** Units with the largest posterior means. */
  top: IntervalRow[];
  /** Reference units with moderate posterior means. */
  random: IntervalRow[];
  title?: string;
}

function whiskerSeries(rows: IntervalRow[], xAxisIndex: number, yAxisIndex: number, color: string) {
  return {
    type: "custom" as const,
    name: "95% interval",
    xAxisIndex,
    yAxisIndex,
    renderItem: (params: CustomSeriesRenderItemParams,
                 api: CustomSeriesRenderItemAPI): CustomSeriesRenderItemReturn => {
      const i = params.dataIndex;
      const lo = api.coord([i, rows[i].lo]);
      const hi = api.coord([i, rows[i].hi]);
      const mean = api.coord([i, rows[i].mean]);
      return {
        type: "group" as const,
        children: [
          {
            type: "line" as const,
            shape: { x1: lo[0], y1: lo[1], x2: hi[0], y2: hi[1] },
            style: { stroke: color, lineWidth: 2 },
          },
          {
            type: "circle" as const,
            shape: { cx: mean[0], cy: mean[1], r: 4 },
            style: { fill: color },
          },
        ],
      };
    },
    data: rows.map((r) => r.mean),
  };
}

/** Dot-and-whisker chart: top-10 posterior means on the left, a random-10
 *  moderate reference set on the right. */
export function intervalsOption(spec: IntervalPanelSpec): EChartsOption {
  if (spec.top.length === 0 || spec.random.length === 0) {
    throw new Error("interval figure needs both unit sets");
  }
  return {
    title: { text: spec.title ?? "Posterior means with 95% intervals", left: "center" },
    grid: [
      { left: "7%", right: "55%", top: 60, bottom: 70 },
      { left: "55%", right: "4%", top: 60, bottom: 70 },
    ],
    xAxis: [
      {
        type: "category",
        gridIndex: 0,
        data: spec.top.map((r) => r.id),
        name: "highest posterior means",
        nameLocation: "middle",
        nameGap: 42,
        axisLabel: { rotate: 45 },
      },
      {
        type: "category",
        gridIndex: 1,
        data: spec.random.map((r) => r.id),
        name: "randomly selected units",
        nameLocation: "middle",
        nameGap: 42,
        axisLabel: { rotate: 45 },
      },
    ],
    yAxis: [
      { type: "value", gridIndex: 0, name: "rate" },
      { type: "value", gridIndex: 1, name: "rate" },
    ],
    series: [
      whiskerSeries(spec.top, 0, 0, "#d62728"),
      whiskerSeries(spec.random, 1, 1, "#1f77b4"),
    ],
  };
}

export function renderIntervals(spec: IntervalPanelSpec): string {
  return renderSvg(intervalsOption(spec), { width: 1000, height: 430 });
}
