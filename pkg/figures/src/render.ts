import * as fs from "node:fs";
import * as path from "node:path";
import * as echarts from "echarts";

export interface RenderSize {
  width: number;
  height: number;
}

/** Render an echarts option to an SVG string without a browser. */
export function renderSvg(option: echarts.EChartsOption, size: RenderSize): string {
  const chart = echarts.init(null as unknown as HTMLElement, undefined, {
    renderer: "svg",
    ssr: true,
    width: size.width,
    height: size.height,
  });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}

export function writeSvg(outPath: string, svg: string): void {
  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  fs.writeFileSync(outPath, svg, "utf8");
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
];
