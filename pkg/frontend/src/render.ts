/** Headless SVG rendering of benchmark figures. */

import * as fs from 'fs';
import * as path from 'path';
import * as echarts from 'echarts';
import { readRows } from './csv';
import { buildFigure, FigureKind, FigureSpecError } from './figures';

export interface RenderSpec {
  input: string;
  kind: FigureKind;
  out: string;
  width?: number;
  height?: number;
}

export interface RenderResult {
  out: string;
  seriesCount: number;
}

/** Render a benchmark CSV to an SVG file; returns the series count drawn. */
export function render(spec: RenderSpec): RenderResult {
  const ext = path.extname(spec.out).toLowerCase();
  if (ext !== '.svg') {
    throw new FigureSpecError(
      `unsupported output extension '${ext}': this renderer emits vector SVG`);
  }
  const rows = readRows(spec.input);
  const figure = buildFigure(spec.kind, rows);

  const chart = echarts.init(null, null, {
    renderer: 'svg',
    ssr: true,
    width: spec.width ?? 720,
    height: spec.height ?? 440,
  });
  try {
    chart.setOption(figure.option);
    fs.writeFileSync(spec.out, chart.renderToSVGString(), 'utf-8');
  } finally {
    chart.dispose();
  }
  return { out: spec.out, seriesCount: figure.seriesCount };
}
