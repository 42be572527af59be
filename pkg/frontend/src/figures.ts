/** Chart options for each figure kind, built from benchmark result rows. */

import type { EChartsOption, SeriesOption } from 'echarts';
import { ResultRow, median, quartiles } from './csv';

export type FigureKind = 'tune-sweep' | 'nn-compare' | 'convergence' | 'success-rate';

export const FIGURE_KINDS: FigureKind[] = [
  'tune-sweep', 'nn-compare', 'convergence', 'success-rate',
];

/** Which experiment column each figure kind consumes. */
const KIND_EXPERIMENTS: Record<FigureKind, string[]> = {
  'tune-sweep': ['tune', 'tune-best'],
  'nn-compare': ['nn-compare'],
  convergence: ['converge'],
  'success-rate': ['roadmap-build'],
};

export class FigureSpecError extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'FigureSpecError';
  }
}

export interface Figure {
  option: EChartsOption;
  /** Primary data series (aggregation bands excluded). */
  seriesCount: number;
}

function checkKindMatchesRows(kind: FigureKind, rows: ResultRow[]): ResultRow[] {
  const wanted = KIND_EXPERIMENTS[kind];
  const matching = rows.filter((r) => wanted.includes(r.experiment));
  const foreign = rows.filter((r) => !wanted.includes(r.experiment));
  if (matching.length === 0 || foreign.length > 0) {
    const seen = [...new Set(rows.map((r) => r.experiment))].join(', ');
    throw new FigureSpecError(
      `figure kind '${kind}' expects experiment ${wanted.join('|')}, CSV contains: ${seen}`);
  }
  return matching;
}

function groupBy<K>(rows: ResultRow[], key: (r: ResultRow) => K): Map<K, ResultRow[]> {
  const out = new Map<K, ResultRow[]>();
  for (const row of rows) {
    const k = key(row);
    const bucket = out.get(k);
    if (bucket) bucket.push(row);
    else out.set(k, [row]);
  }
  return out;
}

const BASE: EChartsOption = {
  animation: false,
  backgroundColor: '#ffffff',
  legend: { top: 4 },
  grid: { left: 60, right: 64, top: 48, bottom: 48 },
};

/** Recall (left axis) and running time (right axis) against the swept knob. */
function tuneSweep(rows: ResultRow[]): Figure {
  const sweep = rows.filter((r) => r.experiment === 'tune');
  if (sweep.length === 0) throw new FigureSpecError('no tune rows in the CSV');
  const distinctM = new Set(sweep.map((r) => r.m)).size;
  const knob: 'm' | 'c_tilde' = distinctM > 1 ? 'm' : 'c_tilde';
  const points = [...sweep].sort((a, b) => (a[knob] ?? 0) - (b[knob] ?? 0));
  const xs = points.map((r) => r[knob] as number);
  const option: EChartsOption = {
    ...BASE,
    title: { text: `recall and time vs ${knob === 'm' ? 'grid count' : 'cell-size factor'}` },
    xAxis: { type: 'category', name: knob, data: xs.map(String) },
    yAxis: [
      { type: 'value', name: 'recall', min: 0, max: 1 },
      { type: 'value', name: 'time (s)' },
    ],
    series: [
      { name: 'recall', type: 'line', yAxisIndex: 0, data: points.map((r) => r.recall) },
      { name: 'time', type: 'line', yAxisIndex: 1, data: points.map((r) => r.t_total) },
    ],
  };
  return { option, seriesCount: 2 };
}

/** Query time against point count, one median line (plus IQR band) per backend. */
function nnCompare(rows: ResultRow[]): Figure {
  const byBackend = groupBy(rows, (r) => r.backend);
  const series: SeriesOption[] = [];
  let lineCount = 0;
  for (const [backend, group] of byBackend) {
    const byN = groupBy(group, (r) => r.n);
    const ns = [...byN.keys()].sort((a, b) => a - b);
    const med: [number, number][] = [];
    const lo: [number, number][] = [];
    const hi: [number, number][] = [];
    for (const n of ns) {
      const times = byN.get(n)!.map((r) => r.t_total ?? 0);
      const [q1, q3] = quartiles(times);
      med.push([n, median(times)]);
      lo.push([n, q1]);
      hi.push([n, q3]);
    }
    series.push({ name: backend, type: 'line', data: med });
    lineCount += 1;
    // interquartile band, drawn but not counted as a data series
    series.push({ name: `${backend} (iqr)`, type: 'line', data: lo,
                  lineStyle: { opacity: 0 }, symbol: 'none', stack: backend,
                  tooltip: { show: false } });
    series.push({ name: `${backend} (iqr+)`, type: 'line', symbol: 'none',
                  data: hi.map(([n, v], i) => [n, v - lo[i][1]] as [number, number]),
                  lineStyle: { opacity: 0 }, stack: backend,
                  areaStyle: { opacity: 0.15 }, tooltip: { show: false } });
  }
  const option: EChartsOption = {
    ...BASE,
    title: { text: 'all-pairs query time vs point count' },
    legend: { top: 4, data: [...byBackend.keys()] },
    xAxis: { type: 'log', name: 'n' },
    yAxis: { type: 'value', name: 'time (s)' },
    series,
  };
  return { option, seriesCount: lineCount };
}

/** Best-so-far normalized cost against cumulative time, one line per seed. */
function convergence(rows: ResultRow[]): Figure {
  const bySeed = groupBy(rows, (r) => r.seed);
  const series: SeriesOption[] = [];
  for (const [seed, group] of [...bySeed.entries()].sort((a, b) => a[0] - b[0])) {
    const points = [...group]
      .sort((a, b) => (a.t_total ?? 0) - (b.t_total ?? 0))
      .filter((r) => r.norm_cost !== null)
      .map((r) => [r.t_total, r.norm_cost] as [number, number]);
    series.push({ name: `seed ${seed}`, type: 'line', step: 'end', data: points });
  }
  const option: EChartsOption = {
    ...BASE,
    title: { text: 'solution cost vs time (1 = straight-line bound)' },
    xAxis: { type: 'value', name: 'time (s)' },
    yAxis: { type: 'value', name: 'normalized cost', min: 1 },
    series,
  };
  return { option, seriesCount: series.length };
}

/** Query success rate against build time, one line per backend. */
function successRate(rows: ResultRow[]): Figure {
  const byBackend = groupBy(rows, (r) => r.backend);
  const series: SeriesOption[] = [];
  for (const [backend, group] of byBackend) {
    const byN = groupBy(group, (r) => r.n);
    const points: [number, number][] = [];
    for (const [, atN] of byN) {
      const successes = atN.map((r) => (r.success ? 1 : 0) as number);
      const times = atN.map((r) => r.t_total ?? 0);
      points.push([median(times), successes.reduce((a, b) => a + b, 0) / successes.length]);
    }
    points.sort((a, b) => a[0] - b[0]);
    series.push({ name: backend, type: 'line', data: points });
  }
  const option: EChartsOption = {
    ...BASE,
    title: { text: 'query success rate vs construction time' },
    xAxis: { type: 'value', name: 'time (s)' },
    yAxis: { type: 'value', name: 'success rate', min: 0, max: 1 },
    series,
  };
  return { option, seriesCount: series.length };
}

export function buildFigure(kind: FigureKind, rows: ResultRow[]): Figure {
  if (!FIGURE_KINDS.includes(kind)) {
    throw new FigureSpecError(`unknown figure kind '${kind}'; known: ${FIGURE_KINDS.join(', ')}`);
  }
  const matching = checkKindMatchesRows(kind, rows);
  switch (kind) {
    case 'tune-sweep': return tuneSweep(matching);
    case 'nn-compare': return nnCompare(matching);
    case 'convergence': return convergence(matching);
    case 'success-rate': return successRate(matching);
  }
}
