/** Parsing for the benchmark result CSV written by the shiftgrid CLI. */

import * as fs from 'fs';

export const RESULT_COLUMNS = [
  'experiment', 'd', 'n', 'seed', 'backend', 'planner', 'm', 'c_tilde', 'r',
  't_build', 't_nn', 't_cd', 't_total', 'recall', 'pairs', 'path_cost',
  'norm_cost', 'success',
] as const;

export interface ResultRow {
  experiment: string;
  d: number;
  n: number;
  seed: number;
  backend: string;
  planner: string;
  m: number | null;
  c_tilde: number | null;
  r: number | null;
  t_build: number | null;
  t_nn: number | null;
  t_cd: number | null;
  t_total: number | null;
  recall: number | null;
  pairs: number | null;
  path_cost: number | null;
  norm_cost: number | null;
  success: boolean | null;
}

export class CsvError extends Error {
  constructor(message: string, public readonly line: number) {
    super(`line ${line}: ${message}`);
    this.name = 'CsvError';
  }
}

const INT_COLUMNS = new Set(['d', 'n', 'seed', 'm', 'pairs']);
const STRING_COLUMNS = new Set(['experiment', 'backend', 'planner']);

function parseCell(column: string, text: string, line: number): unknown {
  if (STRING_COLUMNS.has(column)) return text;
  if (text === '') return null;
  if (column === 'success') return text === '1';
  const value = Number(text);
  if (Number.isNaN(value)) {
    throw new CsvError(`cannot parse ${JSON.stringify(text)} as a number for '${column}'`, line);
  }
  if (INT_COLUMNS.has(column) && !Number.isInteger(value)) {
    throw new CsvError(`expected an integer for '${column}', got ${text}`, line);
  }
  return value;
}

/** Parse a result CSV; errors carry the 1-based line number. */
export function readRows(path: string): ResultRow[] {
  const raw = fs.readFileSync(path, 'utf-8');
  const lines = raw.split(/\r?\n/).filter((l, i, arr) => !(l === '' && i === arr.length - 1));
  if (lines.length === 0) throw new CsvError('empty file', 1);
  const header = lines[0].split(',');
  if (header.join(',') !== RESULT_COLUMNS.join(',')) {
    throw new CsvError(`unexpected header: ${lines[0]}`, 1);
  }
  const rows: ResultRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const lineNo = i + 1;
    if (lines[i] === '') throw new CsvError('blank line inside the table', lineNo);
    const cells = lines[i].split(',');
    if (cells.length !== RESULT_COLUMNS.length) {
      throw new CsvError(
        `expected ${RESULT_COLUMNS.length} columns, got ${cells.length}`, lineNo);
    }
    const row: Record<string, unknown> = {};
    RESULT_COLUMNS.forEach((col, k) => {
      row[col] = parseCell(col, cells[k], lineNo);
    });
    rows.push(row as unknown as ResultRow);
  }
  return rows;
}

export function median(values: number[]): number {
  const sorted = [...values].sort((a, b) => a - b);
  const mid = Math.floor(sorted.length / 2);
  return sorted.length % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
}

export function quartiles(values: number[]): [number, number] {
  const sorted = [...values].sort((a, b) => a - b);
  const at = (q: number) => {
    const pos = q * (sorted.length - 1);
    const lo = Math.floor(pos);
    const hi = Math.ceil(pos);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo);
  };
  return [at(0.25), at(0.75)];
}
