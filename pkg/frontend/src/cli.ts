/**
 * Figure renderer for shiftgrid benchmark CSVs.
 *
 * Usage:
 *   node dist/cli.js --input results.csv --kind nn-compare --out figure.svg
 *
 * Kinds: tune-sweep | nn-compare | convergence | success-rate.
 * Exit codes: 0 ok, 1 usage/spec error, 2 runtime error.
 */

import { CsvError } from './csv';
import { FIGURE_KINDS, FigureKind, FigureSpecError } from './figures';
import { render } from './render';

function parseArgs(argv: string[]): { input: string; kind: FigureKind; out: string } {
  const values: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith('--') || i + 1 >= argv.length) {
      throw new FigureSpecError(`malformed arguments near '${flag}'`);
    }
    values[flag.slice(2)] = argv[i + 1];
  }
  const missing = ['input', 'kind', 'out'].filter((k) => !(k in values));
  if (missing.length) {
    throw new FigureSpecError(`missing required flags: ${missing.map((m) => `--${m}`).join(', ')}`);
  }
  if (!FIGURE_KINDS.includes(values.kind as FigureKind)) {
    throw new FigureSpecError(
      `unknown figure kind '${values.kind}'; known: ${FIGURE_KINDS.join(', ')}`);
  }
  return { input: values.input, kind: values.kind as FigureKind, out: values.out };
}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    const result = render(spec);
    console.log(`wrote ${result.out} (${result.seriesCount} series)`);
    return 0;
  } catch (err) {
    if (err instanceof FigureSpecError || err instanceof CsvError) {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    console.error(`runtime error: ${(err as Error).message}`);
    return 2;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
