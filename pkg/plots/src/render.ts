#!/usr/bin/env node
/**
 * Render manistoch experiment CSVs into SVG figures.
 *
 *   node dist/src/render.js --spec spec.json
 *
 * The spec file holds one figure spec or an array of them:
 *   { "kind": "loglog-convergence" | "envelope" | "histogram" | "trajectory",
 *     "input": "wong_zakai_convergence.csv",
 *     "output": "wz.svg",
 *     "title": "optional override" }
 *
 * Exit status 2 on schema problems (missing columns, empty CSV, bad kind).
 */
import { readFileSync, writeFileSync } from "fs";
import { SchemaError } from "./csv";
import { FigureSpec, renderFigure } from "./figures";

const KINDS = ["loglog-convergence", "envelope", "histogram", "trajectory"];

function loadSpecs(path: string): FigureSpec[] {
  const doc = JSON.parse(readFileSync(path, "utf8"));
  const list = Array.isArray(doc) ? doc : [doc];
  for (const spec of list) {
    if (!KINDS.includes(spec.kind)) {
      throw new SchemaError(
        `figure kind must be one of ${KINDS.join(", ")}; got ${spec.kind}`
      );
    }
    for (const key of ["input", "output"]) {
      if (typeof spec[key] !== "string") {
        throw new SchemaError(`figure spec needs a string "${key}"`);
      }
    }
  }
  return list;
}

export function main(argv: string[]): number {
  const idx = argv.indexOf("--spec");
  if (idx === -1 || idx + 1 >= argv.length) {
    process.stderr.write("usage: render --spec spec.json\n");
    return 2;
  }
  let specs: FigureSpec[];
  try {
    specs = loadSpecs(argv[idx + 1]);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
  for (const spec of specs) {
    try {
      writeFileSync(spec.output, renderFigure(spec));
      process.stdout.write(`wrote ${spec.output}\n`);
    } catch (err) {
      if (err instanceof SchemaError) {
        process.stderr.write(`error: ${err.message}\n`);
        return 2;
      }
      throw err;
    }
  }
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
