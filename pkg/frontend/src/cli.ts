#!/usr/bin/env node
/**
 * render <csv>... --out-dir <dir>
 *
 * Reads simulation CSV files and writes one SVG per (scenario, metric) to
 * the output directory.  Exits nonzero on usage or schema errors, naming
 * the offending column for schema mismatches.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { pathToFileURL } from "node:url";

import { parseCurveFile, SchemaError } from "./csv.js";
import { renderCurveFile } from "./render.js";

export interface CliIo {
  out: (line: string) => void;
  err: (line: string) => void;
}

const consoleIo: CliIo = {
  out: (line) => process.stdout.write(line + "\n"),
  err: (line) => process.stderr.write(line + "\n"),
};

export function runCli(argv: string[], io: CliIo = consoleIo): number {
  if (argv[0] !== "render") {
    io.err("usage: render <csv>... --out-dir <dir>");
    return 1;
  }
  const inputs: string[] = [];
  let outDir: string | undefined;
  for (let i = 1; i < argv.length; i++) {
    const arg = argv[i] as string;
    if (arg === "--out-dir") {
      outDir = argv[++i];
      if (outDir === undefined) {
        io.err("--out-dir needs a value");
        return 1;
      }
    } else if (arg.startsWith("--")) {
      io.err(`unknown flag ${arg}`);
      return 1;
    } else {
      inputs.push(arg);
    }
  }
  if (inputs.length === 0) {
    io.err("no input files");
    return 1;
  }
  if (outDir === undefined) {
    io.err("--out-dir is required");
    return 1;
  }

  fs.mkdirSync(outDir, { recursive: true });
  for (const input of inputs) {
    let text: string;
    try {
      text = fs.readFileSync(input, "utf8");
    } catch (error) {
      io.err(`cannot read ${input}: ${(error as Error).message}`);
      return 1;
    }
    try {
      for (const image of renderCurveFile(parseCurveFile(text, input))) {
        const target = path.join(outDir, image.filename);
        fs.writeFileSync(target, image.svg, "utf8");
        io.out(`wrote ${target}`);
      }
    } catch (error) {
      if (error instanceof SchemaError) {
        io.err(`schema error in ${input} (column: ${error.column}): ${error.message}`);
        return 1;
      }
      throw error;
    }
  }
  return 0;
}

const entry = process.argv[1] ? pathToFileURL(process.argv[1]).href : "";
if (import.meta.url === entry) {
  process.exit(runCli(process.argv.slice(2)));
}
