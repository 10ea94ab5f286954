#!/usr/bin/env node
import * as fs from "node:fs";
import { parseArgs } from "node:util";

import { DatasetError, encodeDataset } from "./encode.js";
import { NonBinarySilhouetteError } from "./silhouette.js";

const USAGE = `usage: samurai-sidecar encode --root DIR --preprocess DIR --out FILE
                              [--encoder hash-proj-v1] [--dim 64] [--batch 16]
                              [--report FILE]

Encodes a dataset into the engine's embedding file format: query prompts
and preprocessed silhouettes for scenes, RGB images and background-removed
silhouettes for objects.`;

function fail(message: string, code: number): never {
  process.stderr.write(`error: ${message}\n`);
  process.exit(code);
}

export function run(argv: string[]): void {
  if (argv[0] !== "encode") {
    process.stderr.write(USAGE + "\n");
    process.exit(argv[0] === "--help" || argv[0] === "-h" ? 0 : 2);
  }
  let parsed;
  try {
    parsed = parseArgs({
      args: argv.slice(1),
      options: {
        root: { type: "string" },
        preprocess: { type: "string" },
        out: { type: "string" },
        encoder: { type: "string", default: "hash-proj-v1" },
        dim: { type: "string", default: "64" },
        batch: { type: "string", default: "16" },
        report: { type: "string" },
      },
    });
  } catch (err) {
    fail(String(err instanceof Error ? err.message : err), 2);
  }
  const { values } = parsed;
  if (!values.root || !values.preprocess || !values.out) {
    process.stderr.write(USAGE + "\n");
    process.exit(2);
  }
  const dim = Number(values.dim);
  const batch = Number(values.batch);
  if (!Number.isInteger(dim) || dim < 2 || !Number.isInteger(batch) || batch < 1) {
    fail(`--dim and --batch must be positive integers, got ${values.dim}/${values.batch}`, 2);
  }

  try {
    const summary = encodeDataset({
      root: values.root,
      preprocessDir: values.preprocess,
      outPath: values.out,
      encoder: values.encoder,
      dim,
      batchSize: batch,
    });
    if (values.report) {
      fs.writeFileSync(values.report, JSON.stringify(summary, null, 2) + "\n", "utf-8");
    }
    for (const objectId of summary.emptySilhouettes) {
      process.stderr.write(`warning: ${objectId}: background removal found no foreground\n`);
    }
    process.stdout.write(
      `encoded ${summary.scenes} scenes and ${summary.objects} objects ` +
        `with ${summary.encoderId} -> ${values.out}\n`,
    );
  } catch (err) {
    if (err instanceof DatasetError || err instanceof NonBinarySilhouetteError) {
      fail(err.message, 3);
    }
    if (err instanceof Error && err.message.startsWith("unknown encoder")) {
      fail(err.message, 2);
    }
    throw err;
  }
}

run(process.argv.slice(2));
