import * as fs from "node:fs";
import * as path from "node:path";

import { createEncoder, Encoder } from "./encoder.js";
import { readPng } from "./png.js";
import { EmbeddingRecord, writeEmbeddings } from "./records.js";
import { assertTwoValued, makeObjectSilhouette } from "./silhouette.js";

/**
 * Dataset encoding: prompts and preprocessed silhouettes for scenes,
 * RGB images and background-removed silhouettes for objects, written as
 * one embedding file the retrieval engine loads directly.
 */

export interface EncodeConfig {
  root: string;
  preprocessDir: string;
  outPath: string;
  encoder?: string;
  dim?: number;
  batchSize?: number;
}

export interface EncodeSummary {
  encoderId: string;
  scenes: number;
  objects: number;
  dims: Record<string, number>;
  emptySilhouettes: string[];
}

export class DatasetError extends Error {}

export function embedTexts(encoder: Encoder, prompts: Map<string, string>): EmbeddingRecord[] {
  if (prompts.size === 0) {
    throw new DatasetError("no prompts to embed");
  }
  const out: EmbeddingRecord[] = [];
  for (const [id, text] of prompts) {
    out.push({ id, modality: "query_text", vector: encoder.embedText(text) });
  }
  return out;
}

export function embedImages(
  encoder: Encoder,
  paths: Map<string, string>,
  modality: "object_rgb" | "query_shape" | "object_silhouette",
  batchSize = 16,
): EmbeddingRecord[] {
  const entries = [...paths.entries()];
  const out: EmbeddingRecord[] = [];
  for (let start = 0; start < entries.length; start += batchSize) {
    for (const [id, file] of entries.slice(start, start + batchSize)) {
      const img = readPng(file);
      if (modality !== "object_rgb") {
        assertTwoValued(img, file);
      }
      out.push({ id, modality, vector: encoder.embedImage(img) });
    }
  }
  return out;
}

function listDirs(parent: string): string[] {
  return fs
    .readdirSync(parent, { withFileTypes: true })
    .filter((e) => e.isDirectory())
    .map((e) => e.name)
    .sort();
}

export function encodeDataset(config: EncodeConfig): EncodeSummary {
  const encoder = createEncoder(config.encoder ?? "hash-proj-v1", config.dim ?? 64);
  const batchSize = config.batchSize ?? 16;
  const scenesDir = path.join(config.root, "scenes");
  const objectsDir = path.join(config.root, "objects");
  for (const dir of [scenesDir, objectsDir, config.preprocessDir]) {
    if (!fs.existsSync(dir) || !fs.statSync(dir).isDirectory()) {
      throw new DatasetError(`missing required directory ${dir}`);
    }
  }

  const prompts = new Map<string, string>();
  const sceneSilhouettes = new Map<string, string>();
  for (const sceneId of listDirs(scenesDir)) {
    const promptPath = path.join(scenesDir, sceneId, "query.txt");
    if (!fs.existsSync(promptPath)) {
      throw new DatasetError(`scene ${sceneId}: missing query.txt`);
    }
    let text = fs.readFileSync(promptPath, "utf-8");
    if (text.endsWith("\n")) text = text.slice(0, -1);
    if (text.endsWith("\r")) text = text.slice(0, -1);
    if (text.trim().length === 0) {
      throw new DatasetError(`scene ${sceneId}: empty prompt`);
    }
    prompts.set(sceneId, text);
    const silhouettePath = path.join(config.preprocessDir, sceneId, "silhouette.png");
    if (!fs.existsSync(silhouettePath)) {
      throw new DatasetError(
        `scene ${sceneId}: no silhouette at ${silhouettePath} (run the engine's preprocess first)`,
      );
    }
    sceneSilhouettes.set(sceneId, silhouettePath);
  }
  if (prompts.size === 0) {
    throw new DatasetError(`no scenes under ${scenesDir}`);
  }

  const objectImages = new Map<string, string>();
  for (const objectId of listDirs(objectsDir)) {
    const imagePath = path.join(objectsDir, objectId, "image.png");
    if (!fs.existsSync(imagePath)) {
      throw new DatasetError(`object ${objectId}: missing image.png`);
    }
    objectImages.set(objectId, imagePath);
  }
  if (objectImages.size === 0) {
    throw new DatasetError(`no objects under ${objectsDir}`);
  }

  const records: EmbeddingRecord[] = [];
  records.push(...embedTexts(encoder, prompts));
  records.push(...embedImages(encoder, sceneSilhouettes, "query_shape", batchSize));
  records.push(...embedImages(encoder, objectImages, "object_rgb", batchSize));

  // object silhouettes via background removal; all-background results are
  // emitted (all-black) but flagged
  const emptySilhouettes: string[] = [];
  for (const [objectId, file] of objectImages) {
    const { silhouette, foregroundPixels } = makeObjectSilhouette(readPng(file));
    if (foregroundPixels === 0) {
      emptySilhouettes.push(objectId);
    }
    records.push({
      id: objectId,
      modality: "object_silhouette",
      vector: encoder.embedImage(silhouette),
    });
  }

  fs.mkdirSync(path.dirname(path.resolve(config.outPath)), { recursive: true });
  writeEmbeddings(config.outPath, encoder.id, records);

  const dims: Record<string, number> = {};
  for (const rec of records) dims[rec.modality] = rec.vector.length;
  return {
    encoderId: encoder.id,
    scenes: prompts.size,
    objects: objectImages.size,
    dims,
    emptySilhouettes,
  };
}
