import { Raster } from "./png.js";

/**
 * Text and image encoders behind one interface.
 *
 * The default "hash-proj-v1" encoder is fully deterministic and needs no
 * model download: text goes through signed feature hashing of word
 * unigrams/bigrams, images through an 8x8 per-channel box-downsample
 * projected by a matrix seeded from the encoder id. Swap in a real
 * vision-language checkpoint by registering another factory; the encoder
 * id travels in the embedding file header either way.
 */

export interface Encoder {
  readonly id: string;
  readonly dim: number;
  embedText(text: string): number[];
  embedImage(img: Raster): number[];
}

const GRID = 8;
const IMAGE_FEATURES = GRID * GRID * 3 + 3;

export function createEncoder(name: string, dim = 64): Encoder {
  if (name !== "hash-proj-v1") {
    throw new Error(`unknown encoder ${JSON.stringify(name)} (available: hash-proj-v1)`);
  }
  if (!Number.isInteger(dim) || dim < 2) {
    throw new Error(`encoder dimension must be an integer >= 2, got ${dim}`);
  }
  return new HashProjectionEncoder(`${name}:d${dim}`, dim);
}

class HashProjectionEncoder implements Encoder {
  readonly id: string;
  readonly dim: number;
  private readonly projection: Float64Array;

  constructor(id: string, dim: number) {
    this.id = id;
    this.dim = dim;
    const rand = mulberry32(fnv1a(id));
    this.projection = new Float64Array(dim * IMAGE_FEATURES);
    for (let i = 0; i < this.projection.length; i++) {
      this.projection[i] = rand() < 0.5 ? -1 : 1;
    }
  }

  embedText(text: string): number[] {
    const words = text.toLowerCase().split(/\s+/).filter((w) => w.length > 0);
    if (words.length === 0) {
      throw new Error("cannot embed an empty prompt");
    }
    const tokens = [...words];
    for (let i = 0; i + 1 < words.length; i++) {
      tokens.push(`${words[i]} ${words[i + 1]}`);
    }
    const acc = new Float64Array(this.dim);
    for (const token of tokens) {
      const h = fnv1a(`${this.id}|${token}`);
      const idx = h % this.dim;
      const sign = (h >>> 16) & 1 ? 1 : -1;
      acc[idx] += sign;
    }
    return normalizeOrFallback(acc, fnv1a(text) % this.dim);
  }

  embedImage(img: Raster): number[] {
    const features = imageFeatures(img);
    const acc = new Float64Array(this.dim);
    for (let d = 0; d < this.dim; d++) {
      let sum = 0;
      const row = d * IMAGE_FEATURES;
      for (let f = 0; f < IMAGE_FEATURES; f++) {
        sum += this.projection[row + f] * features[f];
      }
      acc[d] = sum;
    }
    return normalizeOrFallback(acc, fnv1a(`${this.id}|image`) % this.dim);
  }
}

/** Per-channel GRID x GRID box averages plus global channel means, in [0, 1]. */
function imageFeatures(img: Raster): Float64Array {
  const out = new Float64Array(IMAGE_FEATURES);
  const totals = [0, 0, 0];
  for (let gy = 0; gy < GRID; gy++) {
    const y0 = Math.floor((gy * img.height) / GRID);
    const y1 = Math.max(y0 + 1, Math.floor(((gy + 1) * img.height) / GRID));
    for (let gx = 0; gx < GRID; gx++) {
      const x0 = Math.floor((gx * img.width) / GRID);
      const x1 = Math.max(x0 + 1, Math.floor(((gx + 1) * img.width) / GRID));
      const sums = [0, 0, 0];
      let count = 0;
      for (let y = Math.min(y0, img.height - 1); y < Math.min(y1, img.height); y++) {
        for (let x = Math.min(x0, img.width - 1); x < Math.min(x1, img.width); x++) {
          const i = (y * img.width + x) * 4;
          sums[0] += img.data[i];
          sums[1] += img.data[i + 1];
          sums[2] += img.data[i + 2];
          count++;
        }
      }
      const cell = (gy * GRID + gx) * 3;
      for (let c = 0; c < 3; c++) {
        out[cell + c] = count > 0 ? sums[c] / (count * 255) : 0;
        totals[c] += out[cell + c];
      }
    }
  }
  for (let c = 0; c < 3; c++) {
    out[GRID * GRID * 3 + c] = totals[c] / (GRID * GRID);
  }
  return out;
}

function normalizeOrFallback(acc: Float64Array, fallbackIndex: number): number[] {
  let norm = 0;
  for (const v of acc) norm += v * v;
  norm = Math.sqrt(norm);
  if (norm === 0) {
    // degenerate input (e.g. an all-black raster); keep the vector loadable
    acc[fallbackIndex] = 1;
    norm = 1;
  }
  return Array.from(acc, (v) => v / norm);
}

function fnv1a(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}
