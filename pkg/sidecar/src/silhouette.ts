import { Raster } from "./png.js";

/**
 * Background removal stand-in producing an alpha matte in [0, 1].
 *
 * When the image carries a real alpha channel it is used directly.
 * Otherwise the background color is estimated from the border pixels and
 * the matte is the normalized color distance to it, so objects that stand
 * out from a plain backdrop survive thresholding.
 */

const MAX_DIST = Math.sqrt(3 * 255 * 255);

export type MatteSource = "alpha" | "border-distance";

export interface Matte {
  values: Float64Array;
  source: MatteSource;
}

export class NonBinarySilhouetteError extends Error {}

export function extractMatte(img: Raster): Matte {
  const n = img.width * img.height;
  const values = new Float64Array(n);
  let hasAlpha = false;
  for (let i = 0; i < n; i++) {
    if (img.data[i * 4 + 3] < 255) {
      hasAlpha = true;
      break;
    }
  }
  if (hasAlpha) {
    for (let i = 0; i < n; i++) {
      values[i] = img.data[i * 4 + 3] / 255;
    }
    return { values, source: "alpha" };
  }

  const bg = borderMeanColor(img);
  for (let i = 0; i < n; i++) {
    const dr = img.data[i * 4] - bg[0];
    const dg = img.data[i * 4 + 1] - bg[1];
    const db = img.data[i * 4 + 2] - bg[2];
    values[i] = Math.sqrt(dr * dr + dg * dg + db * db) / MAX_DIST;
  }
  return { values, source: "border-distance" };
}

function borderMeanColor(img: Raster): [number, number, number] {
  let r = 0;
  let g = 0;
  let b = 0;
  let count = 0;
  const add = (x: number, y: number) => {
    const i = (y * img.width + x) * 4;
    r += img.data[i];
    g += img.data[i + 1];
    b += img.data[i + 2];
    count++;
  };
  for (let x = 0; x < img.width; x++) {
    add(x, 0);
    if (img.height > 1) add(x, img.height - 1);
  }
  for (let y = 1; y < img.height - 1; y++) {
    add(0, y);
    if (img.width > 1) add(img.width - 1, y);
  }
  return [r / count, g / count, b / count];
}

/** Matte >= threshold becomes white foreground; everything else black. */
export function thresholdMatte(img: Raster, matte: Matte, threshold = 0.5): Raster {
  const n = img.width * img.height;
  const data = new Uint8Array(n * 4);
  for (let i = 0; i < n; i++) {
    const v = matte.values[i] >= threshold ? 255 : 0;
    data[i * 4] = v;
    data[i * 4 + 1] = v;
    data[i * 4 + 2] = v;
    data[i * 4 + 3] = 255;
  }
  return { width: img.width, height: img.height, data };
}

export interface SilhouetteResult {
  silhouette: Raster;
  foregroundPixels: number;
  source: MatteSource;
}

export function makeObjectSilhouette(img: Raster): SilhouetteResult {
  const matte = extractMatte(img);
  const silhouette = thresholdMatte(img, matte, 0.5);
  let foregroundPixels = 0;
  for (let i = 0; i < img.width * img.height; i++) {
    if (silhouette.data[i * 4] === 255) foregroundPixels++;
  }
  return { silhouette, foregroundPixels, source: matte.source };
}

/** Every pixel must be pure black or pure white (alpha 255). */
export function isTwoValued(img: Raster): boolean {
  for (let i = 0; i < img.width * img.height; i++) {
    const r = img.data[i * 4];
    const g = img.data[i * 4 + 1];
    const b = img.data[i * 4 + 2];
    const a = img.data[i * 4 + 3];
    if (a !== 255) return false;
    if (!((r === 0 && g === 0 && b === 0) || (r === 255 && g === 255 && b === 255))) {
      return false;
    }
  }
  return true;
}

export function assertTwoValued(img: Raster, label: string): void {
  if (!isTwoValued(img)) {
    throw new NonBinarySilhouetteError(
      `${label}: silhouette has pixels other than pure black/white`,
    );
  }
}
