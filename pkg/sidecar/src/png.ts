import * as fs from "node:fs";
import { PNG } from "pngjs";

/** Decoded raster, RGBA row-major. */
export interface Raster {
  width: number;
  height: number;
  data: Uint8Array;
}

export function readPng(path: string): Raster {
  const png = PNG.sync.read(fs.readFileSync(path));
  return { width: png.width, height: png.height, data: new Uint8Array(png.data) };
}

export function writePng(path: string, raster: Raster): void {
  const png = new PNG({ width: raster.width, height: raster.height });
  png.data = Buffer.from(raster.data);
  fs.writeFileSync(path, PNG.sync.write(png));
}

export function makeRaster(width: number, height: number, fill: [number, number, number] = [0, 0, 0]): Raster {
  const data = new Uint8Array(width * height * 4);
  for (let i = 0; i < width * height; i++) {
    data[i * 4] = fill[0];
    data[i * 4 + 1] = fill[1];
    data[i * 4 + 2] = fill[2];
    data[i * 4 + 3] = 255;
  }
  return { width, height, data };
}

export function setPixel(raster: Raster, x: number, y: number, rgb: [number, number, number], alpha = 255): void {
  const i = (y * raster.width + x) * 4;
  raster.data[i] = rgb[0];
  raster.data[i + 1] = rgb[1];
  raster.data[i + 2] = rgb[2];
  raster.data[i + 3] = alpha;
}
