import { describe, expect, it } from "vitest";

import { makeRaster, setPixel } from "../src/png.js";
import {
  NonBinarySilhouetteError,
  assertTwoValued,
  extractMatte,
  isTwoValued,
  makeObjectSilhouette,
  thresholdMatte,
} from "../src/silhouette.js";

describe("extractMatte", () => {
  it("uses the alpha channel when present", () => {
    const img = makeRaster(4, 4, [200, 10, 10]);
    setPixel(img, 1, 1, [200, 10, 10], 0);
    const matte = extractMatte(img);
    expect(matte.source).toBe("alpha");
    expect(matte.values[4 * 1 + 1]).toBe(0);
    expect(matte.values[0]).toBe(1);
  });

  it("falls back to border color distance", () => {
    const img = makeRaster(6, 6, [0, 0, 0]);
    setPixel(img, 3, 3, [255, 255, 255]);
    const matte = extractMatte(img);
    expect(matte.source).toBe("border-distance");
    expect(matte.values[6 * 3 + 3]).toBeCloseTo(1, 10);
    expect(matte.values[0]).toBe(0);
  });
});

describe("thresholdMatte", () => {
  it("treats exactly 0.5 as foreground", () => {
    const img = makeRaster(1, 2);
    const matte = { values: new Float64Array([0.5, 0.4999]), source: "alpha" as const };
    const sil = thresholdMatte(img, matte);
    expect(sil.data[0]).toBe(255);
    expect(sil.data[4]).toBe(0);
  });
});

describe("makeObjectSilhouette", () => {
  it("extracts a foreground blob", () => {
    const img = makeRaster(8, 8, [10, 10, 10]);
    for (let y = 2; y < 6; y++) {
      for (let x = 2; x < 6; x++) setPixel(img, x, y, [240, 240, 240]);
    }
    const result = makeObjectSilhouette(img);
    expect(result.foregroundPixels).toBe(16);
    expect(isTwoValued(result.silhouette)).toBe(true);
  });

  it("flags all-background results but still emits all black", () => {
    const img = makeRaster(5, 5, [77, 77, 77]);
    const result = makeObjectSilhouette(img);
    expect(result.foregroundPixels).toBe(0);
    expect(isTwoValued(result.silhouette)).toBe(true);
    for (let i = 0; i < 25; i++) expect(result.silhouette.data[i * 4]).toBe(0);
  });

  it("marks a fully-foreground matte all white", () => {
    const img = makeRaster(3, 3, [0, 0, 0]);
    for (let i = 0; i < 9; i++) img.data[i * 4 + 3] = 255;
    img.data[3] = 254; // one translucent pixel switches to the alpha matte
    const result = makeObjectSilhouette(img);
    expect(result.source).toBe("alpha");
    expect(result.foregroundPixels).toBe(9); // 254/255 is still >= 0.5
  });
});

describe("two-valued validation", () => {
  it("accepts pure black/white", () => {
    const img = makeRaster(2, 2, [0, 0, 0]);
    setPixel(img, 0, 0, [255, 255, 255]);
    expect(() => assertTwoValued(img, "x")).not.toThrow();
  });

  it("rejects antialiased gray", () => {
    const img = makeRaster(2, 2, [0, 0, 0]);
    setPixel(img, 1, 1, [128, 128, 128]);
    expect(() => assertTwoValued(img, "x")).toThrow(NonBinarySilhouetteError);
  });

  it("rejects translucent pixels", () => {
    const img = makeRaster(2, 2, [255, 255, 255]);
    img.data[3] = 200;
    expect(isTwoValued(img)).toBe(false);
  });
});
