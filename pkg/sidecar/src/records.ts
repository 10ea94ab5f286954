import * as fs from "node:fs";

/**
 * The engine's embedding interchange format: one JSON object per line,
 * UTF-8, LF endings, a header line first, records sorted by modality then
 * id. Silhouette polarity is fixed to white-on-black and recorded in the
 * header so the loader can reject mismatched conventions.
 */

export type Modality = "object_rgb" | "object_silhouette" | "query_text" | "query_shape";

export const SILHOUETTE_POLARITY = "white_on_black";

export interface EmbeddingRecord {
  id: string;
  modality: Modality;
  vector: number[];
}

export function writeEmbeddings(path: string, encoderId: string, records: EmbeddingRecord[]): void {
  const sorted = [...records].sort((a, b) =>
    a.modality === b.modality
      ? a.id.localeCompare(b.id)
      : a.modality.localeCompare(b.modality),
  );
  const dims: Record<string, number> = {};
  for (const rec of sorted) {
    if (!(rec.modality in dims)) {
      dims[rec.modality] = rec.vector.length;
    } else if (dims[rec.modality] !== rec.vector.length) {
      throw new Error(
        `inconsistent ${rec.modality} dimensions: ${dims[rec.modality]} vs ${rec.vector.length} (${rec.id})`,
      );
    }
  }
  const lines = [
    JSON.stringify({
      header: { encoder: encoderId, silhouette: SILHOUETTE_POLARITY, dims },
    }),
  ];
  const seen = new Set<string>();
  for (const rec of sorted) {
    const key = `${rec.modality}/${rec.id}`;
    if (seen.has(key)) {
      throw new Error(`duplicate record ${key}`);
    }
    seen.add(key);
    lines.push(JSON.stringify({ id: rec.id, modality: rec.modality, vector: rec.vector }));
  }
  fs.writeFileSync(path, lines.join("\n") + "\n", "utf-8");
}
