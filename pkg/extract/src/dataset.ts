// Writer for the engine's interchange format: a JSONL metadata line plus a
// raw little-endian float32 embedding blob, laid out exactly as the engine's
// loader expects (blob path relative to the dataset file).

import { appendFileSync, existsSync, mkdirSync, writeFileSync } from "node:fs";
import { basename, join } from "node:path";

import { JobValidationError } from "./errors.js";
import type { Point } from "./stub.js";

export interface ExtractionRecord {
  id: string;
  source: "play" | "hand";
  fps: number;
  path: Point[];
  clampedFrames: number[];
  stride: number;
  dim: number;
}

/** Kinematic magnitudes from tracked-point finite differences (length N). */
export function kinFromPath(path: Point[]): number[] {
  const kin: number[] = [];
  for (let t = 0; t + 1 < path.length; t++) {
    kin.push(Math.hypot(path[t + 1].x - path[t].x, path[t + 1].y - path[t].y));
  }
  kin.push(kin.length > 0 ? kin[kin.length - 1] : 0);
  return kin;
}

export function datasetLine(rec: ExtractionRecord, blobFile: string): string {
  if (rec.path.length < 2) {
    throw new JobValidationError(
      `track needs at least 2 frames, video has ${rec.path.length}`
    );
  }
  const doc: Record<string, unknown> = {
    id: rec.id,
    source: rec.source,
    fps: rec.fps,
    track: rec.path.map((p) => [p.x, p.y]),
    kin: kinFromPath(rec.path),
    kin_source: "finite_difference",
  };
  if (rec.clampedFrames.length > 0) {
    doc.clamped_frames = rec.clampedFrames;
  }
  doc.embeddings = {
    file: blobFile,
    stride: rec.stride,
    dim: rec.dim,
    dtype: "f32",
    layout: "row-major",
  };
  return JSON.stringify(doc);
}

export interface WrittenFiles {
  dataset: string;
  blob: string;
}

/**
 * Append one trajectory to ``<outDir>/dataset.jsonl`` and write its blob
 * under ``<outDir>/dataset_emb/``. Repeating a run into a fresh directory
 * reproduces identical bytes.
 */
export function writeExtraction(
  outDir: string,
  rec: ExtractionRecord,
  blob: Buffer
): WrittenFiles {
  mkdirSync(join(outDir, "dataset_emb"), { recursive: true });
  const blobRel = join("dataset_emb", `${rec.id}.f32`);
  const blobPath = join(outDir, blobRel);
  writeFileSync(blobPath, blob);
  const datasetPath = join(outDir, "dataset.jsonl");
  const line = datasetLine(rec, blobRel) + "\n";
  if (existsSync(datasetPath)) {
    appendFileSync(datasetPath, line);
  } else {
    writeFileSync(datasetPath, line);
  }
  return { dataset: datasetPath, blob: blobPath };
}

export function defaultId(videoPath: string): string {
  return basename(videoPath).replace(/\.[^.]+$/, "");
}
