// Post-write self-check: re-read the files we produced and verify the
// interchange invariants the engine's loader will enforce. Catches writer
// regressions at the source instead of downstream.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";

import { JobValidationError } from "./errors.js";

export function validateDatasetFile(datasetPath: string): void {
  const text = readFileSync(datasetPath, "utf-8");
  const seen = new Set<string>();
  text.split("\n").forEach((line, idx) => {
    if (!line.trim()) return;
    const where = `${datasetPath}:${idx + 1}`;
    let rec: any;
    try {
      rec = JSON.parse(line);
    } catch (err) {
      throw new JobValidationError(`${where}: malformed JSON: ${(err as Error).message}`);
    }
    for (const key of ["id", "source", "fps", "track"]) {
      if (!(key in rec)) throw new JobValidationError(`${where}: missing '${key}'`);
    }
    if (seen.has(rec.id)) throw new JobValidationError(`${where}: duplicate id ${rec.id}`);
    seen.add(rec.id);
    if (rec.source !== "play" && rec.source !== "hand") {
      throw new JobValidationError(`${where}: bad source ${rec.source}`);
    }
    if (!(rec.fps > 0)) throw new JobValidationError(`${where}: fps must be > 0`);
    const n = rec.track.length;
    if (n < 2) throw new JobValidationError(`${where}: track needs >= 2 points`);
    for (const p of rec.track) {
      if (!Array.isArray(p) || p.length !== 2 || !p.every(Number.isFinite)) {
        throw new JobValidationError(`${where}: track entries must be finite [x, y]`);
      }
    }
    if (rec.kin !== undefined) {
      if (rec.kin.length !== n || !rec.kin.every((v: number) => Number.isFinite(v) && v >= 0)) {
        throw new JobValidationError(`${where}: kin must be ${n} finite values >= 0`);
      }
    }
    if (rec.embeddings !== undefined) {
      const emb = rec.embeddings;
      if (emb.dtype !== "f32" || emb.layout !== "row-major") {
        throw new JobValidationError(`${where}: unsupported embedding encoding`);
      }
      if (!(Number.isInteger(emb.stride) && emb.stride >= 1 && Number.isInteger(emb.dim) && emb.dim >= 1)) {
        throw new JobValidationError(`${where}: embedding stride/dim out of range`);
      }
      const rows = Math.ceil(n / emb.stride);
      const blob = readFileSync(join(dirname(datasetPath), emb.file));
      const expected = rows * emb.dim * 4;
      if (blob.length !== expected) {
        throw new JobValidationError(
          `${where}: blob ${emb.file} has ${blob.length} bytes, expected ${expected}`
        );
      }
      for (let i = 0; i < blob.length; i += 4) {
        if (!Number.isFinite(blob.readFloatLE(i))) {
          throw new JobValidationError(`${where}: blob ${emb.file} holds non-finite values`);
        }
      }
    }
  });
}
