// Model-free extraction: everything is derived deterministically from the
// video bytes, so the retrieval engine can be exercised fully offline.

import { createHash } from "node:crypto";

import { JobValidationError } from "./errors.js";
import type { Video } from "./y4m.js";

export interface Point {
  x: number;
  y: number;
}

export interface TrackedPath {
  /** One (x, y) per frame, clamped to the image. */
  path: Point[];
  /** Frame indices where clamping kicked in. */
  clampedFrames: number[];
}

function contentDigest(video: Video): Buffer {
  const h = createHash("sha256");
  for (const frame of video.frames) h.update(frame);
  return h.digest();
}

function allFramesIdentical(video: Video): boolean {
  const first = video.frames[0];
  return video.frames.every((f) => f.equals(first));
}

/** Query point on the middle frame; the stub returns the frame center. */
export function selectQueryPoint(video: Video, _prompt: string): Point {
  return { x: Math.floor(video.width / 2), y: Math.floor(video.height / 2) };
}

/**
 * Track a point through every frame.
 *
 * A static scene yields a constant path. Otherwise the stub emits a smooth
 * two-tone drift that passes exactly through the query point on the middle
 * frame (where the point was selected), with amplitude and phase drawn from
 * the video's content hash. Coordinates are clamped to the image and the
 * affected frames reported.
 */
export function trackPoint(video: Video, point: Point): TrackedPath {
  const n = video.frames.length;
  if (
    !(point.x >= 0 && point.x < video.width && point.y >= 0 && point.y < video.height)
  ) {
    throw new JobValidationError(
      `query point (${point.x}, ${point.y}) outside ${video.width}x${video.height} frame`
    );
  }
  if (allFramesIdentical(video)) {
    return { path: Array.from({ length: n }, () => ({ ...point })), clampedFrames: [] };
  }
  const digest = contentDigest(video);
  const unit = (i: number) => digest[i] / 255; // [0, 1]
  const mid = Math.floor(n / 2);
  const ampX = (0.1 + 0.15 * unit(0)) * video.width;
  const ampY = (0.1 + 0.15 * unit(1)) * video.height;
  const freqX = ((1 + (digest[2] % 3)) * Math.PI) / n;
  const freqY = ((1 + (digest[3] % 3)) * Math.PI) / n;
  const path: Point[] = [];
  const clampedFrames: number[] = [];
  for (let t = 0; t < n; t++) {
    const rawX = point.x + ampX * Math.sin(freqX * (t - mid));
    const rawY = point.y + ampY * Math.sin(freqY * (t - mid));
    const x = Math.min(Math.max(rawX, 0), video.width - 1);
    const y = Math.min(Math.max(rawY, 0), video.height - 1);
    if (x !== rawX || y !== rawY) clampedFrames.push(t);
    path.push({ x, y });
  }
  return { path, clampedFrames };
}

export function embeddingRows(nFrames: number, stride: number): number {
  if (!Number.isInteger(stride) || stride < 1) {
    throw new JobValidationError(`stride must be an integer >= 1, got ${stride}`);
  }
  return Math.ceil(nFrames / stride);
}

/**
 * Per-frame embeddings as a little-endian float32 blob,
 * ceil(n/stride) rows of `dim` values in [-1, 1].
 *
 * Each stored row hashes its frame's bytes, so identical videos embed
 * identically and any pixel change moves the vector.
 */
export function embedFrames(video: Video, stride: number, dim = 16): Buffer {
  if (!Number.isInteger(dim) || dim < 1) {
    throw new JobValidationError(`dim must be an integer >= 1, got ${dim}`);
  }
  const rows = embeddingRows(video.frames.length, stride);
  const blob = Buffer.alloc(rows * dim * 4);
  for (let r = 0; r < rows; r++) {
    const frame = video.frames[r * stride];
    const values: number[] = [];
    let block = 0;
    while (values.length < dim) {
      const digest = createHash("sha256")
        .update(frame)
        .update(Buffer.from([block]))
        .digest();
      for (const byte of digest) {
        if (values.length === dim) break;
        values.push((byte / 255) * 2 - 1);
      }
      block += 1;
    }
    for (let k = 0; k < dim; k++) {
      blob.writeFloatLE(Math.fround(values[k]), (r * dim + k) * 4);
    }
  }
  return blob;
}
