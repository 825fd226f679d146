// Minimal YUV4MPEG2 (.y4m) reader. The format is uncompressed, so stub-mode
// extraction needs no codec: the header carries dimensions and frame rate,
// and each FRAME marker is followed by a fixed-size raw payload.

import { readFileSync } from "node:fs";

import { DecodeError } from "./errors.js";

export interface Video {
  width: number;
  height: number;
  fps: number;
  /** Raw plane bytes of each frame, in order. */
  frames: Buffer[];
}

const MAGIC = "YUV4MPEG2";

function frameBytes(width: number, height: number, colorspace: string): number {
  const pixels = width * height;
  if (colorspace.startsWith("C420")) return pixels + (pixels >> 1);
  if (colorspace.startsWith("C422")) return pixels * 2;
  if (colorspace.startsWith("C444")) return pixels * 3;
  if (colorspace.startsWith("Cmono")) return pixels;
  throw new DecodeError(`unsupported colorspace ${colorspace}`);
}

export function parseY4m(data: Buffer, name = "<buffer>"): Video {
  const headerEnd = data.indexOf(0x0a);
  if (headerEnd < 0) {
    throw new DecodeError(`${name}: missing stream header`);
  }
  const header = data.subarray(0, headerEnd).toString("ascii");
  const fields = header.split(" ");
  if (fields[0] !== MAGIC) {
    throw new DecodeError(`${name}: not a YUV4MPEG2 stream`);
  }
  let width = 0;
  let height = 0;
  let fps = 0;
  let colorspace = "C420";
  for (const field of fields.slice(1)) {
    const tag = field[0];
    const value = field.slice(1);
    if (tag === "W") width = Number(value);
    else if (tag === "H") height = Number(value);
    else if (tag === "F") {
      const [num, den] = value.split(":").map(Number);
      fps = num / den;
    } else if (tag === "C") colorspace = field;
  }
  if (!(width > 0 && height > 0)) {
    throw new DecodeError(`${name}: header lacks valid W/H`);
  }
  if (!(fps > 0)) {
    throw new DecodeError(`${name}: header lacks a valid frame rate`);
  }

  const size = frameBytes(width, height, colorspace);
  const frames: Buffer[] = [];
  let pos = headerEnd + 1;
  while (pos < data.length) {
    const markerEnd = data.indexOf(0x0a, pos);
    if (markerEnd < 0) {
      throw new DecodeError(`${name}: truncated FRAME marker`);
    }
    const marker = data.subarray(pos, markerEnd).toString("ascii");
    if (!marker.startsWith("FRAME")) {
      throw new DecodeError(`${name}: expected FRAME marker, got "${marker.slice(0, 16)}"`);
    }
    const start = markerEnd + 1;
    if (start + size > data.length) {
      throw new DecodeError(`${name}: truncated frame payload`);
    }
    frames.push(data.subarray(start, start + size));
    pos = start + size;
  }
  if (frames.length === 0) {
    throw new DecodeError(`${name}: stream contains no frames`);
  }
  return { width, height, fps, frames };
}

export function loadVideo(path: string): Video {
  if (!path.endsWith(".y4m")) {
    throw new DecodeError(
      `${path}: only uncompressed .y4m input is supported offline; ` +
        `transcode first (e.g. ffmpeg -i in.mp4 out.y4m) or use real mode`
    );
  }
  let data: Buffer;
  try {
    data = readFileSync(path);
  } catch (err) {
    throw new DecodeError(`${path}: ${(err as Error).message}`);
  }
  return parseY4m(data, path);
}
