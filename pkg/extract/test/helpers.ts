import { Buffer } from "node:buffer";

/** Build an uncompressed mono y4m stream with the given frame payloads. */
export function makeY4m(
  width: number,
  height: number,
  frames: Buffer[],
  fps = "5:1"
): Buffer {
  const header = Buffer.from(`YUV4MPEG2 W${width} H${height} F${fps} Ip A1:1 Cmono\n`);
  const marker = Buffer.from("FRAME\n");
  const parts: Buffer[] = [header];
  for (const frame of frames) {
    if (frame.length !== width * height) {
      throw new Error(`frame payload must be ${width * height} bytes`);
    }
    parts.push(marker, frame);
  }
  return Buffer.concat(parts);
}

/** n frames of a moving gradient (all distinct). */
export function movingFrames(width: number, height: number, n: number): Buffer[] {
  return Array.from({ length: n }, (_, t) => {
    const frame = Buffer.alloc(width * height);
    for (let i = 0; i < frame.length; i++) frame[i] = (i + 7 * t) % 256;
    return frame;
  });
}

/** n byte-identical frames. */
export function staticFrames(width: number, height: number, n: number): Buffer[] {
  const frame = Buffer.alloc(width * height, 42);
  return Array.from({ length: n }, () => Buffer.from(frame));
}
