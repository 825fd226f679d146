// Real-mode extraction delegates to external model runners: a point-picking
// model, a point tracker, and a frame embedder. Each is wired in through an
// environment variable that names an executable speaking a one-shot JSON
// protocol on stdin/stdout (see README). This keeps heavyweight vision
// dependencies out of the adapter; without the runners, real mode fails
// with an error that says exactly what to install or set.

import { execFileSync } from "node:child_process";
import { existsSync } from "node:fs";

import { ModelUnavailableError } from "./errors.js";
import type { Point, TrackedPath } from "./stub.js";

export const RUNNER_VARS = {
  pointer: "HANDRV_POINTER_CMD",
  tracker: "HANDRV_TRACKER_CMD",
  embedder: "HANDRV_EMBEDDER_CMD",
} as const;

type Role = keyof typeof RUNNER_VARS;

const ROLE_DESC: Record<Role, string> = {
  pointer: "an image-to-point model (picks the query point on the middle frame)",
  tracker: "a point-tracking model (follows the point through every frame)",
  embedder: "a frame-embedding model (one vector per stored frame)",
};

function runnerFor(role: Role): string {
  const variable = RUNNER_VARS[role];
  const cmd = process.env[variable];
  if (!cmd) {
    throw new ModelUnavailableError(
      `real mode needs ${ROLE_DESC[role]}, but ${variable} is not set. ` +
        `Install a runner for it and set ${variable} to the executable, ` +
        `or use --mode stub.`
    );
  }
  if (!existsSync(cmd)) {
    throw new ModelUnavailableError(
      `${variable} points at ${cmd}, which does not exist. ` +
        `Fix the path or use --mode stub.`
    );
  }
  return cmd;
}

/** Verify all three runners are configured; raises naming the first gap. */
export function checkRunners(): void {
  (Object.keys(RUNNER_VARS) as Role[]).forEach(runnerFor);
}

function invoke(role: Role, request: unknown): any {
  const cmd = runnerFor(role);
  const out = execFileSync(cmd, {
    input: JSON.stringify(request),
    maxBuffer: 1 << 28,
  });
  return JSON.parse(out.toString("utf-8"));
}

export function selectQueryPointReal(videoPath: string, prompt: string, frame: number): Point {
  const res = invoke("pointer", { video: videoPath, prompt, frame });
  if (typeof res.x !== "number" || typeof res.y !== "number") {
    throw new ModelUnavailableError("pointer runner returned no {x, y} point");
  }
  return { x: res.x, y: res.y };
}

export function trackPointReal(videoPath: string, point: Point, nFrames: number): TrackedPath {
  const res = invoke("tracker", { video: videoPath, x: point.x, y: point.y });
  if (!Array.isArray(res.path) || res.path.length !== nFrames) {
    throw new ModelUnavailableError(
      `tracker runner must return one point per frame (${nFrames}), got ${res.path?.length}`
    );
  }
  return {
    path: res.path.map((p: number[]) => ({ x: p[0], y: p[1] })),
    clampedFrames: res.clamped_frames ?? [],
  };
}

export function embedFramesReal(
  videoPath: string,
  stride: number,
  dim: number,
  rows: number
): Buffer {
  const res = invoke("embedder", { video: videoPath, stride, dim });
  if (!Array.isArray(res.vectors) || res.vectors.length !== rows) {
    throw new ModelUnavailableError(
      `embedder runner must return ${rows} vectors, got ${res.vectors?.length}`
    );
  }
  const blob = Buffer.alloc(rows * dim * 4);
  res.vectors.forEach((vec: number[], r: number) => {
    vec.forEach((v, k) => blob.writeFloatLE(Math.fround(v), (r * dim + k) * 4));
  });
  return blob;
}
