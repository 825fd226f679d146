#!/usr/bin/env node
// extract: turn a video into one engine-ready trajectory (JSONL line + blob).
//
// Exit codes: 0 success, 1 extraction/validation error, 2 usage error.

import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { defaultId, writeExtraction } from "./dataset.js";
import { ExtractionError, JobValidationError } from "./errors.js";
import {
  checkRunners,
  embedFramesReal,
  selectQueryPointReal,
  trackPointReal,
} from "./real.js";
import { embedFrames, embeddingRows, selectQueryPoint, trackPoint } from "./stub.js";
import { validateDatasetFile } from "./validate.js";
import { loadVideo } from "./y4m.js";

const USAGE = `usage: extract --video <file.y4m> --source <play|hand> [options]

options:
  --video PATH      input video (uncompressed .y4m in stub mode)
  --source KIND     play | hand
  --mode MODE       stub | real              (default: stub)
  --prompt TEXT     point-selection prompt   (default depends on --source)
  --stride N        frames between stored embedding rows (default: 1)
  --dim N           embedding dimension      (default: 16)
  --id NAME         trajectory id            (default: video basename)
  -o, --out DIR     output directory         (required)

Writes <out>/dataset.jsonl (appending) and <out>/dataset_emb/<id>.f32.`;

export function run(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      options: {
        video: { type: "string" },
        source: { type: "string" },
        mode: { type: "string", default: "stub" },
        prompt: { type: "string" },
        stride: { type: "string", default: "1" },
        dim: { type: "string", default: "16" },
        id: { type: "string" },
        out: { type: "string", short: "o" },
        help: { type: "boolean", short: "h", default: false },
      },
      strict: true,
    }).values;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    console.error(USAGE);
    return 2;
  }
  if (args.help) {
    console.log(USAGE);
    return 0;
  }
  const missing = ["video", "source", "out"].filter((k) => !(args as any)[k]);
  if (missing.length > 0) {
    console.error(`error: missing required ${missing.map((m) => `--${m}`).join(", ")}`);
    console.error(USAGE);
    return 2;
  }
  if (args.source !== "play" && args.source !== "hand") {
    console.error(`error: --source must be play or hand, got ${args.source}`);
    return 2;
  }
  if (args.mode !== "stub" && args.mode !== "real") {
    console.error(`error: --mode must be stub or real, got ${args.mode}`);
    return 2;
  }
  const stride = Number(args.stride);
  const dim = Number(args.dim);
  const prompt =
    args.prompt ?? (args.source === "hand" ? "point at the hand" : "point at the gripper");

  try {
    if (args.mode === "real") {
      checkRunners(); // fail fast with an actionable message
    }
    const video = loadVideo(args.video!);
    const n = video.frames.length;
    if (n < 2) {
      throw new JobValidationError(`video has ${n} frame(s); need at least 2`);
    }
    const rows = embeddingRows(n, stride);
    let point, tracked, blob;
    if (args.mode === "stub") {
      point = selectQueryPoint(video, prompt);
      tracked = trackPoint(video, point);
      blob = embedFrames(video, stride, dim);
    } else {
      point = selectQueryPointReal(args.video!, prompt, Math.floor(n / 2));
      tracked = trackPointReal(args.video!, point, n);
      blob = embedFramesReal(args.video!, stride, dim, rows);
    }
    const rec = {
      id: args.id ?? defaultId(args.video!),
      source: args.source as "play" | "hand",
      fps: video.fps,
      path: tracked.path,
      clampedFrames: tracked.clampedFrames,
      stride,
      dim,
    };
    const files = writeExtraction(args.out!, rec, blob);
    validateDatasetFile(files.dataset);
    console.log(
      `${rec.id}: ${n} frames @ ${video.fps} fps, query point (${point.x}, ${point.y}), ` +
        `${rows}x${dim} embeddings -> ${files.dataset}`
    );
    return 0;
  } catch (err) {
    if (err instanceof ExtractionError || err instanceof JobValidationError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(run(process.argv.slice(2)));
}
