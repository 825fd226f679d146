export { DecodeError, ExtractionError, JobValidationError, ModelUnavailableError } from "./errors.js";
export { loadVideo, parseY4m, type Video } from "./y4m.js";
export {
  embedFrames,
  embeddingRows,
  selectQueryPoint,
  trackPoint,
  type Point,
  type TrackedPath,
} from "./stub.js";
export { checkRunners, RUNNER_VARS } from "./real.js";
export {
  datasetLine,
  defaultId,
  kinFromPath,
  writeExtraction,
  type ExtractionRecord,
} from "./dataset.js";
export { validateDatasetFile } from "./validate.js";
export { run } from "./cli.js";
