export class ExtractionError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** A video file could not be decoded into frames. */
export class DecodeError extends ExtractionError {}

/** A field of the extraction job is out of range. */
export class JobValidationError extends ExtractionError {}

/** Real mode needs a model runner that is not configured on this machine. */
export class ModelUnavailableError extends ExtractionError {}
