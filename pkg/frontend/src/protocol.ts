/**
 * Line-delimited pub/sub wire format (see ../PROTOCOL.md for the grammar).
 *
 * Frames this client encodes (sub, playback pubs, get_aggregate) carry only
 * strings and integers, so their canonical bytes match the server encoder
 * exactly. JSON.stringify cannot render integral floats with a trailing
 * ".0", so re-encoding arbitrary inbound frames is not guaranteed
 * byte-identical; frame-level equality always holds.
 */

export type Op = "pub" | "sub" | "msg" | "get_aggregate" | "aggregate" | "err";

export interface Frame {
  op: Op;
  topic?: string;
  data: Record<string, unknown>;
}

export class ParseError extends Error {
  code = "parse-error";
}

export class ProtocolViolationError extends Error {
  code = "protocol-violation";
}

const OPS: Op[] = ["pub", "sub", "msg", "get_aggregate", "aggregate", "err"];
const TOPIC_RE = /^[a-z_]+(\/[A-Za-z0-9_-]+)*$/;
const PATTERN_RE = /^([a-z_]+|\+)(\/([A-Za-z0-9_-]+|\+))*$/;
const FAMILY_DEPTH: Record<string, number> = { eda: 3, playback: 3, feedback: 2 };

// Canonical data key order (and exhaustive field set) per payload kind.
const DATA_ORDER: Record<string, string[]> = {
  eda: ["t", "v"],
  playback: ["t", "e"],
  feedback: ["t", "a", "duty"],
  sub: [],
  get_aggregate: ["video"],
  aggregate: ["video_id", "grid_hz", "n_viewers", "values"],
  err: ["code", "msg"],
};

function isWallMs(v: unknown): v is number {
  return typeof v === "number" && Number.isInteger(v) && v >= 0;
}

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function payloadKind(frame: Frame): string {
  if (frame.op === "pub" || frame.op === "msg") {
    return (frame.topic ?? "").split("/")[0] ?? "";
  }
  return frame.op;
}

export function validateFrame(frame: Frame): void {
  if (!OPS.includes(frame.op)) {
    throw new ProtocolViolationError(`unknown op: ${JSON.stringify(frame.op)}`);
  }
  if (frame.op === "pub" || frame.op === "msg") {
    if (typeof frame.topic !== "string" || !TOPIC_RE.test(frame.topic)) {
      throw new ProtocolViolationError(`invalid topic: ${JSON.stringify(frame.topic)}`);
    }
    const segments = frame.topic.split("/");
    const family = segments[0] ?? "";
    const depth = FAMILY_DEPTH[family];
    if (depth !== undefined && segments.length !== depth) {
      throw new ProtocolViolationError(`topic ${frame.topic} has wrong depth for ${family}`);
    }
  } else if (frame.op === "sub") {
    if (typeof frame.topic !== "string" || !PATTERN_RE.test(frame.topic)) {
      throw new ProtocolViolationError(`invalid topic pattern: ${JSON.stringify(frame.topic)}`);
    }
  } else if (frame.topic !== undefined) {
    throw new ProtocolViolationError(`op ${frame.op} does not carry a topic`);
  }

  const data = frame.data;
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    throw new ProtocolViolationError("data must be an object");
  }
  const kind = payloadKind(frame);
  const order = DATA_ORDER[kind];
  if (!order) {
    throw new ProtocolViolationError(`unknown topic family: ${kind}`);
  }
  const keys = Object.keys(data);
  for (const key of order) {
    if (!(key in data)) throw new ProtocolViolationError(`${kind} payload missing field: ${key}`);
  }
  for (const key of keys) {
    if (!order.includes(key)) {
      throw new ProtocolViolationError(`${kind} payload has unknown field: ${key}`);
    }
  }

  if (kind === "eda") {
    if (!isWallMs(data.t)) throw new ProtocolViolationError("eda t must be a wall-clock ms integer");
    if (!isFiniteNumber(data.v)) throw new ProtocolViolationError("eda v must be a finite number");
  } else if (kind === "playback") {
    if (!isWallMs(data.t)) throw new ProtocolViolationError("playback t must be a wall-clock ms integer");
    if (data.e !== "play" && data.e !== "stop") {
      throw new ProtocolViolationError(`playback event must be play or stop, got ${JSON.stringify(data.e)}`);
    }
  } else if (kind === "feedback") {
    if (!isWallMs(data.t)) throw new ProtocolViolationError("feedback t must be a wall-clock ms integer");
    if (!isFiniteNumber(data.a) || !isFiniteNumber(data.duty)) {
      throw new ProtocolViolationError("feedback a and duty must be finite numbers");
    }
  } else if (kind === "get_aggregate") {
    if (typeof data.video !== "string" || !/^[A-Za-z0-9_-]+$/.test(data.video)) {
      throw new ProtocolViolationError("get_aggregate video must be an identifier");
    }
  } else if (kind === "aggregate") {
    if (typeof data.video_id !== "string" || !data.video_id) {
      throw new ProtocolViolationError("aggregate video_id must be a non-empty string");
    }
    if (!isFiniteNumber(data.grid_hz) || data.grid_hz <= 0) {
      throw new ProtocolViolationError("aggregate grid_hz must be positive");
    }
    if (!isWallMs(data.n_viewers) || data.n_viewers < 1) {
      throw new ProtocolViolationError("aggregate n_viewers must be a positive integer");
    }
    if (
      !Array.isArray(data.values) ||
      data.values.some((v) => !isFiniteNumber(v) || v < 0 || v > 1)
    ) {
      throw new ProtocolViolationError("aggregate values must be numbers in [0, 1]");
    }
  } else if (kind === "err") {
    if (typeof data.code !== "string" || typeof data.msg !== "string") {
      throw new ProtocolViolationError("err code and msg must be strings");
    }
  }
}

/** Serialize a frame to its canonical newline-terminated line. */
export function encode(frame: Frame): string {
  validateFrame(frame);
  const payload: Record<string, unknown> = { op: frame.op };
  if (frame.topic !== undefined) payload.topic = frame.topic;
  const ordered: Record<string, unknown> = {};
  for (const key of DATA_ORDER[payloadKind(frame)] ?? []) {
    ordered[key] = frame.data[key];
  }
  payload.data = ordered;
  return JSON.stringify(payload) + "\n";
}

/** Parse one complete line back into a frame (inverse of encode). */
export function decode(line: string): Frame {
  let text = line;
  if (text.endsWith("\n")) text = text.slice(0, -1);
  if (!text) throw new ParseError("empty line");
  if (text.includes("\n")) throw new ParseError("embedded newline inside frame");
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch (exc) {
    throw new ParseError(`malformed frame: ${(exc as Error).message}`);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ProtocolViolationError("frame must be a JSON object");
  }
  const raw = obj as Record<string, unknown>;
  if (!("op" in raw)) throw new ProtocolViolationError("frame missing op");
  if (!OPS.includes(raw.op as Op)) {
    throw new ProtocolViolationError(`unknown op: ${JSON.stringify(raw.op)}`);
  }
  for (const key of Object.keys(raw)) {
    if (!["op", "topic", "data"].includes(key)) {
      throw new ProtocolViolationError(`frame has unknown field: ${key}`);
    }
  }
  if (!("data" in raw)) throw new ProtocolViolationError("frame missing data");
  const op = raw.op as Op;
  if ((op === "pub" || op === "sub" || op === "msg") && !("topic" in raw)) {
    throw new ProtocolViolationError(`op ${op} requires a topic`);
  }
  const frame: Frame = {
    op,
    data: raw.data as Record<string, unknown>,
  };
  if ("topic" in raw) frame.topic = raw.topic as string;
  validateFrame(frame);
  return frame;
}

/** Segment-wise topic match; `+` in the pattern matches exactly one segment. */
export function topicMatch(pattern: string, topic: string): boolean {
  const p = pattern.split("/");
  const t = topic.split("/");
  if (p.length !== t.length) return false;
  return p.every((seg, i) => seg === "+" || seg === t[i]);
}

/** Reassembles newline-terminated lines from stream chunks. */
export class LineChunker {
  private buffer = "";

  feed(chunk: string): string[] {
    this.buffer += chunk;
    const lines: string[] = [];
    let nl: number;
    while ((nl = this.buffer.indexOf("\n")) >= 0) {
      lines.push(this.buffer.slice(0, nl + 1));
      this.buffer = this.buffer.slice(nl + 1);
    }
    return lines;
  }

  get pending(): string {
    return this.buffer;
  }
}

export function edaTopic(session: string, participant: string): string {
  return `eda/${session}/${participant}`;
}

export function playbackTopic(session: string, participant: string): string {
  return `playback/${session}/${participant}`;
}

export function feedbackTopic(session: string): string {
  return `feedback/${session}`;
}
