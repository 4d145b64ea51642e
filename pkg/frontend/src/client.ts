/**
 * WebSocket client for the stream server: framing, subscriptions, and
 * aggregate retrieval over the wire protocol.
 */

import {
  Aggregate,
} from "./feedback.js";
import {
  decode,
  encode,
  Frame,
  LineChunker,
  topicMatch,
} from "./protocol.js";

export type FrameHandler = (frame: Frame) => void;

export class PanelClient {
  private ws: WebSocket | null = null;
  private chunker = new LineChunker();
  private handlers: FrameHandler[] = [];
  private pendingAggregate: {
    resolve: (agg: Aggregate) => void;
    reject: (err: Error) => void;
  } | null = null;

  onFrame(handler: FrameHandler): void {
    this.handlers.push(handler);
  }

  get connected(): boolean {
    return this.ws !== null && this.ws.readyState === WebSocket.OPEN;
  }

  connect(wsUrl: string): Promise<void> {
    this.close();
    this.chunker = new LineChunker();
    return new Promise((resolve, reject) => {
      const ws = new WebSocket(wsUrl);
      ws.onopen = () => resolve();
      ws.onerror = () => reject(new Error(`cannot connect to ${wsUrl}`));
      ws.onmessage = (event) => {
        const text = typeof event.data === "string" ? event.data : "";
        for (const line of this.chunker.feed(text)) {
          this.dispatch(line);
        }
      };
      this.ws = ws;
    });
  }

  close(): void {
    if (this.ws) {
      this.ws.close();
      this.ws = null;
    }
  }

  /** Send one encoded line; false when the socket is not open. */
  sendLine(line: string): boolean {
    if (!this.connected || !this.ws) return false;
    this.ws.send(line);
    return true;
  }

  sendFrame(frame: Frame): boolean {
    return this.sendLine(encode(frame));
  }

  subscribe(pattern: string): boolean {
    return this.sendFrame({ op: "sub", topic: pattern, data: {} });
  }

  /** Fetch a video's aggregate; rejects on err replies (e.g. not_found). */
  getAggregate(video: string): Promise<Aggregate> {
    return new Promise((resolve, reject) => {
      this.pendingAggregate = { resolve, reject };
      if (!this.sendFrame({ op: "get_aggregate", data: { video } })) {
        this.pendingAggregate = null;
        reject(new Error("not connected"));
      }
    });
  }

  private dispatch(line: string): void {
    let frame: Frame;
    try {
      frame = decode(line);
    } catch {
      return; // a corrupted line poisons only itself
    }
    if (frame.op === "aggregate" && this.pendingAggregate) {
      this.pendingAggregate.resolve(frame.data as unknown as Aggregate);
      this.pendingAggregate = null;
    } else if (frame.op === "err" && this.pendingAggregate) {
      const data = frame.data as { code?: string; msg?: string };
      this.pendingAggregate.reject(new Error(`${data.code}: ${data.msg}`));
      this.pendingAggregate = null;
    }
    for (const handler of this.handlers) {
      handler(frame);
    }
  }
}

export function matchesFeedback(frame: Frame, session: string): boolean {
  return (
    frame.op === "msg" &&
    typeof frame.topic === "string" &&
    topicMatch(`feedback/${session}`, frame.topic)
  );
}
