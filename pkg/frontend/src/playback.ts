/**
 * Publishes the local player's play/stop events on the wire.
 *
 * The server's timeline validation requires strict play/stop alternation
 * with strictly increasing timestamps, so the publisher drops same-kind
 * repeats (browsers fire redundant play/pause events) and bumps equal
 * timestamps forward by 1 ms. While disconnected, frames queue in a
 * bounded buffer that drops the oldest entry past 1000.
 */

import { encode, Frame, playbackTopic } from "./protocol.js";

export type SendFn = (line: string) => boolean;

export const MAX_QUEUE = 1000;

export class PlaybackPublisher {
  private lastKind: "play" | "stop" | null = null;
  private lastT = -1;
  private queue: string[] = [];
  private dropped = 0;

  constructor(
    private readonly send: SendFn,
    private readonly session: string,
    private readonly participant: string,
    private readonly maxQueue: number = MAX_QUEUE,
  ) {}

  /** Record a player event; returns the published frame or null if deduped. */
  record(kind: "play" | "stop", tWallMs: number): Frame | null {
    if (kind === this.lastKind) return null;
    if (this.lastKind === null && kind === "stop") return null; // timelines begin with play
    const t = Math.max(Math.floor(tWallMs), this.lastT + 1);
    this.lastKind = kind;
    this.lastT = t;
    const frame: Frame = {
      op: "pub",
      topic: playbackTopic(this.session, this.participant),
      data: { t, e: kind },
    };
    this.enqueue(encode(frame));
    return frame;
  }

  private enqueue(line: string): void {
    this.queue.push(line);
    while (this.queue.length > this.maxQueue) {
      this.queue.shift();
      this.dropped += 1;
    }
    this.flush();
  }

  /** Try to send everything queued; stops at the first refusal. */
  flush(): void {
    while (this.queue.length > 0) {
      const line = this.queue[0]!;
      if (!this.send(line)) return;
      this.queue.shift();
    }
  }

  get queuedCount(): number {
    return this.queue.length;
  }

  get droppedCount(): number {
    return this.dropped;
  }
}
