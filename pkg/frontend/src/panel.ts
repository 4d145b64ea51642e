/**
 * DOM glue: binds the client, sync loop, overlay renderer and playback
 * publisher to the control panel page.
 */

import { matchesFeedback, PanelClient } from "./client.js";
import { Aggregate, parseAggregateFile, parseKeyframesFile } from "./feedback.js";
import { Design, OverlayState, renderOverlay } from "./overlay.js";
import { PlaybackPublisher } from "./playback.js";
import { Frame } from "./protocol.js";
import { aggregateCurve, keyframeCurve, MagnitudeCurve, SyncLoop } from "./sync.js";

interface PanelElements {
  serverUrl: HTMLInputElement;
  session: HTMLInputElement;
  participant: HTMLInputElement;
  video: HTMLInputElement;
  connect: HTMLButtonElement;
  loadAggregate: HTMLButtonElement;
  status: HTMLElement;
  notice: HTMLElement;
  file: HTMLInputElement;
  curveFile: HTMLInputElement;
  player: HTMLVideoElement;
  halo: HTMLElement;
  bolt: HTMLElement;
  meter: HTMLElement;
  meterFill: HTMLElement;
  meterLabel: HTMLElement;
  magnitude: HTMLElement;
  traffic: HTMLElement;
  designInputs: () => NodeListOf<HTMLInputElement>;
}

const TRAFFIC_LIMIT = 14;

export class Panel {
  private client = new PanelClient();
  private sync = new SyncLoop((a, t) => this.onMagnitude(a, t));
  private publisher: PlaybackPublisher | null = null;
  private aggregate: Aggregate | null = null;
  private design: Design = "none";
  private magnitude = 0;

  constructor(private readonly el: PanelElements) {}

  bind(): void {
    this.el.connect.addEventListener("click", () => void this.connect());
    this.el.loadAggregate.addEventListener("click", () => void this.loadAggregate());
    this.el.file.addEventListener("change", () => this.loadLocalVideo());
    this.el.curveFile.addEventListener("change", () => void this.loadCurveFile());
    this.el.player.addEventListener("play", () => this.publish("play"));
    this.el.player.addEventListener("pause", () => this.publish("stop"));
    this.el.player.addEventListener("ended", () => this.publish("stop"));
    for (const input of this.el.designInputs()) {
      input.addEventListener("change", () => {
        if (input.checked) this.setDesign(input.value as Design);
      });
    }
    this.client.onFrame((frame) => this.onFrame(frame));
    this.apply(renderOverlay("none", 0));
  }

  private wsUrl(): string {
    const base = this.el.serverUrl.value.trim().replace(/\/+$/, "");
    return base.replace(/^http/, "ws") + "/ws";
  }

  private async connect(): Promise<void> {
    try {
      await this.client.connect(this.wsUrl());
    } catch (exc) {
      this.setStatus(`connection failed: ${(exc as Error).message}`, true);
      return;
    }
    const session = this.el.session.value.trim();
    const participant = this.el.participant.value.trim();
    this.publisher = new PlaybackPublisher(
      (line) => this.client.sendLine(line),
      session,
      participant,
    );
    this.client.subscribe(`feedback/${session}`);
    this.setStatus(`connected to ${this.wsUrl()} as ${participant}`, false);
  }

  private async loadAggregate(): Promise<void> {
    const video = this.el.video.value.trim();
    try {
      this.aggregate = await this.client.getAggregate(video);
    } catch (exc) {
      this.aggregate = null;
      this.sync.stop();
      this.apply(renderOverlay("none", 0));
      this.el.notice.textContent = `overlay disabled: ${(exc as Error).message}`;
      this.el.notice.hidden = false;
      return;
    }
    this.el.notice.hidden = true;
    this.setStatus(
      `aggregate loaded: ${this.aggregate.values.length} points, ${this.aggregate.n_viewers} viewers`,
      false,
    );
    this.startSync(aggregateCurve(this.aggregate));
  }

  private loadLocalVideo(): void {
    const file = this.el.file.files?.[0];
    if (file) {
      this.el.player.src = URL.createObjectURL(file);
    }
  }

  private startSync(curve: MagnitudeCurve): void {
    this.sync.start(curve, { currentTimeS: () => this.el.player.currentTime });
  }

  /** Offline path: drive the overlay from a local aggregate/keyframe file. */
  private async loadCurveFile(): Promise<void> {
    const file = this.el.curveFile.files?.[0];
    if (!file) return;
    const text = await file.text();
    try {
      const agg = parseAggregateFile(text);
      this.el.notice.hidden = true;
      this.setStatus(`aggregate file loaded: ${agg.values.length} points`, false);
      this.startSync(aggregateCurve(agg));
      return;
    } catch {
      /* try the keyframe layout next */
    }
    try {
      const timeline = parseKeyframesFile(text);
      this.el.notice.hidden = true;
      this.setStatus(
        `keyframes file loaded: ${timeline.design}, ${timeline.keyframes.length} keyframes`,
        false,
      );
      this.startSync(keyframeCurve(timeline));
    } catch (exc) {
      this.setStatus(`cannot read ${file.name}: ${(exc as Error).message}`, true);
    }
  }

  private publish(kind: "play" | "stop"): void {
    const frame = this.publisher?.record(kind, Date.now());
    if (frame) this.logTraffic("out", frame);
  }

  setDesign(design: Design): void {
    this.design = design;
    this.apply(renderOverlay(this.design, this.magnitude));
  }

  private onMagnitude(a: number, videoTimeS: number): void {
    this.magnitude = a;
    this.el.magnitude.textContent = `a = ${a.toFixed(3)} @ ${videoTimeS.toFixed(1)}s`;
    this.apply(renderOverlay(this.design, a));
  }

  private onFrame(frame: Frame): void {
    this.logTraffic("in", frame);
    if (matchesFeedback(frame, this.el.session.value.trim())) {
      const duty = Number(frame.data.duty ?? 0);
      this.el.meterLabel.textContent = `live duty ${duty.toFixed(3)}`;
    }
  }

  private apply(state: OverlayState): void {
    const halo = this.el.halo;
    halo.style.opacity = String(state.ambient.opacity);
    halo.style.boxShadow = state.ambient.visible
      ? `0 0 ${state.ambient.haloRadiusPx}px ${state.ambient.haloRadiusPx / 2}px #7fd4ff`
      : "none";
    halo.style.visibility = state.ambient.visible ? "visible" : "hidden";

    const bolt = this.el.bolt;
    bolt.style.visibility = state.icon.visible ? "visible" : "hidden";
    bolt.style.transform = `scale(${state.icon.visible ? state.icon.scale : 0})`;

    this.el.meter.style.visibility = state.meter.visible ? "visible" : "hidden";
    this.el.meterFill.style.width = `${(state.meter.duty / 0.7) * 100}%`;
  }

  private logTraffic(direction: "in" | "out", frame: Frame): void {
    const row = document.createElement("div");
    row.className = `traffic-row traffic-${direction}`;
    row.textContent = `${direction === "in" ? "<-" : "->"} ${frame.op} ${frame.topic ?? ""} ${JSON.stringify(frame.data)}`;
    this.el.traffic.prepend(row);
    while (this.el.traffic.childElementCount > TRAFFIC_LIMIT) {
      this.el.traffic.lastElementChild?.remove();
    }
  }

  private setStatus(text: string, isError: boolean): void {
    this.el.status.textContent = text;
    this.el.status.classList.toggle("error", isError);
  }
}

export function mountPanel(): Panel {
  const get = <T extends HTMLElement>(id: string) => {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
  };
  const panel = new Panel({
    serverUrl: get<HTMLInputElement>("server-url"),
    session: get<HTMLInputElement>("session-id"),
    participant: get<HTMLInputElement>("participant-id"),
    video: get<HTMLInputElement>("video-id"),
    connect: get<HTMLButtonElement>("connect"),
    loadAggregate: get<HTMLButtonElement>("load-aggregate"),
    status: get("status"),
    notice: get("notice"),
    file: get<HTMLInputElement>("video-file"),
    curveFile: get<HTMLInputElement>("curve-file"),
    player: get<HTMLVideoElement>("player"),
    halo: get("halo"),
    bolt: get("bolt"),
    meter: get("meter"),
    meterFill: get("meter-fill"),
    meterLabel: get("meter-label"),
    magnitude: get("magnitude"),
    traffic: get("traffic"),
    designInputs: () =>
      document.querySelectorAll<HTMLInputElement>('input[name="design"]'),
  });
  panel.bind();
  return panel;
}
