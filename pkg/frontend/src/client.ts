/**
 * Session client: one WebSocket, optimistic versioning, and at most one
 * mutating command in flight. Later commands queue until the delta (or
 * rejection) for the current one arrives; a rejection adopts the
 * server's version and re-requests the scene so the client converges.
 */

import {
  isHeartbeat,
  isRejection,
  type Command,
  type CommandOp,
  type Delta,
  type ServerMessage,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "message", fn: (ev: { data: unknown }) => void): void;
  addEventListener(type: "open", fn: () => void): void;
  addEventListener(type: "close", fn: () => void): void;
}

export type SocketFactory = (url: string) => SocketLike;

interface PendingCommand {
  op: CommandOp;
  payload: Record<string, unknown>;
  resolve: (delta: Delta) => void;
  reject: (err: Error) => void;
}

export class SessionClient {
  version = 0;
  window: [number, number] = [0, 0];
  onDelta: ((delta: Delta) => void) | null = null;
  onResync: ((version: number) => void) | null = null;

  private socket: SocketLike;
  private queue: PendingCommand[] = [];
  private inflight: PendingCommand | null = null;
  private opened: Promise<void>;

  constructor(url: string, factory: SocketFactory) {
    this.socket = factory(url);
    this.opened = new Promise((resolve) => {
      this.socket.addEventListener("open", () => resolve());
    });
    this.socket.addEventListener("message", (ev) => {
      this.handleMessage(JSON.parse(String(ev.data)) as ServerMessage);
    });
  }

  get hasInflight(): boolean {
    return this.inflight !== null;
  }

  get queuedCount(): number {
    return this.queue.length;
  }

  async ready(): Promise<void> {
    await this.opened;
  }

  send(op: CommandOp, payload: Record<string, unknown> = {}): Promise<Delta> {
    return new Promise<Delta>((resolve, reject) => {
      this.queue.push({ op, payload, resolve, reject });
      this.pump();
    });
  }

  requestScene(first: number, last: number): Promise<Delta> {
    this.window = [first, last];
    return this.send("request_scene", { first, last });
  }

  private pump(): void {
    if (this.inflight !== null || this.queue.length === 0) return;
    this.inflight = this.queue.shift()!;
    const command: Command = {
      op: this.inflight.op,
      expected_version: this.version,
      payload: this.inflight.payload,
    };
    this.socket.send(JSON.stringify(command));
  }

  private handleMessage(msg: ServerMessage): void {
    if (isHeartbeat(msg)) return;
    const pending = this.inflight;
    this.inflight = null;
    if (isRejection(msg)) {
      // converge on the server's version, then re-request our window
      this.version = msg.current_version;
      pending?.reject(new Error(msg.error));
      this.onResync?.(msg.current_version);
      if (this.window[1] > this.window[0]) {
        this.queue.unshift({
          op: "request_scene",
          payload: { first: this.window[0], last: this.window[1] },
          resolve: (delta) => this.onDelta?.(delta),
          reject: () => undefined,
        });
      }
      this.pump();
      return;
    }
    const delta = msg as Delta;
    if (typeof delta.version === "number") this.version = delta.version;
    pending?.resolve(delta);
    this.onDelta?.(delta);
    this.pump();
  }

  close(): void {
    this.socket.close();
  }
}
