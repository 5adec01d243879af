/**
 * Reconnecting stream client. Messages are queued and drained by the render
 * loop between animation ticks; the server resends a full structure snapshot
 * on reconnect, so no client-side state survives a drop.
 */

import { parseMessage, type StreamMessage } from "./messages.js";

export class StreamClient {
  private ws: WebSocket | null = null;
  private backoff = 500;
  private queue: StreamMessage[] = [];
  private closed = false;

  constructor(
    private readonly url: string,
    private readonly onStatus: (status: string) => void = () => {},
  ) {
    this.connect();
  }

  private connect(): void {
    if (this.closed) return;
    this.onStatus("connecting");
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.addEventListener("open", () => {
      this.backoff = 500;
      this.onStatus("live");
    });
    ws.addEventListener("message", (event: MessageEvent) => {
      const msg = parseMessage(String(event.data));
      if (msg) this.queue.push(msg);
    });
    ws.addEventListener("close", () => {
      if (this.closed) return;
      this.onStatus("disconnected, retrying");
      setTimeout(() => this.connect(), this.backoff);
      this.backoff = Math.min(this.backoff * 2, 15_000);
    });
    ws.addEventListener("error", () => ws.close());
  }

  /** Hand over everything received since the last drain. */
  drain(): StreamMessage[] {
    if (this.queue.length === 0) return [];
    const pending = this.queue;
    this.queue = [];
    return pending;
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}

export function streamUrl(params: URLSearchParams, location: Location): string {
  const host = params.get("host") ?? location.hostname ?? "127.0.0.1";
  const port = params.get("port") ?? "7072";
  return `ws://${host}:${port}/stream`;
}
