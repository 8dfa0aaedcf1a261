import { describe, expect, it } from "vitest";

import {
  SariClient,
  isBroadcast,
  type ServerMessage,
  type SocketLike,
} from "../src/protocol.js";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  onmessage: ((ev: { data: string }) => void) | null = null;
  onclose: (() => void) | null = null;
  onopen: (() => void) | null = null;
  closed = false;

  send(data: string): void {
    this.sent.push(data);
  }
  close(): void {
    this.closed = true;
    this.onclose?.();
  }
  reply(msg: unknown): void {
    this.onmessage?.({ data: JSON.stringify(msg) });
  }
}

describe("SariClient", () => {
  it("pairs replies to requests by id", async () => {
    const socket = new FakeSocket();
    const client = new SariClient(socket);
    const p1 = client.call("GetEnvInfo");
    const p2 = client.call("TransformAgent", { T: [0, 0, 0.1] });
    const sent = socket.sent.map((s) => JSON.parse(s));
    expect(sent.map((e) => e.id)).toEqual([1, 2]);
    // answer out of order: each promise still gets its own reply
    socket.reply({ id: 2, status: "ok", payload: { moved: true }, tick: 0.05 });
    socket.reply({ id: 1, status: "ok", payload: { layout: 1 }, tick: 0.05 });
    expect((await p1).payload).toEqual({ layout: 1 });
    expect((await p2).payload).toEqual({ moved: true });
  });

  it("routes broadcasts without touching pending requests", async () => {
    const socket = new FakeSocket();
    const client = new SariClient(socket);
    const seen: number[] = [];
    client.onBroadcast = (b) => seen.push(b.tick);
    const p = client.call("GetEnvInfo");
    socket.reply({
      broadcast: "state",
      tick: 1.5,
      payload: { env: {}, cart: { phase: "IDLE", lines: [], total_cents: 0 }, task: null },
    });
    socket.reply({ id: 1, status: "ok", payload: {}, tick: 1.5 });
    await p;
    expect(seen).toEqual([1.5]);
  });

  it("invoke throws on error status", async () => {
    const socket = new FakeSocket();
    const client = new SariClient(socket);
    const p = client.invoke("Fly");
    socket.reply({
      id: 1,
      status: "error",
      error: { code: "unknown_function", message: "unknown function 'Fly'" },
    });
    await expect(p).rejects.toThrow(/unknown_function/);
  });

  it("rejects all pending requests when the socket closes", async () => {
    const socket = new FakeSocket();
    const client = new SariClient(socket);
    const p = client.call("GetEnvInfo");
    socket.close();
    await expect(p).rejects.toThrow(/closed/);
  });

  it("isBroadcast discriminates message kinds", () => {
    const b: ServerMessage = {
      broadcast: "state",
      tick: 0,
      payload: { env: {}, cart: { phase: "IDLE", lines: [], total_cents: 0 }, task: null },
    };
    const r: ServerMessage = { id: 1, status: "ok" };
    expect(isBroadcast(b)).toBe(true);
    expect(isBroadcast(r)).toBe(false);
  });
});
