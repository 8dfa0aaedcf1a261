// Wire protocol types and a thin request/response client.
// One CommandEnvelope per frame, one ResultEnvelope back with the same id;
// unsolicited frames are state broadcasts for observer sessions.

export type Vec3 = [number, number, number];

export interface CommandEnvelope {
  id: number;
  fn: string;
  args?: Record<string, unknown>;
}

export interface ErrorInfo {
  code: string;
  message: string;
}

export interface CartView {
  phase: "IDLE" | "ACTIVE" | "PAID";
  lines: [string, number][];
  total_cents: number;
}

export interface TaskStatus {
  id: string;
  instruction: string;
  done: boolean;
  success: boolean;
  t_end: string | null;
  log_path: string | null;
}

export interface ResultEnvelope {
  id: number | null;
  status: "ok" | "error";
  payload?: Record<string, unknown>;
  error?: ErrorInfo;
  tick?: number;
  ext?: boolean;
}

export interface Broadcast {
  broadcast: "state";
  tick: number;
  payload: {
    env: Record<string, unknown>;
    cart: CartView;
    task: TaskStatus | null;
    log_path?: string;
  };
}

export type ServerMessage = ResultEnvelope | Broadcast;

export interface FrameEntry {
  instance_id: string;
  sku: string;
  category: string;
  bbox: [number, number, number, number]; // [ymin, xmin, ymax, xmax] px
  distance: number;
  held: boolean;
  legible: {
    name?: string;
    price_tag?: number;
    expiration?: string;
    full_label?: Record<string, unknown>;
  };
}

export interface FrameFixture {
  kind: "shelf" | "button";
  id: string;
  label?: string;
  bbox: [number, number, number, number];
}

export interface SemanticFrame {
  sim_time: number;
  camera: { position: Vec3; rotation: Vec3 };
  entries: FrameEntry[];
  fixtures: FrameFixture[];
}

export function isBroadcast(msg: ServerMessage): msg is Broadcast {
  return (msg as Broadcast).broadcast === "state";
}

// Minimal socket surface so tests can inject a fake.
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onopen: (() => void) | null;
}

type Pending = {
  resolve: (r: ResultEnvelope) => void;
  reject: (e: Error) => void;
};

/** Request/response client over one WebSocket, ids handled internally. */
export class SariClient {
  private nextId = 1;
  private pending = new Map<number, Pending>();
  onBroadcast: ((b: Broadcast) => void) | null = null;
  onClose: (() => void) | null = null;

  constructor(private socket: SocketLike) {
    socket.onmessage = (ev) => this.handleMessage(ev.data);
    socket.onclose = () => {
      const err = new Error("connection closed");
      for (const p of this.pending.values()) p.reject(err);
      this.pending.clear();
      this.onClose?.();
    };
  }

  private handleMessage(data: string): void {
    let msg: ServerMessage;
    try {
      msg = JSON.parse(data) as ServerMessage;
    } catch {
      return; // not ours; ignore
    }
    if (isBroadcast(msg)) {
      this.onBroadcast?.(msg);
      return;
    }
    if (msg.id === null || msg.id === undefined) return;
    const waiter = this.pending.get(msg.id);
    if (waiter) {
      this.pending.delete(msg.id);
      waiter.resolve(msg);
    }
  }

  call(fn: string, args?: Record<string, unknown>): Promise<ResultEnvelope> {
    const id = this.nextId++;
    const envelope: CommandEnvelope = { id, fn, args: args ?? {} };
    return new Promise((resolve, reject) => {
      this.pending.set(id, { resolve, reject });
      this.socket.send(JSON.stringify(envelope));
    });
  }

  /** call() that throws on error status, returning just the payload. */
  async invoke(
    fn: string,
    args?: Record<string, unknown>,
  ): Promise<Record<string, unknown>> {
    const result = await this.call(fn, args);
    if (result.status !== "ok") {
      throw new Error(`${fn}: ${result.error?.code}: ${result.error?.message}`);
    }
    return result.payload ?? {};
  }

  close(): void {
    this.socket.close();
  }
}
