/** Wire messages received on the stream endpoint. */

export interface HelloMessage {
  type: "hello";
  version: number;
  window_ms: number;
  tick_ms: number;
}

export interface MethodEntry {
  id: number;
  method: string;
  class: string;
  package: string[];
}

export interface DistrictGeometry {
  path: string[];
  origin: [number, number];
  extent: [number, number];
  depth: number;
}

export interface BlockGeometry {
  class: string;
  package: string[];
  origin: [number, number];
  extent: [number, number];
}

export interface StructureMessage {
  type: "structure";
  rev: number;
  methods: MethodEntry[];
  layout: {
    extent: [number, number];
    districts: DistrictGeometry[];
    blocks: BlockGeometry[];
    plots: [number, number, number][]; // [method id, x, z]
  };
}

/** rows: [method id, elevation 0..1, thread count] */
export interface FrameMessage {
  type: "frame";
  rev: number;
  t_us: number;
  rows: [number, number, number][];
}

export type StreamMessage = HelloMessage | StructureMessage | FrameMessage;

export function parseMessage(raw: string): StreamMessage | null {
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof parsed !== "object" || parsed === null) return null;
  const type = (parsed as { type?: unknown }).type;
  if (type === "hello" || type === "structure" || type === "frame") {
    return parsed as StreamMessage;
  }
  return null;
}
