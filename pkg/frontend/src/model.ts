/**
 * Pure scene state, no rendering: what the city looks like right now.
 *
 * Structure messages rebuild the ground plan; frames retarget building
 * heights. Heights animate linearly and complete within one tick interval,
 * so replaying the same message log always settles into the same scene.
 */

import type { FrameMessage, StructureMessage } from "./messages.js";

export const H_MAX = 20; // world-space height of elevation 1.0

export interface Building {
  id: number;
  name: string;
  className: string;
  packagePath: string[];
  x: number;
  z: number;
  height: number; // current animated height
  target: number; // height the building is moving toward
  elevation: number; // latest reported fraction, 0..1
  threads: number; // cumulative thread count from the latest frame
}

export interface Slab {
  origin: [number, number];
  extent: [number, number];
  depth: number;
  label: string;
}

export class SceneModel {
  rev = 0;
  extent: [number, number] = [0, 0];
  buildings = new Map<number, Building>();
  districts: Slab[] = [];
  blocks: Slab[] = [];

  /** Rebuild the ground plan. Surviving ids keep their current height. */
  applyStructure(msg: StructureMessage): void {
    const previous = this.buildings;
    const methods = new Map(msg.methods.map((m) => [m.id, m]));
    const next = new Map<number, Building>();
    for (const [id, x, z] of msg.layout.plots) {
      const meta = methods.get(id);
      const old = previous.get(id);
      next.set(id, {
        id,
        name: meta?.method ?? `method#${id}`,
        className: meta?.class ?? "?",
        packagePath: meta?.package ?? [],
        x,
        z,
        height: old?.height ?? 0,
        target: old?.target ?? 0,
        elevation: old?.elevation ?? 0,
        threads: old?.threads ?? 0,
      });
    }
    this.buildings = next;
    this.rev = msg.rev;
    this.extent = msg.layout.extent;
    this.districts = msg.layout.districts.map((d) => ({
      origin: d.origin,
      extent: d.extent,
      depth: d.depth,
      label: d.path.join("."),
    }));
    this.blocks = msg.layout.blocks.map((b) => ({
      origin: b.origin,
      extent: b.extent,
      depth: 0,
      label: b.package.length ? `${b.package.join(".")}.${b.class}` : b.class,
    }));
  }

  /** Retarget heights; frames for another revision are ignored. */
  applyFrame(msg: FrameMessage): void {
    if (msg.rev !== this.rev) return;
    const seen = new Set<number>();
    for (const [id, elevation, threads] of msg.rows) {
      const building = this.buildings.get(id);
      if (!building) continue;
      building.target = elevation * H_MAX;
      building.elevation = elevation;
      building.threads = threads;
      seen.add(id);
    }
    // Absent methods decay to flat. Frames are snapshots, so nothing about
    // an absent building may depend on skipped history: the count resets too
    // (the server's final 0.0 row carries the last authoritative count).
    for (const building of this.buildings.values()) {
      if (!seen.has(building.id)) {
        building.target = 0;
        building.elevation = 0;
        building.threads = 0;
      }
    }
  }

  /**
   * Advance animations. ``tickFraction`` is elapsed time over one tick
   * interval; 1 lands every building exactly on its target.
   */
  step(tickFraction: number): void {
    const alpha = Math.min(1, Math.max(0, tickFraction));
    for (const building of this.buildings.values()) {
      building.height += (building.target - building.height) * alpha;
    }
  }

  /** Finish all animations (used by tests and snapshot comparisons). */
  settle(): void {
    this.step(1);
  }

  /** Deterministic snapshot for equality checks. */
  snapshot(): string {
    const rows = [...this.buildings.values()]
      .sort((a, b) => a.id - b.id)
      .map((b) => [b.id, b.name, b.x, b.z, round6(b.height), round6(b.elevation), b.threads]);
    return JSON.stringify({ rev: this.rev, extent: this.extent, rows });
  }
}

function round6(value: number): number {
  return Math.round(value * 1e6) / 1e6;
}
