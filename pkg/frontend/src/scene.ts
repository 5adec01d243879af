/**
 * three.js view of the SceneModel: slabs for districts and blocks, one box
 * per method building, and raycast picking for the tooltip.
 */

import * as THREE from "three";

import type { Building, SceneModel, Slab } from "./model.js";

const DISTRICT_COLORS = [0x8da47e, 0x9fb48f, 0xb1c4a0, 0xc3d4b1, 0xd5e4c2];
const BLOCK_COLOR = 0xd9a066;
const BUILDING_COLOR = 0x4f7cac;

const SLAB_THICKNESS = 0.12;
const MIN_BUILDING_HEIGHT = 0.05;

export class CityScene {
  readonly root = new THREE.Group();
  private readonly unitBox = new THREE.BoxGeometry(1, 1, 1);
  private readonly buildingMaterial = new THREE.MeshLambertMaterial({ color: BUILDING_COLOR });
  private readonly blockMaterial = new THREE.MeshLambertMaterial({ color: BLOCK_COLOR });
  private readonly districtMaterials = DISTRICT_COLORS.map(
    (color) => new THREE.MeshLambertMaterial({ color }),
  );
  private buildingMeshes = new Map<number, THREE.Mesh>();
  private structureGroup = new THREE.Group();
  private raycaster = new THREE.Raycaster();

  constructor() {
    this.root.add(this.structureGroup);
  }

  /** Tear down and rebuild all geometry for a new structure revision. */
  rebuild(model: SceneModel): void {
    this.root.remove(this.structureGroup);
    this.structureGroup = new THREE.Group();
    this.buildingMeshes = new Map();

    for (const district of model.districts) {
      this.structureGroup.add(this.slabMesh(district, this.districtMaterial(district.depth)));
    }
    for (const block of model.blocks) {
      const mesh = this.slabMesh(block, this.blockMaterial);
      mesh.position.y += SLAB_THICKNESS; // blocks sit on their district
      this.structureGroup.add(mesh);
    }
    for (const building of model.buildings.values()) {
      const mesh = new THREE.Mesh(this.unitBox, this.buildingMaterial);
      mesh.userData.buildingId = building.id;
      this.buildingMeshes.set(building.id, mesh);
      this.structureGroup.add(mesh);
    }
    this.updateHeights(model);
    this.root.add(this.structureGroup);
  }

  /** Cheap per-animation-tick update: building scale and position only. */
  updateHeights(model: SceneModel): void {
    for (const building of model.buildings.values()) {
      const mesh = this.buildingMeshes.get(building.id);
      if (!mesh) continue;
      const height = Math.max(building.height, MIN_BUILDING_HEIGHT);
      mesh.scale.set(0.82, height, 0.82);
      mesh.position.set(
        building.x + 0.5,
        2 * SLAB_THICKNESS + height / 2,
        building.z + 0.5,
      );
    }
  }

  /** Nearest building under a pointer position (NDC), or null for ground/sky. */
  pick(ndc: THREE.Vector2, camera: THREE.Camera): number | null {
    this.raycaster.setFromCamera(ndc, camera);
    const meshes = [...this.buildingMeshes.values()];
    const hits = this.raycaster.intersectObjects(meshes, false);
    const first = hits[0];
    if (!first) return null;
    return (first.object.userData.buildingId as number) ?? null;
  }

  center(model: SceneModel): THREE.Vector3 {
    return new THREE.Vector3(model.extent[0] / 2, 0, model.extent[1] / 2);
  }

  private districtMaterial(depth: number): THREE.MeshLambertMaterial {
    const clamped = Math.min(depth, this.districtMaterials.length - 1);
    return this.districtMaterials[clamped] ?? this.districtMaterials[0]!;
  }

  private slabMesh(slab: Slab, material: THREE.Material): THREE.Mesh {
    const mesh = new THREE.Mesh(this.unitBox, material);
    mesh.scale.set(slab.extent[0], SLAB_THICKNESS, slab.extent[1]);
    mesh.position.set(
      slab.origin[0] + slab.extent[0] / 2,
      SLAB_THICKNESS / 2 + slab.depth * SLAB_THICKNESS,
      slab.origin[1] + slab.extent[1] / 2,
    );
    return mesh;
  }
}

export function pickBuilding(
  scene: CityScene,
  model: SceneModel,
  ndc: THREE.Vector2,
  camera: THREE.Camera,
): Building | null {
  const id = scene.pick(ndc, camera);
  if (id === null) return null;
  return model.buildings.get(id) ?? null;
}
