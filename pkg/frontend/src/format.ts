import type { Building } from "./model.js";

/** Mouseover text: method name, elevation percent, thread count. */
export function tooltipText(building: Building): string {
  const percent = (building.elevation * 100).toFixed(2);
  return `${building.name} / Elevation: ${percent}% / Thread Num: ${building.threads}`;
}

export function qualifiedName(building: Building): string {
  const pkg = building.packagePath.join(".");
  const cls = building.className;
  return [pkg, cls, building.name].filter((part) => part.length > 0).join(".");
}
