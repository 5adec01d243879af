/** Browser entry point: connect, render, orbit, and show tooltips. */

import * as THREE from "three";
import { OrbitControls } from "three/addons/controls/OrbitControls.js";

import { tooltipText } from "./format.js";
import { SceneModel } from "./model.js";
import { StreamClient, streamUrl } from "./net.js";
import { CityScene, pickBuilding } from "./scene.js";

const app = document.getElementById("app")!;
const tooltip = document.getElementById("tooltip")!;
const status = document.getElementById("status")!;

const renderer = new THREE.WebGLRenderer({ antialias: true });
renderer.setSize(window.innerWidth, window.innerHeight);
renderer.setPixelRatio(window.devicePixelRatio);
app.appendChild(renderer.domElement);

const scene = new THREE.Scene();
scene.background = new THREE.Color(0x10141c);
scene.add(new THREE.AmbientLight(0xffffff, 0.55));
const sun = new THREE.DirectionalLight(0xffffff, 1.1);
sun.position.set(40, 80, 25);
scene.add(sun);

const camera = new THREE.PerspectiveCamera(
  55,
  window.innerWidth / window.innerHeight,
  0.1,
  4000,
);
camera.position.set(30, 36, 42);

// Camera position persists across structure revisions: only the target is
// recentred the first time a non-empty city arrives.
const controls = new OrbitControls(camera, renderer.domElement);
controls.enableDamping = true;
let recentred = false;

const model = new SceneModel();
const city = new CityScene();
scene.add(city.root);

const params = new URLSearchParams(window.location.search);
const client = new StreamClient(streamUrl(params, window.location), (text) => {
  status.textContent = text;
});

let tickMs = 100;
const pointer = new THREE.Vector2(2, 2); // offscreen until the mouse moves
let pointerClient = { x: 0, y: 0 };

window.addEventListener("mousemove", (event) => {
  pointer.x = (event.clientX / window.innerWidth) * 2 - 1;
  pointer.y = -(event.clientY / window.innerHeight) * 2 + 1;
  pointerClient = { x: event.clientX, y: event.clientY };
});

window.addEventListener("resize", () => {
  camera.aspect = window.innerWidth / window.innerHeight;
  camera.updateProjectionMatrix();
  renderer.setSize(window.innerWidth, window.innerHeight);
});

let lastTime = performance.now();

function animate(now: number): void {
  requestAnimationFrame(animate);
  const dt = now - lastTime;
  lastTime = now;

  for (const msg of client.drain()) {
    if (msg.type === "hello") {
      tickMs = msg.tick_ms;
    } else if (msg.type === "structure") {
      model.applyStructure(msg);
      city.rebuild(model);
      if (!recentred && model.buildings.size > 0) {
        controls.target.copy(city.center(model));
        recentred = true;
      }
    } else {
      model.applyFrame(msg);
    }
  }

  model.step(dt / tickMs);
  city.updateHeights(model);

  const hovered = pickBuilding(city, model, pointer, camera);
  if (hovered) {
    tooltip.textContent = tooltipText(hovered);
    tooltip.style.display = "block";
    tooltip.style.left = `${pointerClient.x + 14}px`;
    tooltip.style.top = `${pointerClient.y + 14}px`;
  } else {
    tooltip.style.display = "none";
  }

  controls.update();
  renderer.render(scene, camera);
}

requestAnimationFrame(animate);
