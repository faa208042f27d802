// three.js scene wrapper: one displayed slice mesh with orbit/pan/zoom and
// smooth / flat / wireframe presentation.

import * as THREE from "three";
import { OrbitControls } from "three/addons/controls/OrbitControls.js";

import { payloadBounds, toFlatGeometry, toSmoothGeometry, toWireGeometry } from "./mesh.js";
import type { MeshPayload, RenderMode } from "./types.js";

export interface SliceScene {
  showMesh(mesh: MeshPayload): void;
  setRenderMode(mode: RenderMode): void;
  clear(): void;
  resize(): void;
  dispose(): void;
}

export function createScene(container: HTMLElement): SliceScene {
  const renderer = new THREE.WebGLRenderer({ antialias: true });
  renderer.setPixelRatio(Math.min(window.devicePixelRatio, 2));
  renderer.setSize(container.clientWidth, container.clientHeight);
  renderer.setClearColor(0x10141c);
  container.appendChild(renderer.domElement);

  const scene = new THREE.Scene();
  const camera = new THREE.PerspectiveCamera(
    45,
    container.clientWidth / Math.max(1, container.clientHeight),
    0.01,
    1000,
  );
  camera.position.set(4, 3, 6);

  const controls = new OrbitControls(camera, renderer.domElement);
  controls.enableDamping = true;
  controls.dampingFactor = 0.08;

  scene.add(new THREE.HemisphereLight(0xffffff, 0x303040, 0.9));
  const key = new THREE.DirectionalLight(0xffffff, 1.4);
  key.position.set(5, 8, 6);
  scene.add(key);
  scene.add(new THREE.AxesHelper(2));

  let mode: RenderMode = "flat";
  let payload: MeshPayload | null = null;
  let display: THREE.Object3D | null = null;

  function removeDisplay() {
    if (!display) return;
    scene.remove(display);
    display.traverse((obj) => {
      const any = obj as THREE.Mesh;
      any.geometry?.dispose?.();
      (any.material as THREE.Material | undefined)?.dispose?.();
    });
    display = null;
  }

  function rebuild() {
    removeDisplay();
    if (!payload || !payload.triangles.length) return;
    if (mode === "wireframe") {
      const wire = toWireGeometry(payload);
      const geo = new THREE.BufferGeometry();
      geo.setAttribute("position", new THREE.BufferAttribute(wire.positions, 3));
      display = new THREE.LineSegments(
        geo,
        new THREE.LineBasicMaterial({ color: 0x9fd6ff }),
      );
    } else {
      const geo = new THREE.BufferGeometry();
      if (mode === "flat") {
        const flat = toFlatGeometry(payload);
        geo.setAttribute("position", new THREE.BufferAttribute(flat.positions, 3));
        geo.setAttribute("normal", new THREE.BufferAttribute(flat.normals, 3));
        geo.setAttribute("color", new THREE.BufferAttribute(flat.colors, 3));
      } else {
        const smooth = toSmoothGeometry(payload);
        geo.setAttribute("position", new THREE.BufferAttribute(smooth.positions, 3));
        geo.setAttribute("normal", new THREE.BufferAttribute(smooth.normals, 3));
        geo.setAttribute("color", new THREE.BufferAttribute(smooth.colors, 3));
        geo.setIndex(new THREE.BufferAttribute(smooth.index, 1));
      }
      const mat = new THREE.MeshStandardMaterial({
        vertexColors: true,
        side: THREE.DoubleSide,
        flatShading: mode === "flat",
        metalness: 0.05,
        roughness: 0.65,
      });
      display = new THREE.Mesh(geo, mat);
    }
    scene.add(display);
  }

  let disposed = false;
  function frame() {
    if (disposed) return;
    requestAnimationFrame(frame);
    controls.update();
    renderer.render(scene, camera);
  }
  frame();

  return {
    showMesh(mesh: MeshPayload) {
      const first = payload === null;
      payload = mesh;
      rebuild();
      if (first && mesh.points.length) {
        const { center, radius } = payloadBounds(mesh);
        controls.target.set(center[0], center[1], center[2]);
        camera.position.set(
          center[0] + radius * 1.8,
          center[1] + radius * 1.4,
          center[2] + radius * 2.2,
        );
      }
    },
    setRenderMode(m: RenderMode) {
      if (m !== mode) {
        mode = m;
        rebuild();
      }
    },
    clear() {
      payload = null;
      removeDisplay();
    },
    resize() {
      camera.aspect = container.clientWidth / Math.max(1, container.clientHeight);
      camera.updateProjectionMatrix();
      renderer.setSize(container.clientWidth, container.clientHeight);
    },
    dispose() {
      disposed = true;
      removeDisplay();
      renderer.dispose();
      renderer.domElement.remove();
    },
  };
}
