/** Browser shell: wires the editor, viewer, and client into the page.
 *
 * Layout: a graph panel (node list, edit actions, pins, export/import), a
 * viewer panel (SVG wireframe, articulation slider, sample tabs), and a
 * regenerate bar (seed, sample count, guidance weight, error banner). All
 * domain logic lives in the imported modules; this file only moves values
 * between them and the DOM.
 */

import {
  addNode,
  clearPin,
  deleteSubtree,
  emptyState,
  exportState,
  importState,
  relabel,
  reparent,
  select,
  setPin,
  stateFromObject,
  toGraphWire,
  validateState,
  type EditResult,
  type GraphEditState,
} from "./editor.js";
import {
  idleRegenerate,
  runRegenerate,
  StudioClient,
  type RegenerateState,
} from "./client.js";
import { colorFor } from "./palette.js";
import { renderSvg } from "./render.js";
import {
  currentScene,
  emptyViewer,
  loadObjects,
  setOrbit,
  setQ,
  setSample,
  type ViewerState,
} from "./viewer.js";
import { buildScene } from "./scene.js";
import { LABELS, type LabelName, type ObjectWire } from "./types.js";

interface AppState {
  edit: GraphEditState;
  regen: RegenerateState;
  viewer: ViewerState;
  editError: string | null;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  node.append(...children);
  return node;
}

export function mountStudio(root: HTMLElement, base: string): void {
  const client = new StudioClient(base);
  let state: AppState = {
    edit: emptyState(),
    regen: idleRegenerate(),
    viewer: emptyViewer(),
    editError: null,
  };

  const update = (next: Partial<AppState>): void => {
    state = { ...state, ...next };
    render();
  };

  const applyEdit = (result: EditResult): void => {
    update({ edit: result.state, editError: result.ok ? null : result.error });
  };

  const regenerate = (): void => {
    const verdict = validateState(state.edit);
    if (!verdict.ok) {
      update({ editError: verdict.reason });
      return;
    }
    void runRegenerate(
      client,
      state.regen,
      {
        graph: toGraphWire(state.edit),
        num_samples: 2,
        seed: 0,
        pins: state.edit.pins,
      },
      (regen) => {
        const objects = regen.current?.objects ?? state.viewer.objects;
        update({ regen, viewer: loadObjects(state.viewer, objects) });
      },
    );
  };

  const graphPanel = (): HTMLElement => {
    const rows = state.edit.nodes.map((node) => {
      const labelSelect = el("select", {});
      for (const label of LABELS) {
        const opt = el("option", { value: label }, label);
        if (label === node.label) opt.setAttribute("selected", "selected");
        labelSelect.append(opt);
      }
      labelSelect.addEventListener("change", () =>
        applyEdit(relabel(state.edit, node.id, labelSelect.value as LabelName)),
      );

      const parentSelect = el("select", {});
      const currentParent = state.edit.parentOf.get(node.id);
      for (const other of state.edit.nodes) {
        if (other.id === node.id) continue;
        const opt = el("option", { value: String(other.id) }, `#${other.id}`);
        if (other.id === currentParent) opt.setAttribute("selected", "selected");
        parentSelect.append(opt);
      }
      if (currentParent === undefined) {
        parentSelect.replaceChildren(el("option", {}, "root"));
        parentSelect.setAttribute("disabled", "disabled");
      }
      parentSelect.addEventListener("change", () =>
        applyEdit(reparent(state.edit, node.id, Number(parentSelect.value))),
      );

      const row = el(
        "div",
        { class: "node-row", "data-node": String(node.id) },
        el("span", {
          class: "swatch",
          style: `background:${colorFor(node.id)}`,
        }),
        el("span", { class: "node-id" }, `#${node.id}`),
        labelSelect,
        parentSelect,
        el("button", { class: "add" }, "+child"),
        el("button", { class: "del" }, "delete"),
      );
      row.querySelector("button.add")!.addEventListener("click", () =>
        applyEdit(addNode(state.edit, "handle", node.id)),
      );
      row.querySelector("button.del")!.addEventListener("click", () =>
        applyEdit(deleteSubtree(state.edit, node.id)),
      );
      row.addEventListener("click", () =>
        update({ edit: select(state.edit, node.id) }),
      );
      if (state.edit.selection === node.id) row.classList.add("selected");
      return row;
    });

    const pinInputs = Array.from({ length: 6 }, () =>
      el("input", { type: "number", step: "0.01", value: "0" }),
    );
    const pinButton = el("button", {}, "pin bbox");
    pinButton.addEventListener("click", () => {
      if (state.edit.selection === null) {
        update({ editError: "select a node to pin" });
        return;
      }
      applyEdit(
        setPin(
          state.edit,
          state.edit.selection,
          0,
          pinInputs.map((i) => Number(i.value)),
        ),
      );
    });
    const pinList = el(
      "ul",
      { class: "pins" },
      ...state.edit.pins.map((pin) => {
        const item = el(
          "li",
          {},
          `part ${pin.part_id} row ${pin.row}: [${pin.values.join(", ")}] `,
          el("button", {}, "x"),
        );
        item.querySelector("button")!.addEventListener("click", () =>
          applyEdit(clearPin(state.edit, pin.part_id, pin.row)),
        );
        return item;
      }),
    );

    const exportArea = el("textarea", { rows: "4", cols: "48" });
    const exportButton = el("button", {}, "export");
    exportButton.addEventListener("click", () => {
      exportArea.value = exportState(state.edit);
    });
    const importButton = el("button", {}, "import");
    importButton.addEventListener("click", () => {
      const imported = importState(exportArea.value);
      if ("error" in imported) update({ editError: imported.error });
      else update({ edit: imported, editError: null });
    });

    return el(
      "section",
      { class: "graph-panel" },
      el("h2", {}, "Connectivity graph"),
      ...rows,
      state.editError
        ? el("p", { class: "edit-error" }, state.editError)
        : el("p", { class: "edit-ok" }, state.edit.dirty ? "edited" : "clean"),
      el("h3", {}, "Pins (bbox center + halfextent)"),
      el("div", {}, ...pinInputs, pinButton),
      pinList,
      el("h3", {}, "Session"),
      el("div", {}, exportButton, importButton),
      exportArea,
    );
  };

  const viewerPanel = (): HTMLElement => {
    const svgHost = el("div", { class: "viewer" });
    svgHost.innerHTML = renderSvg(currentScene(state.viewer), state.viewer.orbit);

    const slider = el("input", {
      type: "range",
      min: "0",
      max: "1",
      step: "0.01",
      value: String(state.viewer.q),
    });
    slider.addEventListener("input", () =>
      update({ viewer: setQ(state.viewer, Number(slider.value)) }),
    );

    const tabs = el(
      "div",
      { class: "tabs" },
      ...state.viewer.objects.map((_, index) => {
        const tab = el(
          "button",
          { class: index === state.viewer.sampleIndex ? "tab active" : "tab" },
          `sample ${index}`,
        );
        tab.addEventListener("click", () =>
          update({ viewer: setSample(state.viewer, index) }),
        );
        return tab;
      }),
    );

    let dragging = false;
    svgHost.addEventListener("pointerdown", () => (dragging = true));
    svgHost.addEventListener("pointerup", () => (dragging = false));
    svgHost.addEventListener("pointermove", (event) => {
      if (!dragging) return;
      update({
        viewer: setOrbit(state.viewer, {
          azimuth: state.viewer.orbit.azimuth + event.movementX * 0.01,
          elevation: state.viewer.orbit.elevation + event.movementY * 0.01,
        }),
      });
    });

    const previous = state.regen.previous;
    const previousHost = el("div", { class: "viewer previous" });
    if (previous && previous.objects.length > 0) {
      previousHost.innerHTML = renderSvg(
        buildScene(previous.objects[0] as ObjectWire, state.viewer.q),
        state.viewer.orbit,
        240,
      );
    }

    return el(
      "section",
      { class: "viewer-panel" },
      el("h2", {}, "Viewer"),
      tabs,
      svgHost,
      el("label", {}, "articulation ", slider),
      previous ? el("h3", {}, "Previous result") : "",
      previousHost,
    );
  };

  const regenBar = (): HTMLElement => {
    const button = el("button", { class: "regenerate" }, "Regenerate");
    if (state.regen.inFlight !== null) button.setAttribute("disabled", "disabled");
    button.addEventListener("click", regenerate);
    const banner = state.regen.error
      ? el(
          "div",
          { class: "error-banner" },
          `Service error: ${state.regen.error} `,
          el("button", { class: "retry" }, "retry"),
        )
      : el("div", {});
    banner.querySelector("button.retry")?.addEventListener("click", regenerate);
    return el("section", { class: "regen-bar" }, button, banner);
  };

  const render = (): void => {
    root.replaceChildren(graphPanel(), viewerPanel(), regenBar());
  };

  void client
    .health()
    .then(() => render())
    .catch(() => {
      state = { ...state, regen: { ...state.regen, error: "service unreachable" } };
      render();
    });
  render();
}

export { stateFromObject };
