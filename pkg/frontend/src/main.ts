/**
 * Application entry: upload a CSV, open the session socket, and wire the
 * panel, virtual table, and transitions together.
 */

import { SessionClient } from "./client.js";
import { SelectionPanel } from "./panel.js";
import { stagedTransition, type ChangeKind } from "./transitions.js";
import { VirtualTable } from "./virtualTable.js";
import type { Delta, Scene } from "./protocol.js";

interface SessionInfo {
  session: string;
  row_count: number;
}

export async function createSession(baseUrl: string, csv: Blob,
                                    descriptor?: object): Promise<SessionInfo> {
  const form = new FormData();
  form.append("csv", csv, "data.csv");
  if (descriptor) {
    form.append("descriptor_json", JSON.stringify(descriptor));
  }
  const res = await fetch(`${baseUrl}/session`, { method: "POST", body: form });
  if (!res.ok) throw new Error(`session create failed: ${await res.text()}`);
  return (await res.json()) as SessionInfo;
}

export function wsUrl(baseUrl: string, sessionId: string): string {
  return `${baseUrl.replace(/^http/, "ws")}/session/${sessionId}/ws`;
}

export class App {
  readonly client: SessionClient;
  readonly table: VirtualTable;
  readonly panel: SelectionPanel;
  private lastScene: Scene | null = null;
  private pendingChange: ChangeKind = "other";

  constructor(client: SessionClient, tableEl: HTMLElement, panelEl: HTMLElement) {
    this.client = client;
    this.table = new VirtualTable(tableEl);
    this.panel = new SelectionPanel(panelEl);

    this.table.onWindowChange = ({ first, last }) => {
      void this.client.requestScene(first, last);
    };
    this.panel.onFilters = (filters) => {
      this.pendingChange = "filter";
      void this.client.send("set_filters", { filters });
    };
    this.client.onDelta = (delta) => this.applyDelta(delta);
  }

  applyDelta(delta: Delta): void {
    if (delta.layout) this.table.setLayout(delta.layout);
    if (delta.scene) {
      if (this.lastScene) {
        // the plan is computed even when reduced motion skips playback
        stagedTransition(this.lastScene, delta.scene, this.pendingChange);
      }
      this.table.applyScene(delta.scene);
      this.lastScene = delta.scene;
      this.pendingChange = "other";
    }
    if (delta.panel) this.panel.render(delta.panel);
  }

  toggleAggregate(path: string[], aggregated: boolean): Promise<Delta> {
    this.pendingChange = "aggregate";
    return this.client.send("toggle_aggregate", { group: path, aggregated });
  }
}

export function boot(baseUrl = ""): void {
  const tableEl = document.getElementById("table");
  const panelEl = document.getElementById("panel");
  const fileInput = document.getElementById("file") as HTMLInputElement | null;
  if (!tableEl || !panelEl || !fileInput) return;
  fileInput.addEventListener("change", async () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    const info = await createSession(baseUrl, file);
    const client = new SessionClient(wsUrl(baseUrl, info.session),
                                     (url) => new WebSocket(url));
    await client.ready();
    const app = new App(client, tableEl, panelEl);
    app.table.updateWindow(true);
  });
}
