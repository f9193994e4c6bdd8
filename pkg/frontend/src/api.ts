// Typed client for the document service.  All state-changing calls carry
// the expected version; a 409 surfaces as VersionConflictError so the
// caller can re-fetch and retry.

import {
  ApplyRejection,
  ApplyResult,
  EditCommand,
  Selection,
  Snapshot,
} from "./types.js";

export type Fetcher = (url: string, init?: RequestInit) => Promise<Response>;

export class VersionConflictError extends Error {
  constructor(public currentVersion: number) {
    super(`document moved on to version ${currentVersion}`);
  }
}

export class CommandRejectedError extends Error {
  constructor(public rejection: ApplyRejection) {
    super(rejection.error);
  }
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetcher: Fetcher = (url, init) => fetch(url, init),
  ) {}

  private async getJson<T>(url: string): Promise<T> {
    const response = await this.fetcher(this.base + url);
    if (!response.ok) {
      throw new Error(`${url}: ${response.status}`);
    }
    return (await response.json()) as T;
  }

  listDocuments(): Promise<string[]> {
    return this.getJson("/docs");
  }

  snapshot(id: string): Promise<Snapshot> {
    return this.getJson(`/docs/${encodeURIComponent(id)}`);
  }

  governed(id: string, path: number[]): Promise<number[][]> {
    return this.getJson(`/docs/${encodeURIComponent(id)}/governed?path=${path.join(",")}`);
  }

  selectionCells(id: string, selection: Selection): Promise<number[][]> {
    const sel = encodeURIComponent(JSON.stringify(selection));
    return this.getJson(`/docs/${encodeURIComponent(id)}/selection?sel=${sel}`);
  }

  async applyCommands(
    id: string,
    expectedVersion: number,
    commands: EditCommand[],
  ): Promise<ApplyResult> {
    const response = await this.fetcher(`${this.base}/docs/${encodeURIComponent(id)}/commands`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ expected_version: expectedVersion, commands }),
    });
    if (response.status === 409) {
      const body = (await response.json()) as { current_version: number };
      throw new VersionConflictError(body.current_version);
    }
    if (response.status === 422) {
      throw new CommandRejectedError((await response.json()) as ApplyRejection);
    }
    if (!response.ok) {
      throw new Error(`commands: ${response.status}`);
    }
    return (await response.json()) as ApplyResult;
  }

  /** Change events; the UI re-fetches snapshots rather than merging. */
  events(onChange: (id: string, version: number) => void): () => void {
    const source = new EventSource(`${this.base}/events`);
    source.onmessage = (event) => {
      const body = JSON.parse(event.data) as { id: string; version: number };
      onChange(body.id, body.version);
    };
    return () => source.close();
  }
}
