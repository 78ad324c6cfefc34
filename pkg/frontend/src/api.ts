/** Typed client for the review service HTTP API. */

import type { Correction, DocDto, DocSummaryDto, TreeDto } from "./types.js";

export class VersionConflictError extends Error {
  currentVersion: number;

  constructor(currentVersion: number) {
    super(`stale base version; current version is ${currentVersion}`);
    this.currentVersion = currentVersion;
  }
}

export class CorrectionRejectedError extends Error {}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    throw new Error(`${response.status} ${response.statusText}`);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  async listDocs(): Promise<DocSummaryDto[]> {
    const payload = await asJson<{ documents: DocSummaryDto[] }>(
      await fetch(`${this.base}/api/docs`));
    return payload.documents;
  }

  async getDoc(id: string): Promise<DocDto> {
    return asJson(await fetch(`${this.base}/api/doc/${id}`));
  }

  async getTree(id: string): Promise<TreeDto> {
    return asJson(await fetch(`${this.base}/api/tree/${id}`));
  }

  /** Apply one correction. Throws VersionConflictError on a stale base
   * version and CorrectionRejectedError (naming the violated invariant)
   * when the service refuses the edit. */
  async postCorrection(id: string, correction: Correction):
      Promise<{ doc_id: string; version: number }> {
    const response = await fetch(`${this.base}/api/tree/${id}/corrections`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(correction),
    });
    if (response.status === 409) {
      const body = await response.json();
      throw new VersionConflictError(body.detail.current_version);
    }
    if (response.status === 422) {
      const body = await response.json();
      const detail = body.detail;
      throw new CorrectionRejectedError(
        typeof detail === "object" && detail !== null && "error" in detail
          ? String(detail.error) : JSON.stringify(detail));
    }
    return asJson(response);
  }

  async accept(id: string, baseVersion: number):
      Promise<{ doc_id: string; version: number; accepted: boolean }> {
    const response = await fetch(`${this.base}/api/tree/${id}/accept`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ base_version: baseVersion }),
    });
    if (response.status === 409) {
      const body = await response.json();
      throw new VersionConflictError(body.detail.current_version);
    }
    return asJson(response);
  }

  /** Canonical GEM XML of the current tree version, byte-exact. */
  async exportXml(id: string): Promise<string> {
    const response = await fetch(`${this.base}/api/tree/${id}/export`);
    if (!response.ok) {
      throw new Error(`${response.status} ${response.statusText}`);
    }
    return response.text();
  }
}
