/** View state transitions. The displayed version always equals the last
 * version the service acknowledged; drafts survive conflicts. */

import type { Correction, TreeDto } from "./types.js";

export interface ViewState {
  docId: string | null;
  version: number;
  tree: TreeDto | null;
  selectedNodeId: string | null;
  draft: Correction | null;
  conflict: { currentVersion: number } | null;
  validationError: string | null;
}

export function initialState(): ViewState {
  return {
    docId: null,
    version: 0,
    tree: null,
    selectedNodeId: null,
    draft: null,
    conflict: null,
    validationError: null,
  };
}

export function withTree(state: ViewState, tree: TreeDto): ViewState {
  return {
    ...state,
    docId: tree.doc_id,
    version: tree.version,
    tree,
    draft: null,
    conflict: null,
    validationError: null,
  };
}

export function withDraft(state: ViewState, draft: Correction): ViewState {
  return { ...state, draft, validationError: null };
}

/** A stale submit: keep the draft so the expert can replay it after a
 * reload, and surface the service's current version. */
export function withConflict(state: ViewState, currentVersion: number): ViewState {
  return { ...state, conflict: { currentVersion } };
}

export function withValidationError(state: ViewState, message: string): ViewState {
  return { ...state, draft: null, validationError: message };
}

export function withSelection(state: ViewState, nodeId: string | null): ViewState {
  return { ...state, selectedNodeId: nodeId };
}

/** True when any response reveals a version the view has not seen. */
export function versionDrifted(state: ViewState, seenVersion: number): boolean {
  return state.version !== 0 && seenVersion !== state.version;
}
