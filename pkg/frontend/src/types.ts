/** DTOs mirroring the review service's JSON. Offsets are byte offsets
 * into the UTF-8 source text. */

export interface SpanDto {
  start: number;
  end: number;
}

export interface BlockDto {
  index: number;
  kind: "title" | "paragraph" | "enum-intro" | "enum-item";
  level: number;
  start: number;
  end: number;
  sentences: SpanDto[];
}

export interface DocDto {
  id: string;
  text: string;
  blocks: BlockDto[];
}

export interface DocSummaryDto {
  id: string;
  version: number;
  accepted: boolean;
  conditions: number;
  recommendations: number;
}

export interface TraceDto {
  rule: string;
  detail: string;
}

export type NodeKind = "root" | "condition" | "recommendation" | "justification";

export interface NodeDto {
  kind: NodeKind;
  id?: string | null;
  start?: number | null;
  end?: number | null;
  position?: string | null;
  rules?: TraceDto[] | null;
  frame_start?: number | null;
  frame_end?: number | null;
  text?: string | null;
  children: NodeDto[];
}

export interface TreeDto {
  doc_id: string;
  version: number;
  root: NodeDto;
}

export type Correction =
  | { kind: "reattach_recommendation"; recommendation_id: string;
      new_parent_id: string; base_version: number }
  | { kind: "adjust_frame_end"; condition_id: string; new_end: number;
      base_version: number }
  | { kind: "relabel_segment"; segment_id: string;
      new_kind: "condition" | "recommendation"; base_version: number };
