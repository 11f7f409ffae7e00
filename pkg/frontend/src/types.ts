/** Wire types for the review service JSON API. */

export type VerdictValue = "MATCH" | "NO_MATCH" | "INAPPLICABLE";

export type PairStatus = "pending" | "accept" | "reject";

export interface PairSummary {
  s1: string;
  s2: string;
  status: PairStatus;
  /** rule name -> verdict value */
  verdicts: Record<string, VerdictValue>;
}

export interface PairPage {
  total: number;
  page: number;
  pageSize: number;
  items: PairSummary[];
}

export interface VerdictDetail {
  value: VerdictValue;
  /** variable -> rendered term */
  bindings: Record<string, string>;
  /** rendered supporting triples */
  support: string[];
}

export interface PairDetail {
  s1: string;
  s2: string;
  status: PairStatus;
  verdicts: Record<string, VerdictDetail>;
}

export interface SampleDoc {
  id: string;
  /** property name -> values */
  properties: Record<string, string[]>;
}

export interface Batch {
  id: string;
  members: string[];
}

export interface BatchList {
  batches: Batch[];
}

export interface Health {
  status: string;
  graphSize: number;
  reportAge: number;
  reportStale: boolean;
}

export interface DecisionRequest {
  s1: string;
  s2: string;
  action: "accept" | "reject";
  expert: string;
  comment?: string;
}

export interface DecisionResponse {
  s1: string;
  s2: string;
  status: string;
}
