import type { ApiClient } from "./api.js";
import type { PairDetail, SampleDoc, VerdictValue } from "./types.js";

const CHIP_CLASS: Record<VerdictValue, string> = {
  MATCH: "chip chip--match",
  NO_MATCH: "chip chip--no-match",
  INAPPLICABLE: "chip chip--inapplicable",
};

export const CHIP_COLOR: Record<VerdictValue, string> = {
  MATCH: "green",
  NO_MATCH: "red",
  INAPPLICABLE: "grey",
};

/** A colored chip for one rule verdict; the chip text is the rule name. */
export function verdictChip(rule: string, value: VerdictValue): HTMLElement {
  const chip = document.createElement("span");
  chip.className = CHIP_CLASS[value];
  chip.style.backgroundColor = CHIP_COLOR[value];
  chip.dataset.rule = rule;
  chip.dataset.verdict = value;
  chip.textContent = `${rule}: ${value}`;
  return chip;
}

function sampleSummary(doc: SampleDoc): HTMLElement {
  const dl = document.createElement("dl");
  dl.className = "sample-summary";
  dl.dataset.sample = doc.id;
  for (const [property, values] of Object.entries(doc.properties)) {
    if (property === "rdf:type") continue;
    const dt = document.createElement("dt");
    dt.textContent = property;
    const dd = document.createElement("dd");
    dd.textContent = values.join(", ");
    dl.append(dt, dd);
  }
  return dl;
}

function bindingsTable(detail: PairDetail): HTMLElement {
  const table = document.createElement("table");
  table.className = "bindings";
  const head = document.createElement("tr");
  for (const label of ["rule", "variable", "value"]) {
    const th = document.createElement("th");
    th.textContent = label;
    head.appendChild(th);
  }
  table.appendChild(head);
  for (const [rule, verdict] of Object.entries(detail.verdicts)) {
    for (const [variable, value] of Object.entries(verdict.bindings)) {
      const row = document.createElement("tr");
      for (const text of [rule, variable, value]) {
        const td = document.createElement("td");
        td.textContent = text;
        row.appendChild(td);
      }
      table.appendChild(row);
    }
  }
  return table;
}

export interface PairCardHandlers {
  onDecided?: (s1: string, s2: string, action: "accept" | "reject") => void;
  onError?: (message: string) => void;
}

/**
 * Detail card for one candidate pair: sample summaries, verdict chips with
 * binding provenance, and accept/reject actions.
 *
 * Decision submission holds a per-card in-flight lock: while one request is
 * pending, further clicks (including double-clicks) are ignored, so at most
 * one POST /decisions is issued per user action.
 */
export class PairCard {
  readonly element: HTMLElement;
  private inFlight = false;

  constructor(
    private readonly api: ApiClient,
    private readonly detail: PairDetail,
    samples: SampleDoc[],
    private readonly expert: () => string,
    private readonly handlers: PairCardHandlers = {},
  ) {
    this.element = document.createElement("article");
    this.element.className = "pair-card";
    this.element.dataset.s1 = detail.s1;
    this.element.dataset.s2 = detail.s2;

    const title = document.createElement("h2");
    title.textContent = `${detail.s1} vs ${detail.s2}`;
    this.element.appendChild(title);

    const summaries = document.createElement("div");
    summaries.className = "summaries";
    for (const doc of samples) summaries.appendChild(sampleSummary(doc));
    this.element.appendChild(summaries);

    const chips = document.createElement("div");
    chips.className = "chips";
    for (const [rule, verdict] of Object.entries(detail.verdicts)) {
      chips.appendChild(verdictChip(rule, verdict.value));
    }
    this.element.appendChild(chips);

    this.element.appendChild(bindingsTable(detail));

    const actions = document.createElement("div");
    actions.className = "actions";
    for (const action of ["accept", "reject"] as const) {
      const button = document.createElement("button");
      button.className = `action action--${action}`;
      button.textContent = action;
      button.addEventListener("click", () => void this.decide(action, button));
      actions.appendChild(button);
    }
    this.element.appendChild(actions);
  }

  private async decide(action: "accept" | "reject", button: HTMLButtonElement): Promise<void> {
    if (this.inFlight) return;
    this.inFlight = true;
    button.disabled = true;
    try {
      await this.api.decide({
        s1: this.detail.s1,
        s2: this.detail.s2,
        action,
        expert: this.expert(),
      });
      this.element.dataset.decision = action;
      this.handlers.onDecided?.(this.detail.s1, this.detail.s2, action);
    } catch (err) {
      // revert the optimistic lock so the expert can retry
      delete this.element.dataset.decision;
      this.handlers.onError?.(err instanceof Error ? err.message : String(err));
    } finally {
      this.inFlight = false;
      button.disabled = false;
    }
  }
}
