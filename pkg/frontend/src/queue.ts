import type { ApiClient } from "./api.js";
import type { PairSummary, VerdictValue } from "./types.js";
import { verdictChip } from "./paircard.js";

export interface QueueFilter {
  status?: string;
  rule?: string;
  page?: number;
}

export interface QueueHandlers {
  onOpen?: (s1: string, s2: string) => void;
  onError?: (message: string) => void;
}

function queueRow(pair: PairSummary, handlers: QueueHandlers): HTMLElement {
  const row = document.createElement("li");
  row.className = "queue-row";
  row.dataset.s1 = pair.s1;
  row.dataset.s2 = pair.s2;
  row.dataset.status = pair.status;

  const label = document.createElement("span");
  label.className = "queue-row-label";
  label.textContent = `${pair.s1} vs ${pair.s2}`;
  row.appendChild(label);

  for (const [rule, value] of Object.entries(pair.verdicts)) {
    row.appendChild(verdictChip(rule, value as VerdictValue));
  }

  row.addEventListener("click", () => handlers.onOpen?.(pair.s1, pair.s2));
  return row;
}

/** Paginated list of candidate pairs; clicking a row opens the detail card. */
export class ReviewQueue {
  readonly element: HTMLElement;

  constructor(
    private readonly api: ApiClient,
    private readonly handlers: QueueHandlers = {},
  ) {
    this.element = document.createElement("section");
    this.element.className = "review-queue";
  }

  async refresh(filter: QueueFilter = { status: "pending" }): Promise<void> {
    let page;
    try {
      page = await this.api.pairs(filter);
    } catch (err) {
      this.renderRetryBanner(err instanceof Error ? err.message : String(err));
      return;
    }
    this.element.replaceChildren();
    if (page.total === 0) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "No candidate pairs to review.";
      this.element.appendChild(empty);
      return;
    }
    const list = document.createElement("ul");
    list.className = "queue-list";
    for (const pair of page.items) list.appendChild(queueRow(pair, this.handlers));
    this.element.appendChild(list);

    const pager = document.createElement("p");
    pager.className = "pager";
    pager.textContent = `page ${page.page} — ${page.items.length} of ${page.total} pairs`;
    this.element.appendChild(pager);
  }

  /** Keep whatever is currently rendered; the banner offers a retry. */
  private renderRetryBanner(message: string): void {
    this.element.querySelector(".retry-banner")?.remove();
    const banner = document.createElement("div");
    banner.className = "retry-banner";
    banner.textContent = `Service unreachable: ${message} `;
    const retry = document.createElement("button");
    retry.textContent = "Retry";
    retry.addEventListener("click", () => void this.refresh());
    banner.appendChild(retry);
    this.element.prepend(banner);
    this.handlers.onError?.(message);
  }
}
