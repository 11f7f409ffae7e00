import type { ApiClient } from "./api.js";

/** Read-only list of batches (connected groups of accepted samples). */
export class BatchView {
  readonly element: HTMLElement;

  constructor(private readonly api: ApiClient) {
    this.element = document.createElement("section");
    this.element.className = "batch-view";
  }

  async refresh(): Promise<void> {
    const { batches } = await this.api.batches();
    this.element.replaceChildren();
    if (batches.length === 0) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "No batches yet.";
      this.element.appendChild(empty);
      return;
    }
    const list = document.createElement("ul");
    list.className = "batch-list";
    for (const batch of batches) {
      const item = document.createElement("li");
      item.className = "batch";
      item.dataset.batchId = batch.id;
      item.textContent = `${batch.id}: ${batch.members.join(", ")}`;
      list.appendChild(item);
    }
    this.element.appendChild(list);
  }
}
