import { ApiClient } from "./api.js";
import { BatchView } from "./batches.js";
import { PairCard } from "./paircard.js";
import { ReviewQueue } from "./queue.js";

/**
 * Wire the review console into a host element. Exported so tests can mount
 * the app against an injected client; index.html calls it on DOMContentLoaded.
 */
export function mountApp(root: HTMLElement, api: ApiClient): { queue: ReviewQueue; batches: BatchView } {
  root.replaceChildren();

  const expertInput = document.createElement("input");
  expertInput.className = "expert-input";
  expertInput.placeholder = "expert identifier";
  root.appendChild(expertInput);

  const status = document.createElement("p");
  status.className = "status-line";
  root.appendChild(status);

  const detailHost = document.createElement("div");
  detailHost.className = "detail-host";

  const batches = new BatchView(api);

  const queue = new ReviewQueue(api, {
    onOpen: (s1, s2) => void openDetail(s1, s2),
    onError: (message) => {
      status.textContent = message;
    },
  });

  async function openDetail(s1: string, s2: string): Promise<void> {
    const [detail, ...samples] = await Promise.all([
      api.pairDetail(s1, s2),
      api.sample(s1),
      api.sample(s2),
    ]);
    const card = new PairCard(api, detail, samples, () => expertInput.value || "anonymous", {
      onDecided: () => {
        detailHost.replaceChildren();
        void queue.refresh();
        void batches.refresh();
      },
      onError: (message) => {
        status.textContent = message;
      },
    });
    detailHost.replaceChildren(card.element);
  }

  root.append(queue.element, detailHost, batches.element);
  void queue.refresh();
  void batches.refresh();
  return { queue, batches };
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mountApp(document.getElementById("app") as HTMLElement, new ApiClient());
}
