import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { BatchView } from "../src/batches.js";
import { PairCard } from "../src/paircard.js";
import type { PairDetail, SampleDoc } from "../src/types.js";
import { fixture, fixtureFetch, flush, get, type Route } from "./helpers.js";

const DETAIL = fixture<PairDetail>("pair-detail.json");
const SAMPLES = [fixture<SampleDoc>("sample-1.json"), fixture<SampleDoc>("sample-2.json")];

const acceptRoute: Route = (call) =>
  call.method === "POST" && call.url === "/decisions"
    ? { status: 201, body: fixture("decision-accepted.json") }
    : undefined;

function makeCard(routes: Route[], handlers = {}) {
  const { fetch, calls } = fixtureFetch(routes);
  const api = new ApiClient("", fetch);
  const card = new PairCard(api, DETAIL, SAMPLES, () => "alice", handlers);
  return { card, api, calls };
}

describe("pair card", () => {
  it("renders chips and a bindings table traceable to API fields", () => {
    const { card } = makeCard([]);
    const chips = card.element.querySelectorAll<HTMLElement>(".chip");
    expect(chips).toHaveLength(4);

    const cells = Array.from(card.element.querySelectorAll(".bindings td"), (td) => td.textContent);
    // every rendered binding value comes verbatim from the fixture
    expect(cells).toContain('"cannabis"^^string');
    expect(cells).toContain('"resin"^^string');
    const fixtureValues = new Set(
      Object.values(DETAIL.verdicts).flatMap((v) => [
        ...Object.keys(v.bindings),
        ...Object.values(v.bindings),
      ]),
    );
    for (const cell of cells) {
      if (cell && !(cell in DETAIL.verdicts)) expect(fixtureValues.has(cell)).toBe(true);
    }
  });

  it("renders sample summaries from the samples endpoint", () => {
    const { card } = makeCard([]);
    const summary = card.element.querySelector<HTMLElement>(
      '[data-sample="stups:sample/1"]',
    );
    expect(summary).not.toBeNull();
    expect(summary!.textContent).toContain("200.0");
  });

  it("accept issues exactly one POST /decisions even on double-click", async () => {
    const { card, calls } = makeCard([acceptRoute]);
    const accept = card.element.querySelector<HTMLButtonElement>(".action--accept")!;
    accept.click();
    accept.click();
    await flush();
    const posts = calls.filter((c) => c.method === "POST");
    expect(posts).toHaveLength(1);
    expect(posts[0]!.body).toEqual({
      s1: "stups:sample/1",
      s2: "stups:sample/2",
      action: "accept",
      expert: "alice",
    });
    expect(card.element.dataset.decision).toBe("accept");
  });

  it("batch view reflects the new batch after an accepted decision triggers a refetch", async () => {
    let accepted = false;
    const { fetch, calls } = fixtureFetch([
      (call) => {
        if (call.method === "POST" && call.url === "/decisions") {
          accepted = true;
          return { status: 201, body: fixture("decision-accepted.json") };
        }
        return undefined;
      },
      (call) =>
        call.url === "/batches"
          ? { body: fixture(accepted ? "batches-after-accept.json" : "batches-empty.json") }
          : undefined,
    ]);
    const api = new ApiClient("", fetch);
    const batches = new BatchView(api);
    await batches.refresh();
    expect(batches.element.querySelectorAll(".batch")).toHaveLength(0);

    const card = new PairCard(api, DETAIL, SAMPLES, () => "alice", {
      onDecided: () => void batches.refresh(),
    });
    card.element.querySelector<HTMLButtonElement>(".action--accept")!.click();
    await flush();

    const items = batches.element.querySelectorAll<HTMLElement>(".batch");
    expect(items).toHaveLength(1);
    expect(items[0]!.dataset.batchId).toBe("stups:batch/1");
    expect(items[0]!.textContent).toContain("stups:sample/1");
    expect(items[0]!.textContent).toContain("stups:sample/2");
    expect(calls.filter((c) => c.method === "POST")).toHaveLength(1);
  });

  it("reverts and surfaces a diagnostic when the server rejects the decision", async () => {
    const errors: string[] = [];
    const { card } = makeCard(
      [() => ({ status: 404, body: { detail: "unknown pair" } })],
      { onError: (message: string) => errors.push(message) },
    );
    card.element.querySelector<HTMLButtonElement>(".action--reject")!.click();
    await flush();
    expect(card.element.dataset.decision).toBeUndefined();
    expect(errors).toHaveLength(1);
    expect(errors[0]).toContain("unknown pair");
  });
});
