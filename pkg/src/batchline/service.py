"""Review service: decision log, expert-gated materialization, replay, HTTP API.

Every knowledge-base mutation flows through record_decision, and the decision
is appended to the log before the graph changes (log-first). The graph state
contributed by decisions is a pure function of the accepted-pair set, so
replaying a log reproduces the live content hash exactly.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .planner import MatchReport, evaluate_ruleset
from .reasoner import materialize
from .ruledsl import RuleSet
from .schema import Schema, serialize_schema
from .terms import RDF_TYPE, Graph, Term, Triple

from pydantic import BaseModel

IS_CLOSE_TO = "isCloseTo"
BELONGS_TO_BATCH = "belongsToBatch"
BATCH_CLASS = "Batch"


class DecisionError(ValueError):
    pass


class DecisionIn(BaseModel):
    s1: str
    s2: str
    action: str
    expert: str
    comment: Optional[str] = None


@dataclass(frozen=True)
class DecisionRecord:
    timestamp: str  # ISO-8601 UTC
    s1: str
    s2: str
    action: str  # accept | reject
    expert: str
    comment: Optional[str] = None
    verdict_snapshot_hash: str = ""

    @staticmethod
    def make(s1: str, s2: str, action: str, expert: str, comment: Optional[str] = None,
             snapshot_hash: str = "") -> "DecisionRecord":
        if action not in ("accept", "reject"):
            raise DecisionError(f"unknown action {action!r}")
        if not expert.strip():
            raise DecisionError("expert identifier must be non-empty")
        a, b = sorted((s1, s2))
        return DecisionRecord(
            timestamp=datetime.now(timezone.utc).isoformat(),
            s1=a,
            s2=b,
            action=action,
            expert=expert,
            comment=comment,
            verdict_snapshot_hash=snapshot_hash,
        )

    def as_json(self) -> str:
        doc = {
            "timestamp": self.timestamp,
            "s1": self.s1,
            "s2": self.s2,
            "action": self.action,
            "expert": self.expert,
            "verdictSnapshotHash": self.verdict_snapshot_hash,
        }
        if self.comment is not None:
            doc["comment"] = self.comment
        return json.dumps(doc)

    @staticmethod
    def from_json(line: str) -> "DecisionRecord":
        doc = json.loads(line)
        return DecisionRecord(
            timestamp=doc["timestamp"],
            s1=doc["s1"],
            s2=doc["s2"],
            action=doc["action"],
            expert=doc["expert"],
            comment=doc.get("comment"),
            verdict_snapshot_hash=doc.get("verdictSnapshotHash", ""),
        )


class _UnionFind:
    def __init__(self):
        self.parent: dict[str, str] = {}

    def find(self, x: str) -> str:
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def batch_id_for(members: list[str]) -> str:
    """Deterministic batch id from the lexicographically least member."""
    least = min(members)
    local = least.rsplit("/", 1)[-1]
    return f"stups:batch/{local}"


@dataclass
class SessionState:
    graph: Graph
    schema: Schema
    ruleset: RuleSet
    report: Optional[MatchReport] = None
    log_path: Optional[Path] = None
    status: dict[tuple[str, str], str] = field(default_factory=dict)
    decision_triples: set[Triple] = field(default_factory=set)
    report_generation: int = -1
    lock: threading.Lock = field(default_factory=threading.Lock)

    def evaluate(self, block_by: Optional[list[str]] = None) -> MatchReport:
        self.report = evaluate_ruleset(self.ruleset, self.graph, self.schema, block_by=block_by)
        self.report_generation = self.graph.generation
        return self.report

    def pair_status(self, s1: str, s2: str) -> str:
        return self.status.get(tuple(sorted((s1, s2))), "pending")

    def accepted_pairs(self) -> list[tuple[str, str]]:
        return sorted(p for p, action in self.status.items() if action == "accept")

    def batches(self) -> list[dict]:
        uf = _UnionFind()
        members: set[str] = set()
        for a, b in self.accepted_pairs():
            uf.union(a, b)
            members.update((a, b))
        groups: dict[str, list[str]] = {}
        for m in sorted(members):
            groups.setdefault(uf.find(m), []).append(m)
        return [
            {"id": batch_id_for(g), "members": g}
            for g in sorted(groups.values())
        ]

    def snapshot_hash(self, s1: str, s2: str) -> str:
        if self.report is None:
            return ""
        key = tuple(sorted((s1, s2)))
        per_rule = self.report.verdicts.get(key)
        if per_rule is None:
            return ""
        doc = json.dumps({r: v.as_dict() for r, v in sorted(per_rule.items())}, sort_keys=True)
        return hashlib.sha256(doc.encode("utf-8")).hexdigest()


def _rebuild_decision_triples(state: SessionState) -> None:
    """Derive the match/batch triples from the accepted-pair set, then
    re-materialize inferences from the asserted core."""
    for t in state.decision_triples:
        state.graph.retract(t)
    state.graph.retract_inferred()

    new_triples: set[Triple] = set()
    close_to = Term.entity(IS_CLOSE_TO)
    belongs = Term.entity(BELONGS_TO_BATCH)
    batch_cls = Term.entity(BATCH_CLASS)
    for batch in state.batches():
        batch_term = Term.entity(batch["id"])
        new_triples.add(Triple(batch_term, RDF_TYPE, batch_cls))
        for member in batch["members"]:
            new_triples.add(Triple(Term.entity(member), belongs, batch_term))
    for a, b in state.accepted_pairs():
        new_triples.add(Triple(Term.entity(a), close_to, Term.entity(b)))

    # Track only triples this rebuild actually inserted, so facts that were
    # independently asserted (e.g. ingested) are never retracted later.
    inserted: set[Triple] = set()
    for t in new_triples:
        if state.graph.insert(t):
            inserted.add(t)
    state.decision_triples = inserted
    materialize(state.graph, state.schema)


def record_decision(state: SessionState, record: DecisionRecord, append_log: bool = True) -> None:
    """Apply one expert decision: log first, then mutate the graph."""
    pair = tuple(sorted((record.s1, record.s2)))
    if state.report is None or pair not in state.report.verdicts:
        raise DecisionError(f"unknown pair: {pair[0]} / {pair[1]}")
    if append_log:
        if state.log_path is None:
            raise DecisionError("no decision log configured")
        with open(state.log_path, "a", encoding="utf-8") as fh:
            fh.write(record.as_json() + "\n")
            fh.flush()
    state.status[pair] = record.action
    _rebuild_decision_triples(state)


def replay(log_text: str, state: SessionState) -> int:
    """Re-apply a decision log to a freshly loaded state; returns record count."""
    records: list[DecisionRecord] = []
    for line_no, line in enumerate(log_text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            records.append(DecisionRecord.from_json(line))
        except (json.JSONDecodeError, KeyError) as exc:
            raise DecisionError(f"malformed decision record at line {line_no}: {exc}") from exc
    for record in records:
        record_decision(state, record, append_log=False)
    return len(records)


# ------------------------------------------------------------------ HTTP API


def create_app(state: SessionState):
    from fastapi import FastAPI, HTTPException

    app = FastAPI(title="batchline review service")

    def _resolve_pair(path: str) -> tuple[str, str]:
        """Split a /pairs/{s1}/{s2} path whose ids may themselves contain '/'."""
        if state.report is not None:
            for i in range(len(path)):
                if path[i] == "/":
                    a, b = path[:i], path[i + 1 :]
                    key = tuple(sorted((a, b)))
                    if key in state.report.verdicts:
                        return key
        raise HTTPException(status_code=404, detail=f"unknown pair: {path}")

    @app.get("/health")
    def health():
        stale = state.report_generation != state.graph.generation
        return {
            "status": "ok",
            "graphSize": state.graph.size(),
            "reportAge": state.graph.generation - max(state.report_generation, 0),
            "reportStale": stale,
        }

    @app.get("/schema")
    def get_schema():
        return json.loads(serialize_schema(state.schema))

    @app.get("/samples/{sid:path}")
    def get_sample(sid: str):
        subject = Term.entity(sid)
        triples = sorted(state.graph.match(subject, None, None), key=lambda t: t.render())
        if not triples:
            raise HTTPException(status_code=404, detail=f"unknown sample: {sid}")
        properties: dict[str, list[str]] = {}
        for t in triples:
            properties.setdefault(t.predicate.id, []).append(
                t.object.id if t.object.is_literal else t.object.id
            )
        return {"id": sid, "properties": properties}

    @app.get("/pairs")
    def list_pairs(status: Optional[str] = None, rule: Optional[str] = None,
                   page: int = 1, page_size: int = 50):
        if state.report is None:
            raise HTTPException(status_code=409, detail="no report; POST /evaluate first")
        items = []
        for s1, s2 in state.report.pairs:
            pair_status = state.pair_status(s1, s2)
            if status is not None and pair_status != status:
                continue
            per_rule = state.report.verdicts[(s1, s2)]
            if rule is not None and rule not in per_rule:
                continue
            items.append(
                {
                    "s1": s1,
                    "s2": s2,
                    "status": pair_status,
                    "verdicts": {r: v.value for r, v in sorted(per_rule.items())},
                }
            )
        total = len(items)
        start = (page - 1) * page_size
        return {
            "total": total,
            "page": page,
            "pageSize": page_size,
            "items": items[start : start + page_size],
        }

    @app.get("/pairs/{pair_path:path}")
    def pair_detail(pair_path: str):
        s1, s2 = _resolve_pair(pair_path)
        per_rule = state.report.verdicts[(s1, s2)]
        return {
            "s1": s1,
            "s2": s2,
            "status": state.pair_status(s1, s2),
            "verdicts": {r: v.as_dict() for r, v in sorted(per_rule.items())},
        }

    @app.post("/decisions", status_code=201)
    def post_decision(decision: DecisionIn):
        with state.lock:
            try:
                record = DecisionRecord.make(
                    decision.s1,
                    decision.s2,
                    decision.action,
                    decision.expert,
                    decision.comment,
                    snapshot_hash=state.snapshot_hash(decision.s1, decision.s2),
                )
                record_decision(state, record)
            except DecisionError as exc:
                code = 404 if "unknown pair" in str(exc) else 400
                raise HTTPException(status_code=code, detail=str(exc)) from exc
        return {"s1": record.s1, "s2": record.s2, "status": record.action}

    @app.get("/decisions")
    def list_decisions(pair: Optional[str] = None):
        if state.log_path is None or not Path(state.log_path).exists():
            return {"decisions": []}
        records = []
        for line in Path(state.log_path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            rec = DecisionRecord.from_json(line)
            if pair is not None:
                want = tuple(sorted(pair.split("|", 1)))
                if (rec.s1, rec.s2) != want:
                    continue
            records.append(json.loads(rec.as_json()))
        return {"decisions": records}

    @app.get("/batches")
    def list_batches():
        with state.lock:
            return {"batches": state.batches()}

    @app.post("/evaluate")
    def reevaluate():
        with state.lock:
            report = state.evaluate()
        return report.summary()

    return app


def serve(state: SessionState, host: str = "127.0.0.1", port: int = 8000):
    import uvicorn

    uvicorn.run(create_app(state), host=host, port=port)
