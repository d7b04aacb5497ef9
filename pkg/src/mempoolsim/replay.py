"""Deterministic trace replay: feeds events through pool admission, builds
blocks on triggers (or at end-of-trace), and folds the metrics ledgers.

The same (config, events) pair always produces a byte-identical report;
``RunReport.report_hash()`` is the cheap way to check that.
"""

from __future__ import annotations

import hashlib
import json
import statistics
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .builder import build_block, drain
from .core import AdmissionOutcome, Block, OutcomeKind, Transaction, WorldState
from .metrics import OutcomeFlags, UtilLedger, classify_outcome
from .policies import PolicyConfig
from .pool import Mempool, PoolError
from .trace import TraceEvent, world_for_trace


class ReplayAbort(Exception):
    """An engine invariant broke mid-replay; carries the offending event index."""

    def __init__(self, index: int, cause: Exception):
        self.index = index
        self.cause = cause
        super().__init__(f"replay aborted at event {index}: {cause}")


@dataclass
class ScenarioConfig:
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    capacity: int = 5120
    block_gas_limit: int = 30_000_000
    account_seeds: Dict[str, Tuple[int, int]] = field(default_factory=dict)
    drain_mode: str = "end_only"  # or "interleaved"
    snapshot_every: Optional[int] = None
    final_drain: bool = True

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError("capacity must be positive")
        if self.drain_mode not in ("end_only", "interleaved"):
            raise ValueError(f"unknown drain mode: {self.drain_mode}")
        if self.snapshot_every is not None and self.snapshot_every < 1:
            raise ValueError("snapshot_every must be positive")


@dataclass
class Snapshot:
    event_index: int
    ts_ms: int
    pending: List[Transaction]
    price_sum: int
    fee_sum: int


@dataclass
class RunReport:
    policy: str
    capacity: int
    event_count: int = 0
    outcomes: List[AdmissionOutcome] = field(default_factory=list)
    reason_counts: Dict[str, int] = field(default_factory=dict)
    blocks: List[Block] = field(default_factory=list)
    snapshots: List[Snapshot] = field(default_factory=list)
    util: UtilLedger = field(default_factory=UtilLedger)
    flags: List[Tuple[int, OutcomeFlags]] = field(default_factory=list)
    price_sum_series: List[int] = field(default_factory=list)
    final_pending: List[Transaction] = field(default_factory=list)
    declined: List[Tuple[Transaction, str]] = field(default_factory=list)
    pool_fees_final: int = 0
    block_fees_final: int = 0
    declined_fees_final: int = 0

    def included_txs(self) -> List[Transaction]:
        return [tx for block in self.blocks for tx in block.txs]

    def summary(self) -> Dict:
        return {
            "policy": self.policy,
            "capacity": self.capacity,
            "events": self.event_count,
            "reasons": dict(sorted(self.reason_counts.items())),
            "blocks": len(self.blocks),
            "block_fees": self.block_fees_final,
            "pool_fees": self.pool_fees_final,
            "declined_fees": self.declined_fees_final,
            "dutil_total": self.util.total.dutil,
            "pending": len(self.final_pending),
        }

    def canonical(self) -> Dict:
        def tx_key(tx: Transaction):
            return [tx.sender, tx.nonce, tx.price, tx.gas_used, tx.gas_limit, tx.value]

        return {
            "summary": self.summary(),
            "outcomes": [
                [o.kind.value, o.reason.value, tx_key(o.tx), [tx_key(v) for v in o.victims]]
                for o in self.outcomes
            ],
            "blocks": [[tx_key(tx) for tx in b.txs] for b in self.blocks],
            "declined": [[tx_key(tx), reason] for tx, reason in self.declined],
            "price_sums": self.price_sum_series,
        }

    def report_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _first_gap(confirmed: int, nonces) -> int:
    n = confirmed
    while n in nonces:
        n += 1
    return n


def _sender_flags(
    world: WorldState,
    sender: str,
    before_nonces: set,
    after_nonces: set,
) -> Tuple[bool, bool]:
    confirmed = world.nonce_of(sender)
    gap_before = _first_gap(confirmed, before_nonces)
    gap_after = _first_gap(confirmed, after_nonces)
    ftp = ptf = False
    for nonce in before_nonces & after_nonces:
        was = nonce > gap_before
        now = nonce > gap_after
        if was and not now:
            ftp = True
        elif now and not was:
            ptf = True
    return ftp, ptf


def replay(
    config: ScenarioConfig,
    events: Sequence[TraceEvent],
    world: Optional[WorldState] = None,
) -> RunReport:
    pool = Mempool(config.capacity, config.policy.per_sender_limit)
    if world is None:
        world = world_for_trace(
            events, overrides=config.account_seeds, block_gas_limit=config.block_gas_limit
        )
    policy = config.policy.build()
    report = RunReport(policy=config.policy.kind, capacity=config.capacity)
    pool_fees = 0
    block_fees = 0
    declined_fees = 0

    def snapshot(index: int, ts: int) -> None:
        report.snapshots.append(
            Snapshot(index, ts, pool.pending(), pool.price_sum(), pool.fee_sum())
        )

    for index, event in enumerate(events):
        try:
            if event.kind == "snapshot_marker":
                snapshot(index, event.ts_ms)
            elif event.kind == "block_trigger":
                if config.drain_mode == "interleaved":
                    result = build_block(pool, world)
                    moved = result.block.revenue
                    pool_fees -= moved
                    block_fees += moved
                    report.blocks.append(result.block)
                    report.util.record("block", 0, 0)
            else:
                tx = event.tx
                outcome = pool.admit(tx, world, policy)
                affected = {tx.sender} | {v.sender for v in outcome.victims}
                # before-state per sender reconstructed from the after-state:
                # drop the admitted tx, re-add this sender's victims
                flags_ftp = flags_ptf = False
                for s in affected:
                    after_nonces = {t.nonce for t in pool.sender_txs(s)}
                    before_nonces = set(after_nonces)
                    if outcome.admitted and tx.sender == s:
                        before_nonces.discard(tx.nonce)
                    for v in outcome.victims:
                        if v.sender == s:
                            before_nonces.add(v.nonce)
                    ftp, ptf = _sender_flags(world, s, before_nonces, after_nonces)
                    flags_ftp |= ftp
                    flags_ptf |= ptf
                flags = OutcomeFlags(flags_ftp, flags_ptf)
                if flags.future_turn_pending or flags.pending_turn_future:
                    report.flags.append((index, flags))
                if outcome.kind is OutcomeKind.DECLINED:
                    inside, outside = 0, tx.fee
                elif outcome.kind is OutcomeKind.ADMITTED_NO_EVICT:
                    inside, outside = tx.fee, 0
                else:
                    evicted = sum(v.fee for v in outcome.victims)
                    inside, outside = tx.fee - evicted, evicted
                pool_fees += inside
                declined_fees += outside
                report.util.record(classify_outcome(outcome).value, inside, outside, flags)
                report.outcomes.append(outcome)
                reason = outcome.reason.value
                report.reason_counts[reason] = report.reason_counts.get(reason, 0) + 1
                report.price_sum_series.append(pool.price_sum())
        except PoolError as exc:
            raise ReplayAbort(index, exc) from exc
        if config.snapshot_every and (index + 1) % config.snapshot_every == 0:
            snapshot(index, event.ts_ms)

    report.event_count = len(events)
    snapshot(len(events), events[-1].ts_ms if events else 0)
    if config.final_drain and (config.drain_mode == "end_only" or len(pool) > 0):
        declined_before = len(pool.declined)
        end_blocks = drain(pool, world)
        for block in end_blocks:
            moved = block.revenue
            pool_fees -= moved
            block_fees += moved
            report.blocks.append(block)
            report.util.record("block", 0, 0)
        for tx, reason in pool.declined[declined_before:]:
            pool_fees -= tx.fee
            declined_fees += tx.fee
            report.util.record("unbuildable", -tx.fee, tx.fee)
    report.final_pending = pool.pending()
    report.declined = [(tx, reason.value) for tx, reason in pool.declined]
    report.pool_fees_final = pool.fee_sum()
    report.block_fees_final = sum(b.revenue for b in report.blocks)
    report.declined_fees_final = sum(tx.fee for tx, _ in pool.declined)
    return report


# ----------------------------------------------------------------- bench


@dataclass
class BenchReport:
    workload: str
    policy: str
    rounds: int
    times_s: List[float]
    mean_s: float
    stdev_s: float
    events_per_s: float
    peak_rss_kb: int

    def csv_row(self) -> str:
        return (
            f"{self.workload},{self.policy},{self.rounds},{self.mean_s:.6f},"
            f"{self.stdev_s:.6f},{self.events_per_s:.1f},{self.peak_rss_kb}"
        )

    CSV_HEADER = "workload,policy,rounds,mean_s,stdev_s,events_per_s,peak_rss_kb"


def bench(
    config: ScenarioConfig,
    events: Sequence[TraceEvent],
    rounds: int,
    workload: str = "custom",
) -> BenchReport:
    """Wall-clock admission time per round; mean and stdev across rounds."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    try:
        import resource

        peak_rss = lambda: resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    except ImportError:  # pragma: no cover - non-POSIX
        peak_rss = lambda: 0
    world_template = world_for_trace(
        events, overrides=config.account_seeds, block_gas_limit=config.block_gas_limit
    )
    times: List[float] = []
    for _ in range(rounds):
        pool = Mempool(config.capacity, config.policy.per_sender_limit)
        world = world_template.clone()
        policy = config.policy.build()
        t0 = time.perf_counter()
        for event in events:
            if event.kind == "tx_arrival":
                pool.admit(event.tx, world, policy)
        times.append(time.perf_counter() - t0)
    mean = statistics.fmean(times)
    stdev = statistics.stdev(times) if rounds > 1 else 0.0
    n_arrivals = sum(1 for e in events if e.kind == "tx_arrival")
    return BenchReport(
        workload=workload,
        policy=config.policy.kind,
        rounds=rounds,
        times_s=times,
        mean_s=mean,
        stdev_s=stdev,
        events_per_s=n_arrivals / mean if mean > 0 else 0.0,
        peak_rss_kb=peak_rss(),
    )
