"""Bounded transaction pool with price-ordered and sender/nonce-ordered indexes.

The pool keeps three synchronized views of the pending set:

* ``by_price``   - all pending txs ordered by (price, insertion seq)
* ``by_sender``  - per-sender lists ordered by ascending nonce
* ``min_fee_by_sender`` - lowest pending fee per sender

plus a derived ordered view of childless transactions (each sender's
maximal-nonce tx), which is what chain-safe eviction scans.

Mutations are single-writer; reads on a snapshot (``clone``) are safe to
share across threads.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from sortedcontainers import SortedKeyList

from .core import (
    AdmissionOutcome,
    OutcomeKind,
    PendingView,
    Reason,
    Transaction,
    WorldState,
)


class Verdict(Enum):
    VALID = "valid"
    FUTURE = "future"
    OVERDRAFT = "overdraft"
    STALE = "stale"
    DUPLICATE = "duplicate"


@dataclass(frozen=True)
class PrecheckReport:
    verdict: Verdict
    detail: str = ""


_VERDICT_REASON = {
    Verdict.FUTURE: Reason.INVALID_FUTURE,
    Verdict.OVERDRAFT: Reason.INVALID_OVERDRAFT,
    Verdict.STALE: Reason.STALE,
    Verdict.DUPLICATE: Reason.DUPLICATE,
}


class PoolError(Exception):
    pass


class Mempool(PendingView):
    def __init__(self, capacity: int, per_sender_limit: Optional[int] = None):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.per_sender_limit = per_sender_limit
        self._by_key: Dict[Tuple[str, int], Transaction] = {}
        self._by_sender: Dict[str, List[Transaction]] = {}
        self._seq_of: Dict[int, int] = {}
        self._next_seq = 0
        # price index over all pending; tie broken by insertion order
        self._by_price = SortedKeyList(key=lambda tx: (tx.price, self._seq_of[tx.id]))
        # fee index over all pending, for minimum-fee lookups
        self._by_fee = SortedKeyList(key=lambda tx: (tx.fee, self._seq_of[tx.id]))
        # price index over childless txs only
        self._childless = SortedKeyList(key=lambda tx: (tx.price, self._seq_of[tx.id]))
        self.min_fee_by_sender: Dict[str, int] = {}
        self.declined: List[Tuple[Transaction, Reason]] = []
        self._cost_by_sender: Dict[str, int] = {}
        self._price_sum = 0
        self._fee_sum = 0

    # ------------------------------------------------------------- views

    def __len__(self) -> int:
        return len(self._by_key)

    def __contains__(self, tx: Transaction) -> bool:
        return self._by_key.get((tx.sender, tx.nonce)) == tx

    @property
    def full(self) -> bool:
        return len(self._by_key) >= self.capacity

    def get(self, sender: str, nonce: int) -> Optional[Transaction]:
        return self._by_key.get((sender, nonce))

    def sender_txs(self, sender: str) -> List[Transaction]:
        return list(self._by_sender.get(sender, ()))

    def pending(self) -> List[Transaction]:
        return list(self._by_key.values())

    def pending_by_price(self) -> List[Transaction]:
        return list(self._by_price)

    def seq_of(self, tx: Transaction) -> int:
        return self._seq_of[tx.id]

    def price_sum(self) -> int:
        return self._price_sum

    def fee_sum(self) -> int:
        return self._fee_sum

    def min_price_tx(self) -> Optional[Transaction]:
        """Globally cheapest pending tx, oldest first among equal prices."""
        return self._by_price[0] if self._by_price else None

    def min_fee_tx(self) -> Optional[Transaction]:
        """Pending tx with minimal fee, oldest first among equal fees."""
        return self._by_fee[0] if self._by_fee else None

    def find_childless(self) -> List[Transaction]:
        """Each sender's maximal-nonce pending transaction."""
        return list(self._childless)

    def min_price_childless(self) -> Optional[Transaction]:
        """Cheapest childless tx.

        Among equal prices the tx whose sender holds the smaller chain-minimum
        fee is preferred, then insertion order (oldest first).
        """
        if not self._childless:
            return None
        lowest = self._childless[0].price
        group = []
        for tx in self._childless:
            if tx.price != lowest:
                break
            group.append(tx)
        return min(group, key=lambda tx: (self.min_fee_by_sender[tx.sender], self._seq_of[tx.id]))

    def descendant_victim(self, seed: Transaction) -> Transaction:
        """Maximal-nonce pending tx of ``seed``'s sender; ``seed`` itself if childless."""
        if seed not in self:
            raise PoolError(f"seed {seed!r} not pending")
        return self._by_sender[seed.sender][-1]

    def chain_tail_victims(self, seed: Transaction, count: int = 1) -> List[Transaction]:
        """Last ``count`` transactions (by nonce) of ``seed``'s sender chain."""
        if seed not in self:
            raise PoolError(f"seed {seed!r} not pending")
        chain = self._by_sender[seed.sender]
        return list(reversed(chain[-count:]))

    # ------------------------------------------------------------- checks

    def precheck(self, tx: Transaction, world: WorldState) -> PrecheckReport:
        """Validity gate applied in order stale -> duplicate -> future -> overdraft.

        Uses the sorted per-sender index for O(log chain) checks; equivalent
        to the generic ``is_future`` / ``cumulative_cost`` predicates.
        """
        confirmed = world.nonce_of(tx.sender)
        if tx.nonce < confirmed:
            return PrecheckReport(Verdict.STALE, f"nonce {tx.nonce} < confirmed {confirmed}")
        if (tx.sender, tx.nonce) in self._by_key:
            return PrecheckReport(Verdict.DUPLICATE, f"({tx.sender},{tx.nonce}) already pending")
        chain = self._by_sender.get(tx.sender, [])
        if tx.nonce > confirmed:
            # nonces are unique and sorted, so [confirmed, tx.nonce) is fully
            # covered iff the index span matches the nonce span
            lo = bisect_left(chain, confirmed, key=lambda t: t.nonce)
            hi = bisect_left(chain, tx.nonce, key=lambda t: t.nonce)
            if hi - lo != tx.nonce - confirmed:
                return PrecheckReport(Verdict.FUTURE, "missing ancestor nonce")
        hi = bisect_left(chain, tx.nonce, key=lambda t: t.nonce)
        if hi == len(chain):
            below = self._cost_by_sender.get(tx.sender, 0)
        else:
            below = sum(t.cost for t in chain[:hi])
        reserved = below + tx.cost
        balance = world.balance_of(tx.sender)
        if reserved > balance:
            return PrecheckReport(Verdict.OVERDRAFT, f"reserved {reserved} > balance {balance}")
        return PrecheckReport(Verdict.VALID)

    # ---------------------------------------------------------- mutation

    def _insert(self, tx: Transaction) -> None:
        key = (tx.sender, tx.nonce)
        self._seq_of[tx.id] = self._next_seq
        self._next_seq += 1
        self._by_key[key] = tx
        chain = self._by_sender.setdefault(tx.sender, [])
        if chain and tx.nonce > chain[-1].nonce:
            old_tail = chain[-1]
            self._childless.remove(old_tail)
            chain.append(tx)
            self._childless.add(tx)
        else:
            # out-of-order insert keeps the chain sorted by nonce
            old_tail = chain[-1] if chain else None
            chain.append(tx)
            chain.sort(key=lambda t: t.nonce)
            if old_tail is None:
                self._childless.add(tx)
            elif chain[-1] is not old_tail:
                self._childless.remove(old_tail)
                self._childless.add(chain[-1])
        self._by_price.add(tx)
        self._by_fee.add(tx)
        prev = self.min_fee_by_sender.get(tx.sender)
        if prev is None or tx.fee < prev:
            self.min_fee_by_sender[tx.sender] = tx.fee
        self._cost_by_sender[tx.sender] = self._cost_by_sender.get(tx.sender, 0) + tx.cost
        self._price_sum += tx.price
        self._fee_sum += tx.fee

    def _remove(self, tx: Transaction) -> None:
        key = (tx.sender, tx.nonce)
        if self._by_key.get(key) != tx:
            raise PoolError(f"{tx!r} not pending")
        del self._by_key[key]
        chain = self._by_sender[tx.sender]
        was_tail = chain[-1] is tx
        chain.remove(tx)
        if was_tail:
            self._childless.remove(tx)
            if chain:
                self._childless.add(chain[-1])
        self._by_price.remove(tx)
        self._by_fee.remove(tx)
        if not chain:
            del self._by_sender[tx.sender]
            del self.min_fee_by_sender[tx.sender]
            del self._cost_by_sender[tx.sender]
        else:
            self.min_fee_by_sender[tx.sender] = min(t.fee for t in chain)
            self._cost_by_sender[tx.sender] -= tx.cost
        self._price_sum -= tx.price
        self._fee_sum -= tx.fee
        del self._seq_of[tx.id]

    def apply_admission(self, tx: Transaction, victims: List[Transaction]) -> None:
        """Remove ``victims`` (recorded as evicted), then insert ``tx``."""
        for victim in victims:
            if victim not in self:
                raise PoolError(f"victim {victim!r} not pending")
        if len(self._by_key) - len(victims) + 1 > self.capacity:
            raise PoolError("admission would exceed capacity")
        for victim in victims:
            self._remove(victim)
            self.declined.append((victim, Reason.EVICTION))
        self._insert(tx)

    def remove_included(self, tx: Transaction) -> None:
        """Drop a tx that was included in a block (not an eviction)."""
        self._remove(tx)

    def decline(self, tx: Transaction, reason: Reason) -> None:
        self.declined.append((tx, reason))

    # ---------------------------------------------------------- admission

    def admit(self, tx: Transaction, world: WorldState, policy) -> AdmissionOutcome:
        """Run precheck, delegate victim selection to ``policy``, apply the result."""
        report = self.precheck(tx, world)
        if report.verdict is not Verdict.VALID:
            reason = _VERDICT_REASON[report.verdict]
            self.decline(tx, reason)
            return AdmissionOutcome(OutcomeKind.DECLINED, reason, tx)
        if self.per_sender_limit is not None:
            if len(self._by_sender.get(tx.sender, ())) >= self.per_sender_limit:
                self.decline(tx, Reason.SENDER_LIMIT)
                return AdmissionOutcome(OutcomeKind.DECLINED, Reason.SENDER_LIMIT, tx)
        decision = policy.decide(self, tx)
        if decision.declined:
            self.decline(tx, decision.reason)
            return AdmissionOutcome(OutcomeKind.DECLINED, decision.reason, tx)
        victims = list(decision.victims)
        self.apply_admission(tx, victims)
        if victims:
            return AdmissionOutcome(
                OutcomeKind.ADMITTED_EVICTING, Reason.EVICTION, tx, tuple(victims)
            )
        return AdmissionOutcome(OutcomeKind.ADMITTED_NO_EVICT, Reason.POOL_NOT_FULL, tx)

    # ---------------------------------------------------------- snapshot

    def clone(self) -> "Mempool":
        other = Mempool(self.capacity, self.per_sender_limit)
        other._by_key = dict(self._by_key)
        other._by_sender = {s: list(chain) for s, chain in self._by_sender.items()}
        other._seq_of = dict(self._seq_of)
        other._next_seq = self._next_seq
        other._by_price.update(self._by_key.values())
        other._by_fee.update(self._by_key.values())
        other._childless.update(chain[-1] for chain in other._by_sender.values())
        other.min_fee_by_sender = dict(self.min_fee_by_sender)
        other.declined = list(self.declined)
        other._cost_by_sender = dict(self._cost_by_sender)
        other._price_sum = self._price_sum
        other._fee_sum = self._fee_sum
        return other
