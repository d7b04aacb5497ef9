import pytest
from hypothesis import given, strategies as st

from mempoolsim import Transaction, WorldState, cumulative_cost, is_ancestor, is_future
from mempoolsim.core import ListPendingView

from conftest import tx


class TestTransaction:
    def test_fee_is_gas_times_price(self):
        t = tx("A", 0, 7, gas=30_000)
        assert t.fee == 30_000 * 7

    def test_cost_reserves_gas_limit(self):
        t = Transaction(sender="A", nonce=0, price=2, gas_used=21_000, gas_limit=50_000, value=9)
        assert t.cost == 50_000 * 2 + 9

    def test_gas_floor_enforced(self):
        with pytest.raises(ValueError):
            Transaction(sender="A", nonce=0, price=1, gas_used=20_999)

    def test_gas_used_capped_by_limit(self):
        with pytest.raises(ValueError):
            Transaction(sender="A", nonce=0, price=1, gas_used=30_000, gas_limit=25_000)

    def test_price_must_be_positive(self):
        with pytest.raises(ValueError):
            tx("A", 0, 0)

    @given(gas=st.integers(21_000, 10**6), price=st.integers(1, 10**9))
    def test_fee_exact_integer(self, gas, price):
        assert tx("A", 0, price, gas=gas).fee == gas * price


class TestIsAncestor:
    def test_lower_nonce_same_sender(self):
        assert is_ancestor(tx("A", 1, 1), tx("A", 3, 1))

    def test_equal_nonce_is_not_ancestor(self):
        assert not is_ancestor(tx("A", 3, 1), tx("A", 3, 1))

    def test_different_senders(self):
        assert not is_ancestor(tx("B", 1, 1), tx("A", 2, 1))

    @given(st.data())
    def test_strict_partial_order_per_sender(self, data):
        nonces = data.draw(st.lists(st.integers(0, 50), min_size=3, max_size=3, unique=True))
        a, b, c = (tx("A", n, 1) for n in nonces)
        assert not is_ancestor(a, a)
        if is_ancestor(a, b) and is_ancestor(b, c):
            assert is_ancestor(a, c)
        # totality over distinct nonces of one sender
        assert is_ancestor(a, b) or is_ancestor(b, a)


class TestIsFuture:
    def _world(self, nonce):
        world = WorldState()
        world.fund("A", 10**18, nonce=nonce)
        return world

    def test_complete_chain_is_not_future(self):
        pool = ListPendingView([tx("A", 1, 1), tx("A", 2, 1)])
        assert not is_future(tx("A", 3, 1), pool, self._world(1))

    def test_missing_ancestor_is_future(self):
        pool = ListPendingView([tx("A", 1, 1)])
        assert is_future(tx("A", 3, 1), pool, self._world(1))

    def test_first_pending_nonce_not_future(self):
        assert not is_future(tx("A", 5, 1), ListPendingView([]), self._world(5))

    @given(st.sets(st.integers(0, 12), max_size=10), st.integers(0, 12))
    def test_not_future_means_full_chain(self, present, target_nonce):
        world = self._world(0)
        pool = ListPendingView([tx("A", n, 1) for n in present])
        target = tx("A", target_nonce, 1)
        if not is_future(target, pool, world):
            assert all(n in present for n in range(0, target_nonce))


class TestCumulativeCost:
    def test_empty_pool(self):
        assert cumulative_cost("A", 5, ListPendingView([])) == 0

    def test_sums_up_to_nonce(self):
        a1 = Transaction(sender="A", nonce=1, price=1, gas_used=21_000, gas_limit=100_000)
        a2 = Transaction(sender="A", nonce=2, price=1, gas_used=21_000, gas_limit=50_000)
        pool = ListPendingView([a1, a2])
        assert cumulative_cost("A", 2, pool) == a1.cost + a2.cost
        assert cumulative_cost("A", 1, pool) == a1.cost

    def test_other_senders_excluded(self):
        a1 = tx("A", 1, 100)
        b1 = tx("B", 1, 999)
        pool = ListPendingView([a1, b1])
        # brute-force filter oracle
        expected = sum(t.cost for t in [a1, b1] if t.sender == "A" and t.nonce <= 5)
        assert cumulative_cost("A", 5, pool) == expected == a1.cost
