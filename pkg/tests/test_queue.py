import pytest

from memepipe.queue import ReviewQueue, TASK_BINARY_LABEL, TASK_CATEGORIES


class FakeClock:
    def __init__(self, now=1000.0):
        self.now = now

    def __call__(self):
        return self.now

    def advance(self, seconds):
        self.now += seconds


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def queue(tmp_path, clock):
    return ReviewQueue(tmp_path / "queue.json", lease_seconds=600, clock=clock)


class TestEnqueue:
    def test_idempotent(self, queue):
        assert queue.enqueue("a", TASK_BINARY_LABEL)
        assert not queue.enqueue("a", TASK_BINARY_LABEL)
        assert queue.depth()[TASK_BINARY_LABEL] == 1

    def test_same_image_different_tasks_distinct(self, queue):
        queue.enqueue("a", TASK_BINARY_LABEL)
        queue.enqueue("a", TASK_CATEGORIES)
        assert queue.depth()[TASK_BINARY_LABEL] == 1
        assert queue.depth()[TASK_CATEGORIES] == 1

    def test_unknown_task_rejected(self, queue):
        with pytest.raises(ValueError):
            queue.enqueue("a", "paint")


class TestLeases:
    def test_fifo_order(self, queue):
        for img in ("a", "b", "c"):
            queue.enqueue(img, TASK_BINARY_LABEL)
        assert queue.next_item(TASK_BINARY_LABEL, "r1").img_id == "a"
        assert queue.next_item(TASK_BINARY_LABEL, "r2").img_id == "b"

    def test_leased_item_hidden_from_others(self, queue):
        queue.enqueue("a", TASK_BINARY_LABEL)
        queue.next_item(TASK_BINARY_LABEL, "r1")
        assert queue.next_item(TASK_BINARY_LABEL, "r2") is None

    def test_same_reviewer_re_fetches_own_lease(self, queue):
        queue.enqueue("a", TASK_BINARY_LABEL)
        first = queue.next_item(TASK_BINARY_LABEL, "r1")
        again = queue.next_item(TASK_BINARY_LABEL, "r1")
        assert again.item_id == first.item_id

    def test_expired_lease_reassigned(self, queue, clock):
        queue.enqueue("a", TASK_BINARY_LABEL)
        queue.next_item(TASK_BINARY_LABEL, "r1")
        clock.advance(601)
        item = queue.next_item(TASK_BINARY_LABEL, "r2")
        assert item is not None
        assert item.lease_reviewer == "r2"
        assert not queue.holds_lease(item.item_id, "r1")

    def test_holds_lease_respects_expiry(self, queue, clock):
        queue.enqueue("a", TASK_BINARY_LABEL)
        item = queue.next_item(TASK_BINARY_LABEL, "r1")
        assert queue.holds_lease(item.item_id, "r1")
        clock.advance(601)
        assert not queue.holds_lease(item.item_id, "r1")

    def test_empty_reviewer_rejected(self, queue):
        with pytest.raises(ValueError):
            queue.next_item(TASK_BINARY_LABEL, "")


class TestCompleteAndPersistence:
    def test_complete_removes_from_pending(self, queue):
        queue.enqueue("a", TASK_BINARY_LABEL)
        item = queue.next_item(TASK_BINARY_LABEL, "r1")
        queue.complete(item.item_id)
        assert queue.depth()[TASK_BINARY_LABEL] == 0
        assert queue.next_item(TASK_BINARY_LABEL, "r1") is None

    def test_state_survives_reload(self, tmp_path, clock):
        q1 = ReviewQueue(tmp_path / "q.json", clock=clock)
        q1.enqueue("a", TASK_BINARY_LABEL, suggestions=[{"label": "hate"}])
        q1.enqueue("b", TASK_BINARY_LABEL)
        q1.complete("a:binary")
        q2 = ReviewQueue(tmp_path / "q.json", clock=clock)
        assert q2.get("a:binary").status == "done"
        assert [it.img_id for it in q2.pending(TASK_BINARY_LABEL)] == ["b"]

    def test_order_preserved_across_reload(self, tmp_path, clock):
        q1 = ReviewQueue(tmp_path / "q.json", clock=clock)
        for img in ("z", "m", "a"):
            q1.enqueue(img, TASK_BINARY_LABEL)
        q2 = ReviewQueue(tmp_path / "q.json", clock=clock)
        assert q2.next_item(TASK_BINARY_LABEL, "r1").img_id == "z"
