use alloc::collections::BinaryHeap;
use core::cmp::{Ordering, Reverse};

/// Simulation time in integer nanoseconds.
pub type Nanos = u64;

struct Scheduled<E> {
    time: Nanos,
    seq: u64,
    event: E,
}

impl<E> PartialEq for Scheduled<E> {
    fn eq(&self, other: &Self) -> bool {
        (self.time, self.seq) == (other.time, other.seq)
    }
}

impl<E> Eq for Scheduled<E> {}

impl<E> PartialOrd for Scheduled<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Scheduled<E> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.time, self.seq).cmp(&(other.time, other.seq))
    }
}

/// Min-queue of events ordered by `(time, insertion sequence)`.
pub(crate) struct EventQueue<E> {
    heap: BinaryHeap<Reverse<Scheduled<E>>>,
    now: Nanos,
    next_seq: u64,
}

impl<E> EventQueue<E> {
    pub(crate) fn new() -> Self {
        EventQueue {
            heap: BinaryHeap::new(),
            now: 0,
            next_seq: 0,
        }
    }

    pub(crate) fn now(&self) -> Nanos {
        self.now
    }

    /// Panics if `time` is before the current clock; every caller schedules
    /// at `now + duration`.
    pub(crate) fn schedule(&mut self, time: Nanos, event: E) {
        assert!(time >= self.now, "event scheduled in the past ({time} < {})", self.now);
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Scheduled { time, seq, event }));
    }

    pub(crate) fn pop(&mut self) -> Option<E> {
        let Reverse(s) = self.heap.pop()?;
        self.now = s.time;
        Some(s.event)
    }
}
