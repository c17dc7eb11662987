use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{NodeId, SimError, Trace, TraceRecord};

pub const DEFAULT_MAX_EVENTS: u64 = 10_000_000;

/// The single seeded generator of a run. ChaCha8 keeps the seed-to-stream
/// mapping stable across platforms and releases of this crate.
#[derive(Debug, Clone)]
pub struct SimRng(ChaCha8Rng);

impl SimRng {
    pub fn seeded(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn inner(&mut self) -> &mut ChaCha8Rng {
        &mut self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event<K> {
    pub fire_time: f64,
    pub sequence: u64,
    pub kind: K,
}

// Min-heap order on (fire_time, sequence); the payload never participates.
struct Queued<K>(Event<K>);

impl<K> PartialEq for Queued<K> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<K> Eq for Queued<K> {}

impl<K> PartialOrd for Queued<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<K> Ord for Queued<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .fire_time
            .total_cmp(&self.0.fire_time)
            .then_with(|| other.0.sequence.cmp(&self.0.sequence))
    }
}

/// A state machine driven by the engine.
pub trait Process {
    type Event;

    fn handle(&mut self, event: Event<Self::Event>, engine: &mut Engine<Self::Event>) -> Result<(), SimError>;
}

/// Virtual clock plus an event queue popped in `(fire_time, sequence)` order.
pub struct Engine<K> {
    now: f64,
    next_sequence: u64,
    queue: BinaryHeap<Queued<K>>,
    trace: Trace,
    rng: SimRng,
    max_events: u64,
}

impl<K> Engine<K> {
    pub fn new(seed: u64) -> Self {
        Self {
            now: 0.0,
            next_sequence: 0,
            queue: BinaryHeap::new(),
            trace: Trace::default(),
            rng: SimRng::seeded(seed),
            max_events: DEFAULT_MAX_EVENTS,
        }
    }

    pub fn with_max_events(mut self, max_events: u64) -> Self {
        self.max_events = max_events;
        self
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn rng(&mut self) -> &mut SimRng {
        &mut self.rng
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    /// Enqueues `kind` at absolute time `at` and returns its sequence number.
    pub fn schedule(&mut self, at: f64, kind: K) -> Result<u64, SimError> {
        if at.is_nan() || at < self.now {
            return Err(SimError::ScheduleInPast { at, now: self.now });
        }
        let sequence = self.next_sequence;
        self.next_sequence += 1;
        self.queue.push(Queued(Event {
            fire_time: at,
            sequence,
            kind,
        }));
        Ok(sequence)
    }

    pub fn schedule_in(&mut self, delay: f64, kind: K) -> Result<u64, SimError> {
        self.schedule(self.now + delay, kind)
    }

    pub fn record(&mut self, node: NodeId, event: impl Into<String>, bytes: f64, cost: f64) {
        self.trace.push(TraceRecord {
            time: self.now,
            node,
            event: event.into(),
            bytes,
            cost,
        });
    }

    /// Pops every event in order until the queue drains. Returns the clock
    /// at the last event together with the trace.
    pub fn run_until_idle<P>(mut self, process: &mut P) -> Result<(f64, Trace), SimError>
    where
        P: Process<Event = K>,
    {
        if self.queue.is_empty() {
            return Err(SimError::NothingScheduled);
        }
        let mut processed = 0u64;
        while let Some(Queued(event)) = self.queue.pop() {
            processed += 1;
            if processed > self.max_events {
                return Err(SimError::Runaway { limit: self.max_events });
            }
            self.now = event.fire_time;
            process.handle(event, &mut self)?;
        }
        Ok((self.now, self.trace))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Default)]
    struct Log(Vec<(f64, &'static str)>);

    impl Process for Log {
        type Event = &'static str;
        fn handle(&mut self, ev: Event<&'static str>, e: &mut Engine<&'static str>) -> Result<(), SimError> {
            self.0.push((ev.fire_time, ev.kind));
            e.record(NodeId(0), ev.kind, 1.0, 0.5);
            Ok(())
        }
    }

    #[test]
    fn pops_in_time_order() {
        let mut e = Engine::new(0);
        e.schedule(5.0, "late").unwrap();
        e.schedule(3.0, "early").unwrap();
        let mut log = Log::default();
        let (t, trace) = e.run_until_idle(&mut log).unwrap();
        assert_eq!(log.0, vec![(3.0, "early"), (5.0, "late")]);
        assert_eq!(t, 5.0);
        assert_eq!(trace.len(), 2);
    }

    #[test]
    fn ties_are_fifo() {
        let mut e = Engine::new(0);
        for k in ["a", "b", "c", "d"] {
            e.schedule(5.0, k).unwrap();
        }
        let mut log = Log::default();
        e.run_until_idle(&mut log).unwrap();
        let order: Vec<_> = log.0.iter().map(|x| x.1).collect();
        assert_eq!(order, ["a", "b", "c", "d"]);
    }

    struct PastScheduler;
    impl Process for PastScheduler {
        type Event = ();
        fn handle(&mut self, _: Event<()>, e: &mut Engine<()>) -> Result<(), SimError> {
            e.schedule(e.now() - 1.0, ())?;
            Ok(())
        }
    }

    #[test]
    fn scheduling_in_the_past_aborts() {
        let mut e = Engine::new(0);
        e.schedule(2.0, ()).unwrap();
        assert_eq!(
            e.run_until_idle(&mut PastScheduler),
            Err(SimError::ScheduleInPast { at: 1.0, now: 2.0 })
        );
        let mut e: Engine<()> = Engine::new(0);
        assert!(e.schedule(f64::NAN, ()).is_err());
    }

    #[test]
    fn single_event_sets_clock() {
        let mut e = Engine::new(0);
        e.schedule(7.25, "only").unwrap();
        let (t, _) = e.run_until_idle(&mut Log::default()).unwrap();
        assert_eq!(t, 7.25);
    }

    #[test]
    fn empty_queue_is_an_error() {
        let e: Engine<&'static str> = Engine::new(0);
        assert_eq!(e.run_until_idle(&mut Log::default()), Err(SimError::NothingScheduled));
    }

    struct Forever;
    impl Process for Forever {
        type Event = ();
        fn handle(&mut self, _: Event<()>, e: &mut Engine<()>) -> Result<(), SimError> {
            e.schedule_in(1.0, ()).map(|_| ())
        }
    }

    #[test]
    fn runaway_is_caught() {
        let mut e = Engine::new(0).with_max_events(10);
        e.schedule(0.0, ()).unwrap();
        assert_eq!(e.run_until_idle(&mut Forever), Err(SimError::Runaway { limit: 10 }));
    }

    #[test]
    fn seeded_rng_is_reproducible() {
        use rand::Rng;
        let mut a = SimRng::seeded(42);
        let mut b = SimRng::seeded(42);
        let xs: Vec<u64> = (0..8).map(|_| a.inner().random()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.inner().random()).collect();
        assert_eq!(xs, ys);
    }
}
