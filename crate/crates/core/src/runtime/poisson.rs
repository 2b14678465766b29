use crate::adl::{EventKind, EventValue, Trace, TraceEvent};

/// SplitMix64 generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut x = self.state;
        x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        x ^ (x >> 31)
    }

    /// Uniform in `[0, 1]`.
    pub fn next_f64(&mut self) -> f64 {
        self.next_u64() as f64 / 18_446_744_073_709_551_616.0
    }
}

/// One row of the event table: events of `kind` on `target` with values
/// drawn uniformly from `[low, high]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonRow {
    pub kind: EventKind,
    pub target: String,
    pub low: f64,
    pub high: f64,
}

impl PoissonRow {
    pub fn new(kind: EventKind, target: impl Into<String>, low: f64, high: f64) -> Self {
        Self {
            kind,
            target: target.into(),
            low,
            high,
        }
    }
}

/// Events with exponential gaps of mean `1000 / rate` ms, up to but not
/// including `horizon`. Each event picks a row uniformly, then a value.
pub fn gen_poisson_trace(rate: f64, horizon: u64, seed: u64, rows: &[PoissonRow]) -> Trace {
    let mut events = Vec::new();
    if rate <= 0.0 || rows.is_empty() {
        return Trace::new(events);
    }
    let mut rng = SplitMix64::new(seed);
    let mean_gap = 1000.0 / rate;
    let mut t = 0.0;
    loop {
        // 1 - u lies in [0, 1]; clamp away from zero so the gap stays finite.
        let u = (1.0 - rng.next_f64()).max(f64::MIN_POSITIVE);
        t += -u.ln() * mean_gap;
        if t >= horizon as f64 {
            break;
        }
        let idx = ((rng.next_f64() * rows.len() as f64) as usize).min(rows.len() - 1);
        let row = &rows[idx];
        let draw = rng.next_f64();
        let value = match row.kind {
            EventKind::Fault => EventValue::Empty,
            _ => EventValue::Number(row.low + draw * (row.high - row.low)),
        };
        events.push(TraceEvent::new(t as u64, row.kind, row.target.clone(), value));
    }
    Trace::new(events)
}
