//! Discrete-event simulation of the runtime adaptation loop.
//!
//! Scripted or Poisson-generated context events and buffer watermark probes
//! drive a quality manager ([`qm_search`]) that looks for a better family
//! member, and an adaptation manager ([`am_execute`]) that applies the chosen
//! actions atomically. Runs are deterministic: the same inputs always give the
//! same [`ReconfigurationLog`].

mod log;
mod poisson;
mod sim;

pub use log::{LogEntry, ReconfigurationLog, Stage};
pub use poisson::{gen_poisson_trace, PoissonRow, SplitMix64};
pub use sim::{
    am_execute, instance_diff, probe_step, qm_search, run, SearchResult, SimError, SimState,
    OVERFLOW_ABOVE, UNDERFLOW_BELOW,
};

#[cfg(test)]
mod tests;
