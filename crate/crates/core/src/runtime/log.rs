use std::fmt;

use crate::adl::TraceEvent;
use crate::families::ReconfigurationAction;
use crate::model::Configuration;

/// How far the quality manager went for an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    None,
    SingleDiff,
    Subfamily,
    Family,
    Move,
    Failed,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::None => "none",
            Stage::SingleDiff => "single-diff",
            Stage::Subfamily => "subfamily",
            Stage::Family => "family",
            Stage::Move => "move",
            Stage::Failed => "failed",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    pub time: u64,
    pub event: TraceEvent,
    pub stage: Stage,
    pub actions: Vec<ReconfigurationAction>,
    pub config_after: String,
    /// Quality of the active configuration after the event, when computable.
    pub quality_after: Option<f64>,
    /// Candidates examined by the search.
    pub candidates_searched: usize,
    /// Active configuration after the event.
    pub config: Configuration,
}

impl LogEntry {
    /// An executed, non-empty reconfiguration.
    pub fn is_reconfiguration(&self) -> bool {
        !matches!(self.stage, Stage::None | Stage::Failed) && !self.actions.is_empty()
    }
}

impl fmt::Display for LogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let actions: Vec<String> = self.actions.iter().map(ToString::to_string).collect();
        write!(
            f,
            "t={} event={}:{}:{} stage={} actions=[{}] config={} quality=",
            self.time,
            self.event.kind,
            self.event.target,
            self.event.value,
            self.stage,
            actions.join(","),
            self.config_after
        )?;
        match self.quality_after {
            Some(q) => write!(f, "{q:.3}"),
            None => f.write_str("-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReconfigurationLog {
    pub seed: u64,
    pub entries: Vec<LogEntry>,
}

impl ReconfigurationLog {
    pub fn reconfigurations(&self) -> impl Iterator<Item = &LogEntry> {
        self.entries.iter().filter(|e| e.is_reconfiguration())
    }

    /// A `# seed=` header, then one line per entry in time order.
    pub fn serialize(&self) -> String {
        let mut out = format!("# seed={}\n", self.seed);
        for e in &self.entries {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }
}
