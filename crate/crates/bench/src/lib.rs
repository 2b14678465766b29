//! Fixtures shared by the benchmarks.

use ctxarch_core::adl::{parse_model, parse_trace, Trace};
use ctxarch_core::model::Model;

pub const CORPUS: &str = include_str!("../../core/corpus/videoconference.adl");
pub const SCENARIO2: &str = include_str!("../../core/corpus/scenario2.trace");

pub const CANDIDATES: [&str; 5] = ["CPIM1", "CPIM2", "CPIM3", "CPIM4", "CPIM5"];

pub fn corpus() -> Model {
    parse_model(CORPUS).expect("bundled corpus parses")
}

pub fn scenario2() -> Trace {
    parse_trace(SCENARIO2).expect("bundled trace parses")
}
