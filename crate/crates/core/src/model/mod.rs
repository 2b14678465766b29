//! In-memory architecture metamodel: types, the well-formedness catalog and
//! pure reconfiguration.

mod reconfigure;
mod types;
mod validate;

pub use reconfigure::{apply_action, subfamily_fragment, ActionError, Reconfigurer};
pub use types::*;
pub use validate::{
    has_errors, validate_configuration, validate_family, validate_universe, validate_wellformed,
    Diagnostic, RuleId, Severity,
};

#[cfg(test)]
mod tests;
