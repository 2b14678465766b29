//! Quality evaluation, selection and runtime reconfiguration of
//! context-aware component/connector architectures.
//!
//! A [`Model`](model::Model) is parsed from the textual ADL
//! ([`adl::parse_model`]), checked against the well-formedness catalog
//! ([`model::validate_wellformed`]), scored with the structural and time
//! metrics ([`metrics`]), ranked ([`selection`]) and finally driven through
//! context changes by the simulator in [`runtime`].

pub mod adl;
pub mod families;
pub mod metrics;
pub mod model;
pub mod resources;
pub mod selection;
pub mod runtime;
