//! Well-formedness constraint catalog.
//!
//! | rule | constraint |
//! |------|------------|
//! | WF0 | every cross-reference resolves |
//! | WF1 | names unique per namespace |
//! | WF2 | each port and each role in at most one attachment |
//! | WF3 | data-out to data-source, data-in to data-sink, non-functional ports to context roles |
//! | WF4 | contextual connector instances have an attached context role when a component declares requirements |
//! | WF5 | non-contextual connectors have no context roles and no adaptation services; contextual ones have a context role |
//! | WF6 | CPIM instances are deployed on exactly one device; PIM configurations deploy nothing |
//! | WF7 | attachments crossing devices follow a declared link |
//! | WF8 | an active service names a service of the instance's type |
//! | WF9 | values in range; at most one control and one qos port per component |
//! | FM1 | subfamily members belong to the family |
//! | FM2 | transitions join family members and carry at least one action |
//! | FM3 | replaying a transition's actions on its source yields its target |
//! | FM4 | context states have a non-empty envelope |

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::reconfigure::Reconfigurer;
use super::types::*;
use crate::families::Family;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    WF0,
    WF1,
    WF2,
    WF3,
    WF4,
    WF5,
    WF6,
    WF7,
    WF8,
    WF9,
    FM1,
    FM2,
    FM3,
    FM4,
}

impl RuleId {
    pub const CATALOG: [RuleId; 14] = [
        RuleId::WF0,
        RuleId::WF1,
        RuleId::WF2,
        RuleId::WF3,
        RuleId::WF4,
        RuleId::WF5,
        RuleId::WF6,
        RuleId::WF7,
        RuleId::WF8,
        RuleId::WF9,
        RuleId::FM1,
        RuleId::FM2,
        RuleId::FM3,
        RuleId::FM4,
    ];
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub rule_id: RuleId,
    /// Slash-separated model path, e.g. `configuration CPIM5/instance VideoCodec`.
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: {}",
            self.severity, self.rule_id, self.location, self.message
        )
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

#[derive(Default)]
struct Sink(Vec<Diagnostic>);

impl Sink {
    fn error(&mut self, rule: RuleId, location: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic {
            severity: Severity::Error,
            rule_id: rule,
            location: location.into(),
            message: message.into(),
        });
    }

    fn warning(&mut self, rule: RuleId, location: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic {
            severity: Severity::Warning,
            rule_id: rule,
            location: location.into(),
            message: message.into(),
        });
    }

    fn unique<'a>(&mut self, names: impl IntoIterator<Item = &'a str>, location: &str, what: &str) {
        let mut seen = HashSet::new();
        let mut reported = HashSet::new();
        for n in names {
            if !seen.insert(n) && reported.insert(n) {
                self.error(RuleId::WF1, location, format!("duplicate {what} name '{n}'"));
            }
        }
    }

    fn non_negative(&mut self, value: f64, location: &str, what: &str) {
        if !(value >= 0.0) {
            self.error(RuleId::WF9, location, format!("{what} must be >= 0, got {value}"));
        }
    }

    fn percent(&mut self, value: f64, location: &str, what: &str) {
        if !(0.0..=100.0).contains(&value) {
            self.error(RuleId::WF9, location, format!("{what} must lie in [0,100], got {value}"));
        }
    }
}

/// Every violation of the catalog, model-wide. An empty list means well-formed.
pub fn validate_wellformed(model: &Model) -> Vec<Diagnostic> {
    let mut sink = Sink::default();
    check_universe(model, &mut sink);
    for config in &model.configurations {
        check_configuration(model, config, &mut sink);
    }
    for family in &model.families {
        check_family(model, family, &mut sink);
    }
    sink.0
}

/// Checks that depend only on devices, links and types.
pub fn validate_universe(model: &Model) -> Vec<Diagnostic> {
    let mut sink = Sink::default();
    check_universe(model, &mut sink);
    sink.0
}

/// Configuration-scoped rules (WF0-WF4, WF6-WF9) for a single configuration.
pub fn validate_configuration(model: &Model, config: &Configuration) -> Vec<Diagnostic> {
    let mut sink = Sink::default();
    check_configuration(model, config, &mut sink);
    sink.0
}

pub fn validate_family(model: &Model, family: &Family) -> Vec<Diagnostic> {
    let mut sink = Sink::default();
    check_family(model, family, &mut sink);
    sink.0
}

fn check_service(s: &ServiceProfile, loc: &str, sink: &mut Sink) {
    let loc = format!("{loc}/service {}", s.name);
    sink.non_negative(s.cpu_demand, &loc, "cpu demand");
    sink.non_negative(s.output_rate, &loc, "output rate");
    sink.non_negative(s.memory_demand, &loc, "memory demand");
    if let Some(r) = s.reduction {
        if !(r.output > 0.0 && r.ratio() >= 1.0) {
            sink.error(
                RuleId::WF9,
                &loc,
                format!("reduction {}:{} must be at least 1:1", r.input, r.output),
            );
        }
    }
}

fn check_universe(model: &Model, sink: &mut Sink) {
    sink.unique(model.devices.iter().map(|d| d.name.as_str()), "model", "device");
    sink.unique(model.links.iter().map(|l| l.name.as_str()), "model", "link");
    sink.unique(
        model
            .component_types
            .iter()
            .map(|c| c.name.as_str())
            .chain(model.connector_types.iter().map(|c| c.name.as_str())),
        "model",
        "type",
    );
    sink.unique(
        model.configurations.iter().map(|c| c.name.as_str()),
        "model",
        "configuration",
    );
    sink.unique(model.families.iter().map(|f| f.name.as_str()), "model", "family");

    for d in &model.devices {
        let loc = format!("device {}", d.name);
        sink.non_negative(d.cpu_capacity, &loc, "cpu capacity");
        sink.non_negative(d.memory_capacity, &loc, "memory capacity");
        sink.percent(d.battery, &loc, "battery");
    }
    for l in &model.links {
        let loc = format!("link {}", l.name);
        for end in [&l.endpoints.0, &l.endpoints.1] {
            if model.device(end).is_none() {
                sink.error(RuleId::WF0, &loc, format!("unknown device '{end}'"));
            }
        }
        if l.endpoints.0 == l.endpoints.1 {
            sink.error(RuleId::WF9, &loc, "link endpoints must be distinct");
        }
        sink.non_negative(l.bandwidth, &loc, "bandwidth");
    }
    for c in &model.component_types {
        let loc = format!("component {}", c.name);
        sink.unique(c.ports.iter().map(|p| p.name.as_str()), &loc, "port");
        sink.unique(c.services.iter().map(|s| s.name.as_str()), &loc, "service");
        for kind in [PortKind::Control, PortKind::Qos] {
            let n = c.ports.iter().filter(|p| p.kind == kind).count();
            if n > 1 {
                sink.error(RuleId::WF9, &loc, format!("{n} {kind} ports declared, at most 1 allowed"));
            }
        }
        for s in &c.services {
            check_service(s, &loc, sink);
        }
        for r in &c.context_requirements {
            sink.non_negative(r.bound, &loc, &format!("{} bound", r.resource));
        }
    }
    for c in &model.connector_types {
        let loc = format!("connector {}", c.name);
        sink.unique(c.roles.iter().map(|r| r.name.as_str()), &loc, "role");
        sink.unique(
            c.adaptation_services.iter().map(|s| s.name.as_str()),
            &loc,
            "service",
        );
        sink.unique(c.parameters.iter().map(|(k, _)| k.as_str()), &loc, "parameter");
        let context_roles = c.roles.iter().filter(|r| r.kind == RoleKind::Context).count();
        if c.contextual && context_roles == 0 {
            sink.error(RuleId::WF5, &loc, "contextual connector declares no context role");
        }
        if !c.contextual {
            if context_roles > 0 {
                sink.error(RuleId::WF5, &loc, "non-contextual connector declares a context role");
            }
            if !c.adaptation_services.is_empty() {
                sink.error(
                    RuleId::WF5,
                    &loc,
                    "non-contextual connector carries adaptation services",
                );
            }
        }
        for s in &c.adaptation_services {
            check_service(s, &loc, sink);
        }
    }
    if let Some(t) = &model.thresholds {
        for (what, v) in [
            ("coupling threshold", t.coupling_max),
            ("cohesion threshold", t.cohesion_min),
            ("complexity threshold", t.complexity_max),
        ] {
            if !(0.0..=1.0).contains(&v) {
                sink.error(RuleId::WF9, "thresholds", format!("{what} must lie in [0,1], got {v}"));
            }
        }
    }
}

fn check_configuration(model: &Model, config: &Configuration, sink: &mut Sink) {
    let cloc = format!("configuration {}", config.name);
    sink.unique(config.instances.iter().map(|i| i.name.as_str()), &cloc, "instance");
    sink.unique(config.buffers.iter().map(|b| b.name.as_str()), &cloc, "buffer");

    for inst in &config.instances {
        let loc = format!("{cloc}/instance {}", inst.name);
        match model.type_of(inst) {
            None => sink.error(RuleId::WF0, &loc, format!("unknown type '{}'", inst.type_ref)),
            Some(ty) => {
                if let Some(s) = &inst.active_service {
                    if ty.service(s).is_none() {
                        sink.error(
                            RuleId::WF8,
                            &loc,
                            format!("type '{}' has no service '{s}'", ty.name()),
                        );
                    }
                } else if !ty.services().is_empty() {
                    sink.warning(RuleId::WF8, &loc, "no active service selected");
                }
            }
        }
    }

    // WF0 / WF2 / WF3 on attachments.
    let mut ports_used: HashMap<(&str, &str), usize> = HashMap::new();
    let mut roles_used: HashMap<(&str, &str), usize> = HashMap::new();
    for a in &config.attachments {
        let loc = format!("{cloc}/attach {a}");
        let port = match config.instance(&a.component) {
            None => {
                sink.error(RuleId::WF0, &loc, format!("unknown instance '{}'", a.component));
                None
            }
            Some(i) => match model.component_type(&i.type_ref) {
                None => {
                    sink.error(RuleId::WF0, &loc, format!("'{}' is not a component", a.component));
                    None
                }
                Some(t) => {
                    let p = t.port(&a.port);
                    if p.is_none() {
                        sink.error(
                            RuleId::WF0,
                            &loc,
                            format!("component type '{}' has no port '{}'", t.name, a.port),
                        );
                    }
                    p
                }
            },
        };
        let role = match config.instance(&a.connector) {
            None => {
                sink.error(RuleId::WF0, &loc, format!("unknown instance '{}'", a.connector));
                None
            }
            Some(i) => match model.connector_type(&i.type_ref) {
                None => {
                    sink.error(RuleId::WF0, &loc, format!("'{}' is not a connector", a.connector));
                    None
                }
                Some(t) => {
                    let r = t.role(&a.role);
                    if r.is_none() {
                        sink.error(
                            RuleId::WF0,
                            &loc,
                            format!("connector type '{}' has no role '{}'", t.name, a.role),
                        );
                    }
                    r
                }
            },
        };
        if let (Some(p), Some(r)) = (port, role) {
            if !p.kind.compatible_with(r.kind) {
                sink.error(
                    RuleId::WF3,
                    &loc,
                    format!("{} port '{}' cannot attach to {} role '{}'", p.kind, p.name, r.kind, r.name),
                );
            }
        }
        *ports_used.entry((&a.component, &a.port)).or_default() += 1;
        *roles_used.entry((&a.connector, &a.role)).or_default() += 1;
    }
    let mut reported = HashSet::new();
    for a in &config.attachments {
        if ports_used[&(a.component.as_str(), a.port.as_str())] > 1
            && reported.insert(("port", a.component.as_str(), a.port.as_str()))
        {
            sink.error(
                RuleId::WF2,
                format!("{cloc}/instance {}", a.component),
                format!("port '{}' appears in more than one attachment", a.port),
            );
        }
        if roles_used[&(a.connector.as_str(), a.role.as_str())] > 1
            && reported.insert(("role", a.connector.as_str(), a.role.as_str()))
        {
            sink.error(
                RuleId::WF2,
                format!("{cloc}/instance {}", a.connector),
                format!("role '{}' appears in more than one attachment", a.role),
            );
        }
    }

    // WF4
    let requirements_declared = config.instances.iter().any(|i| {
        model
            .component_type(&i.type_ref)
            .is_some_and(|t| !t.context_requirements.is_empty())
    });
    if requirements_declared {
        for inst in &config.instances {
            let Some(ty) = model.connector_type(&inst.type_ref) else {
                continue;
            };
            if !ty.contextual {
                continue;
            }
            let attached = config.attachments.iter().any(|a| {
                a.connector == inst.name
                    && ty.role(&a.role).is_some_and(|r| r.kind == RoleKind::Context)
            });
            if !attached {
                sink.error(
                    RuleId::WF4,
                    format!("{cloc}/instance {}", inst.name),
                    "contextual connector has no attached context role",
                );
            }
        }
    }

    // WF6
    for d in &config.deployments {
        let loc = format!("{cloc}/deploy {}", d.instance);
        if config.instance(&d.instance).is_none() {
            sink.error(RuleId::WF0, &loc, format!("unknown instance '{}'", d.instance));
        }
        if model.device(&d.device).is_none() {
            sink.error(RuleId::WF0, &loc, format!("unknown device '{}'", d.device));
        }
    }
    match config.level {
        Level::Pim => {
            if !config.deployments.is_empty() {
                sink.error(RuleId::WF6, &cloc, "PIM configuration must not deploy instances");
            }
        }
        Level::Cpim => {
            for inst in &config.instances {
                let n = config
                    .deployments
                    .iter()
                    .filter(|d| d.instance == inst.name)
                    .count();
                if n != 1 {
                    sink.error(
                        RuleId::WF6,
                        format!("{cloc}/instance {}", inst.name),
                        format!("deployed on {n} devices, expected exactly 1"),
                    );
                }
            }
        }
    }

    // WF7
    for a in &config.attachments {
        if let (Some(dc), Some(dk)) = (config.device_of(&a.component), config.device_of(&a.connector)) {
            if dc != dk && model.link_between(dc, dk).is_none() {
                sink.error(
                    RuleId::WF7,
                    format!("{cloc}/attach {a}"),
                    format!("no link joins '{dc}' and '{dk}'"),
                );
            }
        }
    }

    for b in &config.buffers {
        let loc = format!("{cloc}/buffer {}", b.name);
        match config.instance(&b.owner) {
            None => sink.error(RuleId::WF0, &loc, format!("unknown instance '{}'", b.owner)),
            Some(i) if model.connector_type(&i.type_ref).is_none() => {
                sink.error(RuleId::WF0, &loc, format!("owner '{}' is not a connector", b.owner))
            }
            Some(_) => {}
        }
        if !(b.capacity > 0.0) {
            sink.error(RuleId::WF9, &loc, format!("capacity must be > 0, got {}", b.capacity));
        }
        sink.percent(b.initial_fill, &loc, "fill");
        if let Some(r) = b.drain_rate {
            sink.non_negative(r, &loc, "drain rate");
        }
    }
    for (inst, w) in &config.weights {
        let loc = format!("{cloc}/weight {inst}");
        if config.instance(inst).is_none() {
            sink.error(RuleId::WF0, &loc, format!("unknown instance '{inst}'"));
        }
        if !(*w > 0.0) {
            sink.error(RuleId::WF9, &loc, format!("weight must be > 0, got {w}"));
        }
    }
}

fn check_family(model: &Model, family: &Family, sink: &mut Sink) {
    let floc = format!("family {}", family.name);
    sink.unique(family.members.iter().map(|m| m.as_str()), &floc, "member");
    sink.unique(family.subfamilies.iter().map(|s| s.name.as_str()), &floc, "subfamily");
    sink.unique(family.context_states.iter().map(|s| s.name.as_str()), &floc, "state");
    for m in &family.members {
        if model.configuration(m).is_none() {
            sink.error(RuleId::WF0, &floc, format!("unknown configuration '{m}'"));
        }
    }
    for sub in &family.subfamilies {
        for m in &sub.members {
            if !family.contains(m) {
                sink.error(
                    RuleId::FM1,
                    format!("{floc}/subfamily {}", sub.name),
                    format!("'{m}' is not a member of the family"),
                );
            }
        }
    }
    for s in &family.context_states {
        if s.envelope.is_empty() {
            sink.error(RuleId::FM4, format!("{floc}/state {}", s.name), "empty envelope");
        }
    }
    let reconf = Reconfigurer::new(model, Some(family));
    for t in &family.transitions {
        let loc = format!("{floc}/transition {} -> {}", t.from, t.to);
        let mut endpoints_ok = true;
        for end in [&t.from, &t.to] {
            if !family.contains(end) {
                endpoints_ok = false;
                sink.error(RuleId::FM2, &loc, format!("'{end}' is not a member of the family"));
            }
        }
        if t.actions.is_empty() {
            sink.error(RuleId::FM2, &loc, "transition carries no action");
            continue;
        }
        let (Some(from), Some(to)) = (model.configuration(&t.from), model.configuration(&t.to)) else {
            continue;
        };
        if !endpoints_ok {
            continue;
        }
        match reconf.apply_all(from, &t.actions) {
            Ok(result) if result.same_structure(to) => {}
            Ok(_) => sink.error(
                RuleId::FM3,
                &loc,
                format!("replaying the actions on '{}' does not yield '{}'", t.from, t.to),
            ),
            Err(e) => sink.error(RuleId::FM3, &loc, format!("actions do not replay: {e}")),
        }
    }
}
