//! Resource context, data flows and feasibility.
//!
//! A configuration is feasible under a set of resource levels when every
//! instance's declared requirements hold at its device, no device is asked for
//! more CPU or memory than it offers, and no link carries more traffic than
//! its available bandwidth. Levels come either from a [`ContextSnapshot`]
//! (runtime values) or from a family [`ContextState`] envelope.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::families::ContextState;
use crate::model::{Configuration, ContextRequirement, Model, PortKind, Relation, Resource, RoleKind};

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceContext {
    pub cpu_available: f64,
    pub memory_available: f64,
    pub battery: f64,
}

/// Current resource and environment values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContextSnapshot {
    pub devices: BTreeMap<String, DeviceContext>,
    /// Available kbps per link.
    pub links: BTreeMap<String, f64>,
    /// Fill percent per buffer.
    pub buffers: BTreeMap<String, f64>,
    /// `(instance, device)` pairs reported faulty.
    pub faults: BTreeSet<(String, String)>,
}

impl ContextSnapshot {
    /// Every device and link at its declared capacity.
    pub fn nominal(model: &Model) -> Self {
        let devices = model
            .devices
            .iter()
            .map(|d| {
                (
                    d.name.clone(),
                    DeviceContext {
                        cpu_available: d.cpu_capacity,
                        memory_available: d.memory_capacity,
                        battery: d.battery,
                    },
                )
            })
            .collect();
        let links = model
            .links
            .iter()
            .map(|l| (l.name.clone(), l.bandwidth))
            .collect();
        Self {
            devices,
            links,
            ..Default::default()
        }
    }

    pub fn cpu_available(&self, device: &str) -> Option<f64> {
        self.devices.get(device).map(|d| d.cpu_available)
    }

    pub fn bandwidth_available(&self, link: &str) -> Option<f64> {
        self.links.get(link).copied()
    }
}

/// Source of resource levels for feasibility checks.
pub trait ResourceLevels {
    /// `cpu`, `memory` or `battery` level at `device`; undeployed
    /// instances pass `None`.
    fn device_level(&self, device: Option<&str>, resource: Resource) -> f64;

    fn link_bandwidth(&self, link: &str) -> f64;

    fn is_faulted(&self, _instance: &str, _device: &str) -> bool {
        false
    }
}

/// Snapshot values, falling back to the model's declared capacities.
#[derive(Debug, Clone, Copy)]
pub struct SnapshotLevels<'a> {
    pub model: &'a Model,
    pub snapshot: &'a ContextSnapshot,
}

impl<'a> SnapshotLevels<'a> {
    pub fn new(model: &'a Model, snapshot: &'a ContextSnapshot) -> Self {
        Self { model, snapshot }
    }
}

fn nominal_device_level(model: &Model, device: Option<&str>, resource: Resource) -> f64 {
    let Some(d) = device.and_then(|d| model.device(d)) else {
        return f64::INFINITY;
    };
    match resource {
        Resource::Cpu => d.cpu_capacity,
        Resource::Memory => d.memory_capacity,
        Resource::Battery => d.battery,
        Resource::Bandwidth => f64::INFINITY,
    }
}

impl ResourceLevels for SnapshotLevels<'_> {
    fn device_level(&self, device: Option<&str>, resource: Resource) -> f64 {
        if let Some(ctx) = device.and_then(|d| self.snapshot.devices.get(d)) {
            match resource {
                Resource::Cpu => return ctx.cpu_available,
                Resource::Memory => return ctx.memory_available,
                Resource::Battery => return ctx.battery,
                Resource::Bandwidth => {}
            }
        }
        nominal_device_level(self.model, device, resource)
    }

    fn link_bandwidth(&self, link: &str) -> f64 {
        self.snapshot
            .bandwidth_available(link)
            .or_else(|| self.model.link(link).map(|l| l.bandwidth))
            .unwrap_or(0.0)
    }

    fn is_faulted(&self, instance: &str, device: &str) -> bool {
        self.snapshot
            .faults
            .contains(&(instance.to_string(), device.to_string()))
    }
}

/// Guaranteed levels inside a context-state envelope.
///
/// A `>=` bound is the guaranteed level. Without one, a `<=` bound caps the
/// declared capacity. Unbounded resources stay at their declared capacity.
/// The envelope applies uniformly to every device and link.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeLevels<'a> {
    pub model: &'a Model,
    pub state: &'a ContextState,
}

impl<'a> EnvelopeLevels<'a> {
    pub fn new(model: &'a Model, state: &'a ContextState) -> Self {
        Self { model, state }
    }

    fn level(&self, resource: Resource, nominal: f64) -> f64 {
        let bounds = self.state.envelope.iter().filter(|r| r.resource == resource);
        let mut lower: Option<f64> = None;
        let mut upper: Option<f64> = None;
        for r in bounds {
            match r.relation {
                Relation::AtLeast => lower = Some(lower.map_or(r.bound, |l: f64| l.max(r.bound))),
                Relation::AtMost => upper = Some(upper.map_or(r.bound, |u: f64| u.min(r.bound))),
            }
        }
        match (lower, upper) {
            (Some(l), _) => l,
            (None, Some(u)) => nominal.min(u),
            (None, None) => nominal,
        }
    }
}

impl ResourceLevels for EnvelopeLevels<'_> {
    fn device_level(&self, device: Option<&str>, resource: Resource) -> f64 {
        self.level(resource, nominal_device_level(self.model, device, resource))
    }

    fn link_bandwidth(&self, link: &str) -> f64 {
        let nominal = self.model.link(link).map_or(0.0, |l| l.bandwidth);
        self.level(Resource::Bandwidth, nominal)
    }
}

/// One directed data hop over an attachment.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow<'c> {
    pub producer: &'c str,
    pub consumer: &'c str,
    /// kbps emitted by the producer.
    pub rate: f64,
    /// Devices at both ends differ.
    pub crosses: bool,
    /// Link carrying the hop, when it crosses devices and one is declared.
    pub link: Option<&'c str>,
}

/// kbps an instance emits: its active service's output rate.
pub fn emission(model: &Model, config: &Configuration, instance: &str) -> f64 {
    config
        .instance(instance)
        .and_then(|i| model.active_service(i))
        .map_or(0.0, |s| s.output_rate)
}

/// Data hops of a configuration, in attachment order.
///
/// A data-out port feeds the connector (component produces); a data-in port
/// is fed by the connector (connector produces). Context attachments carry no
/// data.
pub fn flows<'c>(model: &'c Model, config: &'c Configuration) -> Vec<Flow<'c>> {
    let mut out = Vec::new();
    for a in &config.attachments {
        let Some(port_kind) = config
            .instance(&a.component)
            .and_then(|i| model.component_type(&i.type_ref))
            .and_then(|t| t.port(&a.port))
            .map(|p| p.kind)
        else {
            continue;
        };
        let role_kind = config
            .instance(&a.connector)
            .and_then(|i| model.connector_type(&i.type_ref))
            .and_then(|t| t.role(&a.role))
            .map(|r| r.kind);
        let (producer, consumer) = match (port_kind, role_kind) {
            (PortKind::DataOut, Some(RoleKind::DataSource)) => (&a.component, &a.connector),
            (PortKind::DataIn, Some(RoleKind::DataSink)) => (&a.connector, &a.component),
            _ => continue,
        };
        let (pd, cd) = (config.device_of(producer), config.device_of(consumer));
        let crosses = matches!((pd, cd), (Some(p), Some(c)) if p != c);
        let link = match (pd, cd) {
            (Some(p), Some(c)) if crosses => model.link_between(p, c).map(|l| l.name.as_str()),
            _ => None,
        };
        out.push(Flow {
            producer,
            consumer,
            rate: emission(model, config, producer),
            crosses,
            link,
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Requirement {
        instance: String,
        requirement: ContextRequirement,
        level: f64,
    },
    DeviceCpu {
        device: String,
        demand: f64,
        available: f64,
    },
    DeviceMemory {
        device: String,
        demand: f64,
        available: f64,
    },
    LinkBandwidth {
        link: String,
        load: f64,
        available: f64,
    },
    MissingLink {
        from: String,
        to: String,
    },
    Faulted {
        instance: String,
        device: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Requirement {
                instance,
                requirement,
                level,
            } => write!(f, "{instance} requires {requirement} but has {level}"),
            Violation::DeviceCpu {
                device,
                demand,
                available,
            } => write!(f, "{device} cpu demand {demand} exceeds {available} MIPS"),
            Violation::DeviceMemory {
                device,
                demand,
                available,
            } => write!(f, "{device} memory demand {demand} exceeds {available} MB"),
            Violation::LinkBandwidth {
                link,
                load,
                available,
            } => write!(f, "{link} load {load} exceeds {available} kbps"),
            Violation::MissingLink { from, to } => write!(f, "no link between {from} and {to}"),
            Violation::Faulted { instance, device } => write!(f, "{instance} faulty on {device}"),
        }
    }
}

/// Every broken constraint, in a stable order.
pub fn violations(
    model: &Model,
    config: &Configuration,
    levels: &dyn ResourceLevels,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let flows = flows(model, config);

    for inst in &config.instances {
        let device = config.device_of(&inst.name);
        if let Some(d) = device {
            if levels.is_faulted(&inst.name, d) {
                out.push(Violation::Faulted {
                    instance: inst.name.clone(),
                    device: d.to_string(),
                });
            }
        }
        let Some(ty) = model.type_of(inst) else {
            continue;
        };
        for req in ty.requirements() {
            let level = match req.resource {
                Resource::Bandwidth => flows
                    .iter()
                    .filter(|f| f.producer == inst.name || f.consumer == inst.name)
                    .filter_map(|f| f.link)
                    .map(|l| levels.link_bandwidth(l))
                    .fold(f64::INFINITY, f64::min),
                r => levels.device_level(device, r),
            };
            if !req.relation.holds(level, req.bound) {
                out.push(Violation::Requirement {
                    instance: inst.name.clone(),
                    requirement: req.clone(),
                    level,
                });
            }
        }
    }

    let mut cpu: BTreeMap<&str, f64> = BTreeMap::new();
    let mut mem: BTreeMap<&str, f64> = BTreeMap::new();
    for inst in &config.instances {
        let (Some(d), Some(s)) = (config.device_of(&inst.name), model.active_service(inst)) else {
            continue;
        };
        *cpu.entry(d).or_default() += s.cpu_demand;
        *mem.entry(d).or_default() += s.memory_demand;
    }
    for (d, demand) in cpu {
        let available = levels.device_level(Some(d), Resource::Cpu);
        if demand > available {
            out.push(Violation::DeviceCpu {
                device: d.to_string(),
                demand,
                available,
            });
        }
    }
    for (d, demand) in mem {
        let available = levels.device_level(Some(d), Resource::Memory);
        if demand > available {
            out.push(Violation::DeviceMemory {
                device: d.to_string(),
                demand,
                available,
            });
        }
    }

    let mut load: BTreeMap<&str, f64> = BTreeMap::new();
    for f in &flows {
        match f.link {
            Some(l) => *load.entry(l).or_default() += f.rate,
            None if f.crosses => out.push(Violation::MissingLink {
                from: config.device_of(f.producer).unwrap_or_default().to_string(),
                to: config.device_of(f.consumer).unwrap_or_default().to_string(),
            }),
            None => {}
        }
    }
    for (link, load) in load {
        let available = levels.link_bandwidth(link);
        if load > available {
            out.push(Violation::LinkBandwidth {
                link: link.to_string(),
                load,
                available,
            });
        }
    }
    out
}

pub fn is_feasible(model: &Model, config: &Configuration, levels: &dyn ResourceLevels) -> bool {
    violations(model, config, levels).is_empty()
}
