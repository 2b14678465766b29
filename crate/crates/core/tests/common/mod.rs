//! Random model generators and brute-force oracles shared by the integration
//! tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ctxarch_core::adl::parse_model;
use ctxarch_core::families::{ContextState, Family, ReconfigurationAction, Signal, Subfamily, Transition, Trigger};
use ctxarch_core::metrics::{ContextSnapshot, Thresholds};
use ctxarch_core::model::*;
use ctxarch_core::resources::{is_feasible, EnvelopeLevels};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const CORPUS: &str = include_str!("../../corpus/videoconference.adl");
pub const NOMINAL_CTX: &str = include_str!("../../corpus/nominal.ctx");
pub const SCENARIO1: &str = include_str!("../../corpus/scenario1.trace");
pub const SCENARIO2: &str = include_str!("../../corpus/scenario2.trace");
pub const SCENARIO3: &str = include_str!("../../corpus/scenario3.trace");

pub fn corpus() -> Model {
    parse_model(CORPUS).expect("bundled corpus parses")
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A number with at most two decimals, so it prints and parses exactly.
fn num(rng: &mut StdRng, lo: u32, hi: u32) -> f64 {
    rng.random_range(lo * 4..=hi * 4) as f64 / 4.0
}

fn pick<'a, T>(rng: &mut StdRng, items: &'a [T]) -> &'a T {
    &items[rng.random_range(0..items.len())]
}

fn quality_level(rng: &mut StdRng) -> QualityLevel {
    *pick(
        rng,
        &[QualityLevel::High, QualityLevel::Medium, QualityLevel::Low, QualityLevel::NotApplicable],
    )
}

fn service(rng: &mut StdRng, name: String) -> ServiceProfile {
    let mut s = ServiceProfile::new(name, num(rng, 1, 500));
    if rng.random_bool(0.7) {
        s.output_rate = num(rng, 1, 200);
    }
    if rng.random_bool(0.2) {
        s.reduction = Some(Reduction {
            input: rng.random_range(2..20) as f64,
            output: 1.0,
        });
    }
    s.quality = quality_level(rng);
    if rng.random_bool(0.5) {
        s.memory_demand = num(rng, 1, 32);
    }
    s
}

fn requirement(rng: &mut StdRng, resource: Resource) -> ContextRequirement {
    ContextRequirement {
        resource,
        relation: if rng.random_bool(0.8) { Relation::AtLeast } else { Relation::AtMost },
        bound: num(rng, 1, 200),
    }
}

/// Devices on a fully linked network, component types with data and
/// non-functional ports, a plain pipe and a contextual pipe.
pub fn universe(rng: &mut StdRng, with_requirements: bool) -> Model {
    let mut m = Model::new(format!("Gen{}", rng.random_range(0..1000)));
    let devices = rng.random_range(1..=4);
    for i in 0..devices {
        m.devices.push(Device {
            name: format!("Dev{i}"),
            cpu_capacity: num(rng, 200, 4000),
            memory_capacity: num(rng, 64, 1024),
            battery: rng.random_range(10..=100) as f64,
        });
    }
    for i in 0..devices {
        for j in i + 1..devices {
            m.links.push(NetworkLink {
                name: format!("Lnk{i}x{j}"),
                endpoints: (format!("Dev{i}"), format!("Dev{j}")),
                bandwidth: num(rng, 8, 256),
            });
        }
    }
    for k in 0..rng.random_range(2..=5) {
        let mut ports = Vec::new();
        for p in 0..rng.random_range(0..=2) {
            ports.push(PortDecl { name: format!("i{p}"), kind: PortKind::DataIn });
        }
        for p in 0..rng.random_range(0..=2) {
            ports.push(PortDecl { name: format!("o{p}"), kind: PortKind::DataOut });
        }
        for (name, kind) in [("cx", PortKind::Context), ("ctl", PortKind::Control), ("qs", PortKind::Qos)] {
            if rng.random_bool(0.3) {
                ports.push(PortDecl { name: name.into(), kind });
            }
        }
        let services = (0..rng.random_range(1..=3))
            .map(|s| service(rng, format!("S{k}v{s}")))
            .collect();
        let mut reqs = Vec::new();
        if with_requirements && rng.random_bool(0.3) {
            reqs.push(requirement(rng, Resource::Cpu));
            if rng.random_bool(0.5) {
                reqs.push(requirement(rng, Resource::Bandwidth));
            }
        }
        m.component_types.push(ComponentType {
            name: format!("CT{k}"),
            ports,
            services,
            context_requirements: reqs,
        });
    }
    let data_roles = || {
        vec![
            RoleDecl { name: "src".into(), kind: RoleKind::DataSource },
            RoleDecl { name: "snk".into(), kind: RoleKind::DataSink },
        ]
    };
    m.connector_types.push(ConnectorType {
        name: "Pipe".into(),
        contextual: false,
        roles: data_roles(),
        adaptation_services: Vec::new(),
        parameters: Vec::new(),
    });
    let mut cx_roles = data_roles();
    cx_roles.push(RoleDecl { name: "ctx".into(), kind: RoleKind::Context });
    let adapt = (0..rng.random_range(1..=3)).map(|s| service(rng, format!("Adapt{s}"))).collect();
    m.connector_types.push(ConnectorType {
        name: "CxPipe".into(),
        contextual: true,
        roles: cx_roles,
        adaptation_services: adapt,
        parameters: vec![("codec".into(), "h263".into())],
    });
    m
}

fn free_port(config: &Configuration, ty: &ComponentType, inst: &str, kind: PortKind) -> Option<String> {
    ty.ports
        .iter()
        .filter(|p| p.kind == kind)
        .find(|p| !config.attachments.iter().any(|a| a.component == inst && a.port == p.name))
        .map(|p| p.name.clone())
}

/// A well-formed, fully deployed configuration of at most `max_artifacts`
/// instances over `model`'s universe.
pub fn random_config(rng: &mut StdRng, model: &Model, name: &str, max_artifacts: usize) -> Configuration {
    let mut c = Configuration::new(name, Level::Cpim);
    let devices: Vec<String> = model.devices.iter().map(|d| d.name.clone()).collect();
    let comps = rng.random_range(1..=(max_artifacts / 2).max(1));
    for i in 0..comps {
        let ty = pick(rng, &model.component_types);
        let s = pick(rng, &ty.services).name.clone();
        let inst = ArtifactInstance::new(format!("C{i}"), ty.name.clone()).with_service(s);
        c.deployments.push(Deployment { instance: inst.name.clone(), device: pick(rng, &devices).clone() });
        c.instances.push(inst);
    }
    let mut next = 0;
    let mut tries = 0;
    while c.instances.len() < max_artifacts && tries < 3 * max_artifacts {
        tries += 1;
        let a = c.instances[rng.random_range(0..comps)].clone();
        let b = c.instances[rng.random_range(0..comps)].clone();
        let ta = model.component_type(&a.type_ref).unwrap();
        let tb = model.component_type(&b.type_ref).unwrap();
        let Some(out) = free_port(&c, ta, &a.name, PortKind::DataOut) else {
            continue;
        };
        let input = if a.name != b.name { free_port(&c, tb, &b.name, PortKind::DataIn) } else { None };
        let pipe_ty = *pick(rng, &["Pipe", "CxPipe"]);
        let pipe_name = format!("P{next}");
        next += 1;
        let mut pipe = ArtifactInstance::new(pipe_name.clone(), pipe_ty);
        if pipe_ty == "CxPipe" {
            let ct = model.connector_type("CxPipe").unwrap();
            pipe.active_service = Some(pick(rng, &ct.adaptation_services).name.clone());
        }
        c.instances.push(pipe);
        c.deployments.push(Deployment { instance: pipe_name.clone(), device: pick(rng, &devices).clone() });
        c.attachments.push(Attachment::new(&a.name, &out, &pipe_name, "src"));
        if let Some(input) = input {
            c.attachments.push(Attachment::new(&b.name, &input, &pipe_name, "snk"));
        }
        if pipe_ty == "CxPipe" {
            let ctx_port = [PortKind::Context, PortKind::Control, PortKind::Qos]
                .into_iter()
                .find_map(|k| free_port(&c, ta, &a.name, k));
            if let Some(p) = ctx_port {
                c.attachments.push(Attachment::new(&a.name, &p, &pipe_name, "ctx"));
            }
        }
    }
    for inst in &c.instances {
        if rng.random_bool(0.5) {
            c.weights.push((inst.name.clone(), rng.random_range(1..=40) as f64 / 20.0));
        }
    }
    c
}

/// Time behaviour summed straight from the definitions: compute time on the
/// host device plus transfer time over the slowest outbound cross-device hop,
/// weighted per instance.
pub fn tbm_oracle(model: &Model, config: &Configuration, ctx: &ContextSnapshot) -> f64 {
    let mut total = 0.0;
    for inst in &config.instances {
        let services: &[ServiceProfile] = if let Some(t) = model.component_types.iter().find(|t| t.name == inst.type_ref) {
            &t.services
        } else if let Some(t) = model.connector_types.iter().find(|t| t.name == inst.type_ref) {
            &t.adaptation_services
        } else {
            &[]
        };
        let Some(service) = inst
            .active_service
            .as_ref()
            .and_then(|s| services.iter().find(|p| &p.name == s))
        else {
            continue;
        };
        let host = &config.deployments.iter().find(|d| d.instance == inst.name).unwrap().device;
        let mut tb = 0.0;
        if service.cpu_demand > 0.0 {
            tb += 1000.0 * service.cpu_demand / ctx.devices[host].cpu_available;
        }
        let port_kind = |comp: &str, port: &str| {
            let ty = &config.instances.iter().find(|i| i.name == comp).unwrap().type_ref;
            model
                .component_types
                .iter()
                .find(|t| &t.name == ty)
                .and_then(|t| t.ports.iter().find(|p| p.name == port))
                .map(|p| p.kind)
        };
        let role_kind = |conn: &str, role: &str| {
            let ty = &config.instances.iter().find(|i| i.name == conn).unwrap().type_ref;
            model
                .connector_types
                .iter()
                .find(|t| &t.name == ty)
                .and_then(|t| t.roles.iter().find(|r| r.name == role))
                .map(|r| r.kind)
        };
        let mut slowest = f64::INFINITY;
        for a in &config.attachments {
            let pk = port_kind(&a.component, &a.port);
            let rk = role_kind(&a.connector, &a.role);
            let peer = if a.component == inst.name && pk == Some(PortKind::DataOut) && rk == Some(RoleKind::DataSource) {
                &a.connector
            } else if a.connector == inst.name && pk == Some(PortKind::DataIn) && rk == Some(RoleKind::DataSink) {
                &a.component
            } else {
                continue;
            };
            let peer_host = &config.deployments.iter().find(|d| &d.instance == peer).unwrap().device;
            if peer_host == host {
                continue;
            }
            let link = model
                .links
                .iter()
                .find(|l| {
                    (&l.endpoints.0 == host && &l.endpoints.1 == peer_host)
                        || (&l.endpoints.1 == host && &l.endpoints.0 == peer_host)
                })
                .unwrap();
            slowest = slowest.min(ctx.links[&link.name]);
        }
        if service.output_rate > 0.0 && slowest.is_finite() {
            tb += 1000.0 * service.output_rate / slowest;
        }
        let w = config
            .weights
            .iter()
            .find(|(n, _)| n == &inst.name)
            .map_or(1.0, |(_, w)| *w);
        total += w * tb;
    }
    total
}

/// A context with every device and link somewhere between 10% and 100% of
/// its capacity.
pub fn random_context(rng: &mut StdRng, model: &Model) -> ContextSnapshot {
    let mut ctx = ContextSnapshot::nominal(model);
    for d in ctx.devices.values_mut() {
        d.cpu_available *= rng.random_range(10..=100) as f64 / 100.0;
    }
    for bw in ctx.links.values_mut() {
        *bw *= rng.random_range(10..=100) as f64 / 100.0;
    }
    ctx
}

/// A model whose single family has up to `max_members` members (variants
/// of one base configuration), up to `max_transitions` random transitions,
/// random subfamilies and one to three context states.
pub fn random_family_model(rng: &mut StdRng, max_members: usize, max_transitions: usize) -> Model {
    let mut m = universe(rng, false);
    let base = random_config(rng, &m, "M0", 12);
    let members = rng.random_range(1..=max_members);
    let devices: Vec<String> = m.devices.iter().map(|d| d.name.clone()).collect();
    for k in 0..members {
        let mut c = base.clone();
        c.name = format!("M{k}");
        for inst in c.instances.clone() {
            if rng.random_bool(0.4) {
                let svc = match m.artifact_type(&inst.type_ref).unwrap() {
                    ArtifactType::Component(t) => t.services.clone(),
                    ArtifactType::Connector(t) => t.adaptation_services.clone(),
                };
                if !svc.is_empty() {
                    c.instance_mut(&inst.name).unwrap().active_service = Some(pick(rng, &svc).name.clone());
                }
            }
            if rng.random_bool(0.2) {
                let dev = pick(rng, &devices).clone();
                for d in c.deployments.iter_mut().filter(|d| d.instance == inst.name) {
                    d.device = dev.clone();
                }
            }
        }
        if k > 0 && rng.random_bool(0.3) {
            // Drop a trailing connector so fragments differ between members.
            if let Some(pos) = c.instances.iter().rposition(|i| i.name.starts_with('P')) {
                let gone = c.instances.remove(pos).name;
                c.attachments.retain(|a| a.connector != gone);
                c.deployments.retain(|d| d.instance != gone);
                c.weights.retain(|(n, _)| n != &gone);
            }
        }
        m.configurations.push(c);
    }
    let names: Vec<String> = m.configurations.iter().map(|c| c.name.clone()).collect();
    let mut f = Family::new("Fam");
    f.members = names.clone();
    for s in 0..rng.random_range(0..=2) {
        let mut picked: Vec<String> = names.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
        if picked.is_empty() {
            picked.push(pick(rng, &names).clone());
        }
        f.subfamilies.push(Subfamily { name: format!("Sub{s}"), members: picked });
    }
    for s in 0..rng.random_range(1..=3) {
        let mut envelope = vec![ContextRequirement {
            resource: Resource::Bandwidth,
            relation: Relation::AtLeast,
            bound: num(rng, 4, 256),
        }];
        if rng.random_bool(0.5) {
            envelope.push(ContextRequirement {
                resource: Resource::Cpu,
                relation: Relation::AtLeast,
                bound: num(rng, 100, 4000),
            });
        }
        f.context_states.push(ContextState::new(format!("St{s}"), envelope));
    }
    let inst_names: Vec<String> = base.instances.iter().map(|i| i.name.clone()).collect();
    for _ in 0..rng.random_range(0..=max_transitions) {
        let from = pick(rng, &names).clone();
        let to = pick(rng, &names).clone();
        let actions = (0..rng.random_range(1..=3))
            .map(|_| random_action(rng, &inst_names, &devices, &f.subfamilies))
            .collect();
        f.transitions.push(Transition {
            from,
            to,
            trigger: random_trigger(rng, &inst_names),
            actions,
        });
    }
    m.families.push(f);
    m
}

fn random_action(
    rng: &mut StdRng,
    instances: &[String],
    devices: &[String],
    subfamilies: &[Subfamily],
) -> ReconfigurationAction {
    let inst = pick(rng, instances).clone();
    match rng.random_range(0..7) {
        0 => ReconfigurationAction::ParamUpdate {
            instance: inst,
            param: "codec".into(),
            value: format!("v{}", rng.random_range(0..9)),
        },
        1 => ReconfigurationAction::AddService { instance: inst, service: "S0v0".into() },
        2 => ReconfigurationAction::RemoveService { instance: inst, service: "S0v0".into() },
        3 => ReconfigurationAction::SubstituteService {
            instance: inst,
            from: "S0v0".into(),
            to: "S0v1".into(),
        },
        4 if !subfamilies.is_empty() => ReconfigurationAction::AttachSubfamily {
            subfamily: pick(rng, subfamilies).name.clone(),
        },
        5 if !subfamilies.is_empty() => ReconfigurationAction::DetachSubfamily {
            subfamily: pick(rng, subfamilies).name.clone(),
        },
        _ => ReconfigurationAction::Move { instance: inst, device: pick(rng, devices).clone() },
    }
}

fn random_trigger(rng: &mut StdRng, instances: &[String]) -> Trigger {
    if rng.random_bool(0.5) {
        Trigger::Resource {
            resource: *pick(rng, &Resource::ALL),
            relation: if rng.random_bool(0.5) { Relation::AtLeast } else { Relation::AtMost },
            bound: num(rng, 1, 200),
        }
    } else {
        Trigger::Signal {
            signal: *pick(rng, &[Signal::Overflow, Signal::Underflow, Signal::Fault, Signal::Move]),
            target: pick(rng, instances).clone(),
        }
    }
}

/// Artifacts an action touches, counted from the definitions.
pub fn action_cost_oracle(model: &Model, family: &Family, action: &ReconfigurationAction) -> usize {
    let sub = match action {
        ReconfigurationAction::ParamUpdate { .. } => return 0,
        ReconfigurationAction::AttachSubfamily { subfamily } | ReconfigurationAction::DetachSubfamily { subfamily } => {
            subfamily
        }
        _ => return 1,
    };
    let Some(s) = family
        .subfamilies
        .iter()
        .chain(model.families.iter().flat_map(|f| &f.subfamilies))
        .find(|s| &s.name == sub)
    else {
        return 0;
    };
    let configs: Vec<&Configuration> = s
        .members
        .iter()
        .filter_map(|n| model.configurations.iter().find(|c| &c.name == n))
        .collect();
    if configs.len() != s.members.len() || configs.is_empty() {
        return 0;
    }
    configs[0]
        .instances
        .iter()
        .filter(|i| {
            configs[1..]
                .iter()
                .all(|c| c.instances.iter().any(|o| o.name == i.name && o.type_ref == i.type_ref))
        })
        .count()
}

/// Cheapest adaptation cost found by enumerating every simple path.
pub fn adaptation_oracle(model: &Model, family: &Family, from: &Configuration, goal: &ContextState) -> Option<usize> {
    let levels = EnvelopeLevels::new(model, goal);
    let feasible = |name: &str| {
        model
            .configurations
            .iter()
            .find(|c| c.name == name)
            .is_some_and(|c| is_feasible(model, c, &levels))
    };
    if is_feasible(model, from, &levels) {
        return Some(0);
    }
    if !family.members.contains(&from.name) {
        return None;
    }
    let mut best: Option<usize> = None;
    let mut stack: Vec<(String, usize, BTreeSet<String>)> =
        vec![(from.name.clone(), 0, [from.name.clone()].into_iter().collect())];
    while let Some((at, cost, seen)) = stack.pop() {
        for t in family.transitions.iter().filter(|t| t.from == at) {
            if seen.contains(&t.to) || !family.members.contains(&t.to) {
                continue;
            }
            let c = cost + t.actions.iter().map(|a| action_cost_oracle(model, family, a)).sum::<usize>();
            if feasible(&t.to) {
                best = Some(best.map_or(c, |b| b.min(c)));
            }
            let mut next = seen.clone();
            next.insert(t.to.clone());
            stack.push((t.to.clone(), c, next));
        }
    }
    best
}

/// `(min, max)` of the oracle cost over the states that admit one.
pub fn maac_oracle(model: &Model, family: &Family, config: &Configuration) -> Option<(usize, usize)> {
    let costs: Vec<usize> = family
        .context_states
        .iter()
        .filter_map(|s| adaptation_oracle(model, family, config, s))
        .collect();
    Some((*costs.iter().min()?, *costs.iter().max()?))
}

/// A model exercising every construct the text format carries.
pub fn random_full_model(rng: &mut StdRng) -> Model {
    let mut m = random_family_model(rng, 4, 6);
    m.families[0].name = format!("Fam{}", rng.random_range(0..100));
    for k in 0..rng.random_range(0..=2) {
        let mut c = random_config(rng, &m, &format!("Extra{k}"), 10);
        if rng.random_bool(0.4) {
            c.level = Level::Pim;
            c.deployments.clear();
        }
        m.configurations.push(c);
    }
    for c in &mut m.configurations {
        let owners: Vec<String> = c
            .instances
            .iter()
            .filter(|i| i.type_ref == "CxPipe")
            .map(|i| i.name.clone())
            .collect();
        for (j, o) in owners.iter().enumerate() {
            if rng.random_bool(0.6) {
                c.buffers.push(BufferDecl {
                    name: format!("Buf{j}"),
                    owner: o.clone(),
                    capacity: num(rng, 1, 64),
                    initial_fill: rng.random_range(0..=100) as f64,
                    drain_rate: rng.random_bool(0.5).then(|| num(rng, 1, 100)),
                });
            }
            if rng.random_bool(0.5) {
                c.instance_mut(o)
                    .unwrap()
                    .parameter_overrides
                    .insert("codec".into(), format!("h26{} \"q\"", rng.random_range(0..9)));
            }
        }
    }
    if rng.random_bool(0.7) {
        m.thresholds = Some(Thresholds::new(num(rng, 0, 1), num(rng, 0, 1), num(rng, 0, 1)));
    }
    m
}
