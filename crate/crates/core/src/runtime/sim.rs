use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use super::log::{LogEntry, ReconfigurationLog, Stage};
use super::poisson::SplitMix64;
use crate::adl::{apply_event, EventKind, EventValue, Trace, TraceEvent};
use crate::families::{routes_from, Family, ReconfigurationAction};
use crate::metrics::{quality, structural_mark};
use crate::model::{
    has_errors, validate_configuration, ActionError, Configuration, Diagnostic, Model, Reconfigurer,
};
use crate::resources::{
    emission, flows, is_feasible, violations, ContextSnapshot, ResourceLevels, SnapshotLevels,
    Violation,
};

/// Fill percent below which a buffer underflows.
pub const UNDERFLOW_BELOW: f64 = 20.0;
/// Fill percent above which a buffer overflows.
pub const OVERFLOW_ABOVE: f64 = 80.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("unknown configuration '{0}'")]
    UnknownConfiguration(String),
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
    #[error("'{config}' is not a member of family '{family}'")]
    NotAMember { config: String, family: String },
    #[error("probe step must be positive")]
    ZeroStep,
    #[error("initial configuration is ill-formed: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    IllFormed(Vec<Diagnostic>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Zone {
    Low,
    Normal,
    High,
}

fn zone(fill: f64) -> Zone {
    if fill < UNDERFLOW_BELOW {
        Zone::Low
    } else if fill > OVERFLOW_ABOVE {
        Zone::High
    } else {
        Zone::Normal
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    /// Milliseconds.
    pub clock: u64,
    pub family: String,
    /// Live configuration. Its name is the family member it matches, or the
    /// member it was last derived from.
    pub config: Configuration,
    pub context: ContextSnapshot,
    pub rng: SplitMix64,
    pub pending: VecDeque<TraceEvent>,
    zones: BTreeMap<String, Zone>,
}

impl SimState {
    /// Starts at time 0 under the nominal context with every buffer at its
    /// initial fill.
    pub fn new(model: &Model, config: &str, family: &str, seed: u64) -> Result<Self, SimError> {
        let f = model
            .family(family)
            .ok_or_else(|| SimError::UnknownFamily(family.to_string()))?;
        let c = model
            .configuration(config)
            .ok_or_else(|| SimError::UnknownConfiguration(config.to_string()))?;
        if !f.contains(config) {
            return Err(SimError::NotAMember {
                config: config.to_string(),
                family: family.to_string(),
            });
        }
        let diagnostics: Vec<Diagnostic> = validate_configuration(model, c)
            .into_iter()
            .filter(Diagnostic::is_error)
            .collect();
        if has_errors(&diagnostics) {
            return Err(SimError::IllFormed(diagnostics));
        }
        let mut context = ContextSnapshot::nominal(model);
        for b in &c.buffers {
            context.buffers.insert(b.name.clone(), b.initial_fill);
        }
        Ok(Self {
            clock: 0,
            family: family.to_string(),
            config: c.clone(),
            context,
            rng: SplitMix64::new(seed),
            pending: VecDeque::new(),
            zones: BTreeMap::new(),
        })
    }

    pub fn current_config(&self) -> &str {
        &self.config.name
    }

    pub fn buffer_fill(&self, buffer: &str) -> Option<f64> {
        self.context.buffers.get(buffer).copied()
    }
}

/// Advances every buffer by `dt` ms and reports watermark crossings.
///
/// A buffer fills at the rate its owner can push out, capped by the slowest
/// link that traffic crosses, and drains at its declared rate or, by default,
/// at the owner's current output rate. Only entering the low or high zone
/// emits an event.
pub fn probe_step(state: &mut SimState, model: &Model, dt: u64) -> Vec<TraceEvent> {
    let mut events = Vec::new();
    let updates: Vec<(String, f64)> = {
        let levels = SnapshotLevels::new(model, &state.context);
        let hops = flows(model, &state.config);
        state
            .config
            .buffers
            .iter()
            .map(|b| {
                let fill = state
                    .context
                    .buffers
                    .get(&b.name)
                    .copied()
                    .unwrap_or(b.initial_fill);
                let out = emission(model, &state.config, &b.owner);
                let link_cap = hops
                    .iter()
                    .filter(|f| f.producer == b.owner && f.crosses)
                    .filter_map(|f| f.link)
                    .map(|l| levels.link_bandwidth(l))
                    .fold(f64::INFINITY, f64::min);
                let in_rate = out.min(link_cap);
                let out_rate = b.drain_rate.unwrap_or(out);
                let delta_kb = (in_rate - out_rate) * dt as f64 / 1000.0 / 8.0;
                let next = (fill + delta_kb / b.capacity * 100.0).clamp(0.0, 100.0);
                (b.name.clone(), next)
            })
            .collect()
    };
    for (name, fill) in updates {
        state.context.buffers.insert(name.clone(), fill);
        let now = zone(fill);
        let before = state.zones.insert(name.clone(), now).unwrap_or(Zone::Normal);
        let kind = match (before, now) {
            (b, Zone::Low) if b != Zone::Low => EventKind::Underflow,
            (b, Zone::High) if b != Zone::High => EventKind::Overflow,
            _ => continue,
        };
        events.push(TraceEvent::new(state.clock, kind, name, EventValue::Number(fill)));
    }
    events
}

/// Outcome of a quality-manager search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub stage: Stage,
    pub actions: Vec<ReconfigurationAction>,
    /// Configuration the actions lead to.
    pub config: Configuration,
    pub quality: Option<f64>,
    pub candidates_searched: usize,
}

impl SearchResult {
    pub fn target(&self) -> &str {
        &self.config.name
    }
}

/// Instances the event is attributed to.
fn origin(model: &Model, config: &Configuration, event: &TraceEvent) -> BTreeSet<String> {
    let target = event.target.as_str();
    match event.kind {
        EventKind::Overflow | EventKind::Underflow | EventKind::BufferFill => config
            .buffer(target)
            .map(|b| b.owner.clone())
            .into_iter()
            .collect(),
        EventKind::Cpu | EventKind::Memory | EventKind::Battery => config
            .deployments
            .iter()
            .filter(|d| d.device == target)
            .map(|d| d.instance.clone())
            .collect(),
        EventKind::Bandwidth => flows(model, config)
            .iter()
            .filter(|f| f.link == Some(target))
            .flat_map(|f| [f.producer.to_string(), f.consumer.to_string()])
            .collect(),
        EventKind::Fault | EventKind::Move => [target.to_string()].into_iter().collect(),
    }
}

/// Instances whose declaration, placement, weight, attachments or buffers
/// differ between two configurations.
pub fn instance_diff(a: &Configuration, b: &Configuration) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for i in &a.instances {
        if b.instance(&i.name) != Some(i) {
            out.insert(i.name.clone());
        }
    }
    for i in &b.instances {
        if a.instance(&i.name).is_none() {
            out.insert(i.name.clone());
        }
    }
    for i in a.instances.iter().chain(&b.instances) {
        if a.device_of(&i.name) != b.device_of(&i.name) || a.weight_of(&i.name) != b.weight_of(&i.name)
        {
            out.insert(i.name.clone());
        }
    }
    for x in &a.attachments {
        if !b.attachments.contains(x) {
            out.insert(x.component.clone());
            out.insert(x.connector.clone());
        }
    }
    for x in &b.attachments {
        if !a.attachments.contains(x) {
            out.insert(x.component.clone());
            out.insert(x.connector.clone());
        }
    }
    for x in &a.buffers {
        if b.buffer(&x.name) != Some(x) {
            out.insert(x.owner.clone());
        }
    }
    for x in &b.buffers {
        if a.buffer(&x.name) != Some(x) {
            out.insert(x.owner.clone());
        }
    }
    out
}

/// Per-instance actions turning `from` into `to`: service changes, moves and
/// parameter updates. `None` when the difference needs anything else.
fn diff_actions(from: &Configuration, to: &Configuration) -> Option<Vec<ReconfigurationAction>> {
    use ReconfigurationAction::*;
    if from.instances.len() != to.instances.len() {
        return None;
    }
    let mut actions = Vec::new();
    for a in &from.instances {
        let b = to.instance(&a.name)?;
        if a.type_ref != b.type_ref {
            return None;
        }
        match (&a.active_service, &b.active_service) {
            (x, y) if x == y => {}
            (Some(x), Some(y)) => actions.push(SubstituteService {
                instance: a.name.clone(),
                from: x.clone(),
                to: y.clone(),
            }),
            (None, Some(y)) => actions.push(AddService {
                instance: a.name.clone(),
                service: y.clone(),
            }),
            (Some(x), None) => actions.push(RemoveService {
                instance: a.name.clone(),
                service: x.clone(),
            }),
            (None, None) => {}
        }
        if a.parameter_overrides.keys().any(|k| !b.parameter_overrides.contains_key(k)) {
            return None;
        }
        for (k, v) in &b.parameter_overrides {
            if a.parameter_overrides.get(k) != Some(v) {
                actions.push(ParamUpdate {
                    instance: a.name.clone(),
                    param: k.clone(),
                    value: v.clone(),
                });
            }
        }
        match (from.device_of(&a.name), to.device_of(&a.name)) {
            (x, y) if x == y => {}
            (_, Some(d)) => actions.push(Move {
                instance: a.name.clone(),
                device: d.to_string(),
            }),
            (Some(_), None) => return None,
            (None, None) => {}
        }
    }
    Some(actions)
}

/// Quality of a configuration under the live context, if computable.
fn score(model: &Model, family: &Family, config: &Configuration, ctx: &ContextSnapshot) -> Option<f64> {
    quality(model, config, ctx, Some(family)).ok()
}

struct Search<'a> {
    model: &'a Model,
    family: &'a Family,
    state: &'a SimState,
    reconfigurer: Reconfigurer<'a>,
    /// Quality a candidate has to beat; `None` when the live configuration
    /// is infeasible and any feasible candidate will do.
    bar: Option<Option<f64>>,
    searched: usize,
}

impl Search<'_> {
    /// Best eligible candidate of one stage; ties go to the earliest.
    fn best(
        &mut self,
        stage: Stage,
        candidates: Vec<(Vec<ReconfigurationAction>, Option<&Configuration>)>,
    ) -> Option<SearchResult> {
        let levels = SnapshotLevels::new(self.model, &self.state.context);
        let mut best: Option<SearchResult> = None;
        for (actions, target) in candidates {
            self.searched += 1;
            let Ok(mut result) = self.reconfigurer.apply_all(&self.state.config, &actions) else {
                continue;
            };
            if let Some(t) = target {
                if !result.same_structure(t) {
                    continue;
                }
                result.name = t.name.clone();
            }
            if result.same_structure(&self.state.config) || !is_feasible(self.model, &result, &levels)
            {
                continue;
            }
            let q = score(self.model, self.family, &result, &self.state.context);
            if let Some(bar) = self.bar {
                match (q, bar) {
                    (Some(q), Some(b)) if q > b => {}
                    _ => continue,
                }
            }
            let key = q.unwrap_or(f64::NEG_INFINITY);
            if best
                .as_ref()
                .is_none_or(|b| key > b.quality.unwrap_or(f64::NEG_INFINITY))
            {
                best = Some(SearchResult {
                    stage,
                    actions,
                    config: result,
                    quality: q,
                    candidates_searched: 0,
                });
            }
        }
        best
    }
}

/// Staged search for a better configuration after `event`.
///
/// Stages, widest last: members with the same structural mark that differ
/// only in the instances the event is attributed to; members of a subfamily
/// containing the live configuration with the same mark; any member reachable
/// through the family's transitions; finally relocating one instance to
/// another device. A candidate has to be feasible under the live context and,
/// when the live configuration is itself feasible, strictly better in
/// quality. The first stage with a candidate wins.
pub fn qm_search(state: &SimState, event: &TraceEvent, model: &Model) -> Option<SearchResult> {
    let family = model.family(&state.family)?;
    let live = &state.config;
    let levels = SnapshotLevels::new(model, &state.context);
    let bar = is_feasible(model, live, &levels).then(|| score(model, family, live, &state.context));
    let mut search = Search {
        model,
        family,
        state,
        reconfigurer: Reconfigurer::new(model, Some(family)),
        bar,
        searched: 0,
    };

    let mark = structural_mark(model, live);
    let routes = routes_from(model, family, &live.name);
    let members: Vec<(usize, &Configuration)> = family
        .members
        .iter()
        .enumerate()
        .filter_map(|(i, m)| model.configuration(m).map(|c| (i, c)))
        .filter(|(_, c)| !c.same_structure(live))
        .collect();
    let actions_to = |i: usize, target: &Configuration| -> Option<Vec<ReconfigurationAction>> {
        let via_route = routes[i].as_ref().filter(|r| !r.transitions.is_empty()).and_then(|r| {
            let actions = r.actions(family);
            Reconfigurer::new(model, Some(family))
                .apply_all(live, &actions)
                .ok()
                .filter(|c| c.same_structure(target))
                .map(|_| actions)
        });
        via_route.or_else(|| diff_actions(live, target))
    };

    let origin = origin(model, live, event);
    let single: Vec<_> = members
        .iter()
        .filter(|(_, c)| structural_mark(model, c) == mark)
        .filter(|(_, c)| {
            let d = instance_diff(live, c);
            !d.is_empty() && d.is_subset(&origin)
        })
        .filter_map(|(i, c)| actions_to(*i, c).map(|a| (a, Some(*c))))
        .collect();
    if let Some(r) = search.best(Stage::SingleDiff, single) {
        return Some(finish(r, search.searched));
    }

    let in_subfamily: BTreeSet<&str> = family
        .subfamilies
        .iter()
        .filter(|s| s.members.contains(&live.name))
        .flat_map(|s| s.members.iter().map(String::as_str))
        .collect();
    let sub: Vec<_> = members
        .iter()
        .filter(|(_, c)| in_subfamily.contains(c.name.as_str()))
        .filter(|(_, c)| structural_mark(model, c) == mark)
        .filter_map(|(i, c)| actions_to(*i, c).map(|a| (a, Some(*c))))
        .collect();
    if let Some(r) = search.best(Stage::Subfamily, sub) {
        return Some(finish(r, search.searched));
    }

    let reachable: Vec<_> = members
        .iter()
        .filter(|(i, _)| routes[*i].as_ref().is_some_and(|r| !r.transitions.is_empty()))
        .filter_map(|(i, c)| actions_to(*i, c).map(|a| (a, Some(*c))))
        .collect();
    if let Some(r) = search.best(Stage::Family, reachable) {
        return Some(finish(r, search.searched));
    }

    let moves: Vec<_> = live
        .instances
        .iter()
        .flat_map(|inst| {
            let here = live.device_of(&inst.name);
            model
                .devices
                .iter()
                .filter(move |d| Some(d.name.as_str()) != here)
                .map(move |d| {
                    (
                        vec![ReconfigurationAction::Move {
                            instance: inst.name.clone(),
                            device: d.name.clone(),
                        }],
                        None,
                    )
                })
        })
        .collect();
    search
        .best(Stage::Move, moves)
        .map(|r| finish(r, search.searched))
}

fn finish(mut r: SearchResult, searched: usize) -> SearchResult {
    r.candidates_searched = searched;
    r
}

/// Applies `actions` to the live configuration all-or-nothing.
///
/// On success the live configuration takes the name of the family member it
/// now matches, if any. On failure the state is left untouched.
pub fn am_execute(
    state: &mut SimState,
    actions: &[ReconfigurationAction],
    model: &Model,
) -> Result<(), ActionError> {
    let family = model.family(&state.family);
    let mut next = Reconfigurer::new(model, family).apply_all(&state.config, actions)?;
    if let Some(member) = family.into_iter().flat_map(|f| &f.members).find(|m| {
        model
            .configuration(m)
            .is_some_and(|c| c.same_structure(&next))
    }) {
        next.name = member.clone();
    }
    state.config = next;
    Ok(())
}

/// Constraint violations of the live configuration that call for a search
/// now. Overloaded links carrying buffered traffic are left to the buffer's
/// watermark events.
fn pressing_violations(model: &Model, state: &SimState) -> Vec<Violation> {
    let levels = SnapshotLevels::new(model, &state.context);
    let buffered: BTreeSet<&str> = flows(model, &state.config)
        .iter()
        .filter(|f| state.config.buffers.iter().any(|b| b.owner == f.producer))
        .filter_map(|f| f.link)
        .collect();
    violations(model, &state.config, &levels)
        .into_iter()
        .filter(|v| !matches!(v, Violation::LinkBandwidth { link, .. } if buffered.contains(link.as_str())))
        .collect()
}

fn handle(state: &mut SimState, model: &Model, event: TraceEvent, log: &mut ReconfigurationLog) {
    let mut stage = Stage::None;
    let mut actions = Vec::new();
    let mut searched = 0;

    let search = match event.kind {
        k if k.is_resource() => {
            apply_event(model, &mut state.context, &event);
            !pressing_violations(model, state).is_empty()
        }
        EventKind::Fault => {
            if let Some(d) = state.config.device_of(&event.target) {
                state
                    .context
                    .faults
                    .insert((event.target.clone(), d.to_string()));
            }
            true
        }
        EventKind::Move => {
            if let Some(device) = event.value.as_device() {
                let step = vec![ReconfigurationAction::Move {
                    instance: event.target.clone(),
                    device: device.to_string(),
                }];
                searched = 1;
                stage = match am_execute(state, &step, model) {
                    Ok(()) => Stage::Move,
                    Err(_) => Stage::Failed,
                };
                actions = step;
            }
            false
        }
        _ => true,
    };

    if search {
        if let Some(found) = qm_search(state, &event, model) {
            searched = found.candidates_searched;
            stage = match am_execute(state, &found.actions, model) {
                Ok(()) => found.stage,
                Err(_) => Stage::Failed,
            };
            actions = found.actions;
        }
    }

    let quality_after = model
        .family(&state.family)
        .and_then(|f| score(model, f, &state.config, &state.context));
    log.entries.push(LogEntry {
        time: event.time,
        event,
        stage,
        actions,
        config_after: state.config.name.clone(),
        quality_after,
        candidates_searched: searched,
        config: state.config.clone(),
    });
}

/// Runs the simulation from time 0 to `horizon` ms.
///
/// Probes run every `dt` ms. Scripted events past the horizon are dropped;
/// at equal times scripted events come before probe events. Every event is
/// logged with its outcome.
pub fn run(
    model: &Model,
    config: &str,
    family: &str,
    trace: &Trace,
    seed: u64,
    horizon: u64,
    dt: u64,
) -> Result<ReconfigurationLog, SimError> {
    if dt == 0 {
        return Err(SimError::ZeroStep);
    }
    let mut state = SimState::new(model, config, family, seed)?;
    state.pending = trace
        .events
        .iter()
        .filter(|e| e.time <= horizon)
        .cloned()
        .collect();
    let mut log = ReconfigurationLog {
        seed,
        entries: Vec::new(),
    };
    let mut next_probe = dt;
    loop {
        while state
            .pending
            .front()
            .is_some_and(|e| next_probe > horizon || e.time <= next_probe)
        {
            let e = state.pending.pop_front().expect("front checked");
            state.clock = state.clock.max(e.time);
            handle(&mut state, model, e, &mut log);
        }
        if next_probe > horizon {
            break;
        }
        state.clock = next_probe;
        for e in probe_step(&mut state, model, dt) {
            handle(&mut state, model, e, &mut log);
        }
        next_probe += dt;
    }
    Ok(log)
}
