use std::fmt;

use crate::model::{ContextRequirement, Relation, Resource};

#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub name: String,
    pub members: Vec<String>,
    pub subfamilies: Vec<Subfamily>,
    pub context_states: Vec<ContextState>,
    pub transitions: Vec<Transition>,
}

impl Family {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            members: Vec::new(),
            subfamilies: Vec::new(),
            context_states: Vec::new(),
            transitions: Vec::new(),
        }
    }

    pub fn subfamily(&self, name: &str) -> Option<&Subfamily> {
        self.subfamilies.iter().find(|s| s.name == name)
    }

    pub fn member_index(&self, name: &str) -> Option<usize> {
        self.members.iter().position(|m| m == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.member_index(name).is_some()
    }

    pub fn outgoing<'a>(&'a self, from: &'a str) -> impl Iterator<Item = &'a Transition> + 'a {
        self.transitions.iter().filter(move |t| t.from == from)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subfamily {
    pub name: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub from: String,
    pub to: String,
    pub trigger: Trigger,
    pub actions: Vec<ReconfigurationAction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    Overflow,
    Underflow,
    Fault,
    Move,
}

impl Signal {
    pub fn keyword(self) -> &'static str {
        match self {
            Signal::Overflow => "overflow",
            Signal::Underflow => "underflow",
            Signal::Fault => "fault",
            Signal::Move => "move",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Trigger {
    Resource {
        resource: Resource,
        relation: Relation,
        bound: f64,
    },
    Signal {
        signal: Signal,
        target: String,
    },
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trigger::Resource {
                resource,
                relation,
                bound,
            } => write!(f, "{resource} {relation} {bound}"),
            Trigger::Signal { signal, target } => write!(f, "{} {target}", signal.keyword()),
        }
    }
}

/// A named resource envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextState {
    pub name: String,
    pub envelope: Vec<ContextRequirement>,
}

impl ContextState {
    pub fn new(name: impl Into<String>, envelope: Vec<ContextRequirement>) -> Self {
        Self {
            name: name.into(),
            envelope,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActionKind {
    ParamUpdate,
    AddService,
    RemoveService,
    SubstituteService,
    AttachSubfamily,
    DetachSubfamily,
    Move,
}

impl ActionKind {
    pub fn name(self) -> &'static str {
        match self {
            ActionKind::ParamUpdate => "ParamUpdate",
            ActionKind::AddService => "AddService",
            ActionKind::RemoveService => "RemoveService",
            ActionKind::SubstituteService => "SubstituteService",
            ActionKind::AttachSubfamily => "AttachSubfamily",
            ActionKind::DetachSubfamily => "DetachSubfamily",
            ActionKind::Move => "Move",
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ReconfigurationAction {
    ParamUpdate {
        instance: String,
        param: String,
        value: String,
    },
    AddService {
        instance: String,
        service: String,
    },
    RemoveService {
        instance: String,
        service: String,
    },
    SubstituteService {
        instance: String,
        from: String,
        to: String,
    },
    AttachSubfamily {
        subfamily: String,
    },
    DetachSubfamily {
        subfamily: String,
    },
    Move {
        instance: String,
        device: String,
    },
}

impl ReconfigurationAction {
    pub fn kind(&self) -> ActionKind {
        match self {
            ReconfigurationAction::ParamUpdate { .. } => ActionKind::ParamUpdate,
            ReconfigurationAction::AddService { .. } => ActionKind::AddService,
            ReconfigurationAction::RemoveService { .. } => ActionKind::RemoveService,
            ReconfigurationAction::SubstituteService { .. } => ActionKind::SubstituteService,
            ReconfigurationAction::AttachSubfamily { .. } => ActionKind::AttachSubfamily,
            ReconfigurationAction::DetachSubfamily { .. } => ActionKind::DetachSubfamily,
            ReconfigurationAction::Move { .. } => ActionKind::Move,
        }
    }

    /// Instance or subfamily the action operates on.
    pub fn target(&self) -> &str {
        match self {
            ReconfigurationAction::ParamUpdate { instance, .. }
            | ReconfigurationAction::AddService { instance, .. }
            | ReconfigurationAction::RemoveService { instance, .. }
            | ReconfigurationAction::SubstituteService { instance, .. }
            | ReconfigurationAction::Move { instance, .. } => instance,
            ReconfigurationAction::AttachSubfamily { subfamily }
            | ReconfigurationAction::DetachSubfamily { subfamily } => subfamily,
        }
    }

    pub fn detail(&self) -> String {
        match self {
            ReconfigurationAction::ParamUpdate { param, value, .. } => format!("{param}={value}"),
            ReconfigurationAction::AddService { service, .. }
            | ReconfigurationAction::RemoveService { service, .. } => service.clone(),
            ReconfigurationAction::SubstituteService { from, to, .. } => format!("{from}->{to}"),
            ReconfigurationAction::AttachSubfamily { .. }
            | ReconfigurationAction::DetachSubfamily { .. } => String::new(),
            ReconfigurationAction::Move { device, .. } => device.clone(),
        }
    }
}

impl fmt::Display for ReconfigurationAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind(), self.target())
    }
}
