use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::model::{Configuration, Model};

/// Neighbour-pair density over component instances.
///
/// Two components are neighbours when they attach to the same connector
/// instance. The sum of per-component neighbour counts is divided by
/// `n * (n - 1)`; fewer than two components gives 0.
pub fn coupling(model: &Model, config: &Configuration) -> f64 {
    let components: Vec<&str> = config
        .instances
        .iter()
        .filter(|i| model.component_type(&i.type_ref).is_some())
        .map(|i| i.name.as_str())
        .collect();
    let n = components.len();
    if n <= 1 {
        return 0.0;
    }
    let mut by_connector: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for a in &config.attachments {
        if components.contains(&a.component.as_str()) {
            by_connector
                .entry(a.connector.as_str())
                .or_default()
                .insert(a.component.as_str());
        }
    }
    let mut total = 0usize;
    for c in &components {
        let neighbours: BTreeSet<&str> = by_connector
            .values()
            .filter(|set| set.contains(c))
            .flat_map(|set| set.iter().copied())
            .filter(|other| other != c)
            .collect();
        total += neighbours.len();
    }
    total as f64 / (n * (n - 1)) as f64
}

/// Mean share of attached data ports per component instance.
pub fn cohesion(model: &Model, config: &Configuration) -> f64 {
    let mut shares = Vec::new();
    for inst in &config.instances {
        let Some(ty) = model.component_type(&inst.type_ref) else {
            continue;
        };
        let declared = ty.data_port_count();
        if declared == 0 {
            shares.push(1.0);
            continue;
        }
        let attached: BTreeSet<&str> = config
            .attachments
            .iter()
            .filter(|a| a.component == inst.name)
            .filter(|a| ty.port(&a.port).is_some_and(|p| p.kind.is_data()))
            .map(|a| a.port.as_str())
            .collect();
        shares.push(attached.len() as f64 / declared as f64);
    }
    if shares.is_empty() {
        1.0
    } else {
        shares.iter().sum::<f64>() / shares.len() as f64
    }
}

/// `1 - 1 / (1 + ln(1 + V + E))` over instance and attachment counts.
pub fn complexity(config: &Configuration) -> f64 {
    complexity_of_size(config.instances.len(), config.attachments.len())
}

pub fn complexity_of_size(instances: usize, attachments: usize) -> f64 {
    let size = (instances + attachments) as f64;
    1.0 - 1.0 / (1.0 + size.ln_1p())
}

/// Bucketed structural metrics, one decile per criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mark {
    pub coupling: u8,
    pub cohesion: u8,
    pub complexity: u8,
}

impl Mark {
    pub fn from_metrics(coupling: f64, cohesion: f64, complexity: f64) -> Self {
        Self {
            coupling: bucket(coupling),
            cohesion: bucket(cohesion),
            complexity: bucket(complexity),
        }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.coupling, self.cohesion, self.complexity)
    }
}

fn bucket(metric: f64) -> u8 {
    (metric * 10.0).floor().clamp(0.0, 10.0) as u8
}

pub fn structural_mark(model: &Model, config: &Configuration) -> Mark {
    Mark::from_metrics(
        coupling(model, config),
        cohesion(model, config),
        complexity(config),
    )
}
