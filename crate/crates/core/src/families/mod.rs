//! Configuration families: members, subfamilies, transitions and the
//! adaptation-cost search over them.
//!
//! Transitions are directed. The cost of a transition counts the artifacts
//! it touches: parametric updates are free, service changes and moves cost
//! one, and attaching or detaching a subfamily costs its artifact count.

mod types;

use std::cmp::Ordering;

use thiserror::Error;

pub use types::*;

use crate::model::{subfamily_fragment, Configuration, Model};
use crate::resources::{is_feasible, EnvelopeLevels};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("'{config}' cannot reach a feasible member under any context state of '{family}'")]
    NoFeasibleState { config: String, family: String },
    #[error("family '{0}' declares no context state")]
    NoContextStates(String),
}

/// Artifact count of one action.
pub fn action_cost(model: &Model, family: &Family, action: &ReconfigurationAction) -> usize {
    use ReconfigurationAction::*;
    match action {
        ParamUpdate { .. } => 0,
        AddService { .. } | RemoveService { .. } | SubstituteService { .. } | Move { .. } => 1,
        AttachSubfamily { subfamily } | DetachSubfamily { subfamily } => family
            .subfamily(subfamily)
            .or_else(|| model.families.iter().find_map(|f| f.subfamily(subfamily)))
            .and_then(|s| subfamily_fragment(model, s))
            .map_or(0, |f| f.instances.len()),
    }
}

pub fn transition_cost(model: &Model, family: &Family, transition: &Transition) -> usize {
    transition
        .actions
        .iter()
        .map(|a| action_cost(model, family, a))
        .sum()
}

/// Path through the transition graph, as indices into `family.transitions`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub target: String,
    pub cost: usize,
    pub transitions: Vec<usize>,
}

impl Route {
    pub fn hops(&self) -> usize {
        self.transitions.len()
    }

    pub fn actions(&self, family: &Family) -> Vec<ReconfigurationAction> {
        self.transitions
            .iter()
            .flat_map(|&i| family.transitions[i].actions.iter().cloned())
            .collect()
    }

    pub fn uses_subfamily_assembly(&self, family: &Family) -> bool {
        self.transitions.iter().any(|&i| {
            family.transitions[i].actions.iter().any(|a| {
                matches!(
                    a,
                    ReconfigurationAction::AttachSubfamily { .. }
                        | ReconfigurationAction::DetachSubfamily { .. }
                )
            })
        })
    }
}

/// Cheapest route (by cost, then hop count) from `start` to every member.
///
/// Entry `i` is the route to `family.members[i]`; the start member itself
/// gets an empty route and unreachable members get `None`.
pub fn routes_from(model: &Model, family: &Family, start: &str) -> Vec<Option<Route>> {
    let n = family.members.len();
    let mut best: Vec<Option<(usize, usize, Vec<usize>)>> = vec![None; n];
    let mut done = vec![false; n];
    let Some(s) = family.member_index(start) else {
        return vec![None; n];
    };
    best[s] = Some((0, 0, Vec::new()));
    let costs: Vec<usize> = family
        .transitions
        .iter()
        .map(|t| transition_cost(model, family, t))
        .collect();
    loop {
        let next = (0..n)
            .filter(|&i| !done[i])
            .filter_map(|i| best[i].as_ref().map(|(c, h, _)| (*c, *h, i)))
            .min();
        let Some((cost, hops, u)) = next else {
            break;
        };
        done[u] = true;
        let path = best[u].as_ref().map(|b| b.2.clone()).unwrap_or_default();
        for (ti, t) in family.transitions.iter().enumerate() {
            if t.from != family.members[u] {
                continue;
            }
            let Some(v) = family.member_index(&t.to) else {
                continue;
            };
            if done[v] {
                continue;
            }
            let key = (cost + costs[ti], hops + 1);
            let better = match &best[v] {
                None => true,
                Some((c, h, _)) => key.cmp(&(*c, *h)) == Ordering::Less,
            };
            if better {
                let mut p = path.clone();
                p.push(ti);
                best[v] = Some((key.0, key.1, p));
            }
        }
    }
    best.into_iter()
        .enumerate()
        .map(|(i, b)| {
            b.map(|(cost, _, transitions)| Route {
                target: family.members[i].clone(),
                cost,
                transitions,
            })
        })
        .collect()
}

/// Every member's feasibility under `goal`, in member order.
pub fn feasible_members(model: &Model, family: &Family, goal: &ContextState) -> Vec<bool> {
    let levels = EnvelopeLevels::new(model, goal);
    family
        .members
        .iter()
        .map(|m| {
            model
                .configuration(m)
                .is_some_and(|c| is_feasible(model, c, &levels))
        })
        .collect()
}

/// Minimum-cost adaptation from `from` to a member feasible under `goal`.
///
/// Returns an empty route when `from` is already feasible. Ties go to fewer
/// transitions, then to the earlier declared member.
pub fn cheapest_adaptation(
    model: &Model,
    family: &Family,
    from: &Configuration,
    goal: &ContextState,
) -> Option<Route> {
    if is_feasible(model, from, &EnvelopeLevels::new(model, goal)) {
        return Some(Route {
            target: from.name.clone(),
            cost: 0,
            transitions: Vec::new(),
        });
    }
    let feasible = feasible_members(model, family, goal);
    routes_from(model, family, &from.name)
        .into_iter()
        .enumerate()
        .filter(|(i, r)| feasible[*i] && r.as_ref().is_some_and(|r| !r.transitions.is_empty()))
        .filter_map(|(i, r)| r.map(|r| (r.cost, r.hops(), i, r)))
        .min_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)))
        .map(|(_, _, _, r)| r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaacRange {
    pub min: usize,
    pub max: usize,
}

impl MaacRange {
    pub const ZERO: MaacRange = MaacRange { min: 0, max: 0 };
}

/// Minimum adaptive cost of `config` over the family's context states.
///
/// States from which no feasible member is reachable are left out.
pub fn maac(model: &Model, family: &Family, config: &Configuration) -> Result<MaacRange, FamilyError> {
    if family.context_states.is_empty() {
        return Err(FamilyError::NoContextStates(family.name.clone()));
    }
    let costs: Vec<usize> = family
        .context_states
        .iter()
        .filter_map(|s| cheapest_adaptation(model, family, config, s).map(|r| r.cost))
        .collect();
    match (costs.iter().min(), costs.iter().max()) {
        (Some(&min), Some(&max)) => Ok(MaacRange { min, max }),
        _ => Err(FamilyError::NoFeasibleState {
            config: config.name.clone(),
            family: family.name.clone(),
        }),
    }
}

#[cfg(test)]
mod tests;
