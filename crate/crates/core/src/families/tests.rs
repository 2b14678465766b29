use proptest::prelude::*;

use super::*;
use crate::model::{ContextRequirement, Relation, Resource};
use crate::resources::{is_feasible, EnvelopeLevels};
use crate::testing::corpus;

/// Cheapest cost over every simple path from `from` to a feasible member,
/// found by exhaustive depth-first enumeration.
fn oracle_cost(model: &Model, family: &Family, from: &Configuration, goal: &ContextState) -> Option<usize> {
    let levels = EnvelopeLevels::new(model, goal);
    if is_feasible(model, from, &levels) {
        return Some(0);
    }
    let feasible = |name: &str| model.configuration(name).is_some_and(|c| is_feasible(model, c, &levels));
    fn walk(
        model: &Model,
        family: &Family,
        at: &str,
        cost: usize,
        seen: &mut Vec<String>,
        feasible: &dyn Fn(&str) -> bool,
        best: &mut Option<usize>,
    ) {
        for t in family.transitions.iter().filter(|t| t.from == at) {
            if seen.contains(&t.to) || !family.contains(&t.to) {
                continue;
            }
            let c = cost + transition_cost(model, family, t);
            if feasible(&t.to) {
                *best = Some(best.map_or(c, |b| b.min(c)));
            }
            seen.push(t.to.clone());
            walk(model, family, &t.to, c, seen, feasible, best);
            seen.pop();
        }
    }
    if !family.contains(&from.name) {
        return None;
    }
    let mut best = None;
    let mut seen = vec![from.name.clone()];
    walk(model, family, &from.name, 0, &mut seen, &feasible, &mut best);
    best
}

fn bandwidth_state(name: &str, bound: f64) -> ContextState {
    ContextState::new(
        name,
        vec![ContextRequirement {
            resource: Resource::Bandwidth,
            relation: Relation::AtLeast,
            bound,
        }],
    )
}

#[test]
fn action_costs() {
    let m = corpus();
    let f = m.family("ConferenceFamily").unwrap();
    let param = ReconfigurationAction::ParamUpdate {
        instance: "VideoCodec".into(),
        param: "codec".into(),
        value: "h264".into(),
    };
    assert_eq!(action_cost(&m, f, &param), 0);
    let mv = ReconfigurationAction::Move {
        instance: "VideoResize".into(),
        device: "Relay1".into(),
    };
    assert_eq!(action_cost(&m, f, &mv), 1);
    let attach = ReconfigurationAction::AttachSubfamily {
        subfamily: "AudioLow".into(),
    };
    assert_eq!(action_cost(&m, f, &attach), 3);
}

#[test]
fn corpus_transition_costs() {
    let m = corpus();
    let f = m.family("ConferenceFamily").unwrap();
    let costs: Vec<usize> = f.transitions.iter().map(|t| transition_cost(&m, f, t)).collect();
    assert_eq!(costs, vec![6, 1, 2, 2]);
}

#[test]
fn feasible_start_needs_no_adaptation() {
    let m = corpus();
    let f = m.family("ConferenceFamily").unwrap();
    let c = m.configuration("CPIM5").unwrap();
    let r = cheapest_adaptation(&m, f, c, &f.context_states[0]).unwrap();
    assert_eq!(r.cost, 0);
    assert!(r.transitions.is_empty());
    assert_eq!(r.target, "CPIM5");
}

#[test]
fn cheapest_route_chains_transitions() {
    let m = corpus();
    let f = m.family("ConferenceFamily").unwrap();
    let c = m.configuration("CPIM2").unwrap();
    // Only CPIM5 fits under a 40 kbps envelope; CPIM2 reaches it via CPIM1.
    let r = cheapest_adaptation(&m, f, c, &bandwidth_state("tight", 40.0)).unwrap();
    assert_eq!(r.target, "CPIM5");
    assert_eq!(r.cost, 7);
    assert_eq!(r.hops(), 2);
    assert!(r.uses_subfamily_assembly(f));
}

#[test]
fn unreachable_goal_has_no_route() {
    let m = corpus();
    let f = m.family("ConferenceFamily").unwrap();
    let c = m.configuration("CPIM5").unwrap();
    assert_eq!(cheapest_adaptation(&m, f, c, &bandwidth_state("dead", 1.0)), None);
    let lonely = Family {
        context_states: vec![bandwidth_state("dead", 1.0)],
        ..f.clone()
    };
    assert!(matches!(
        maac(&m, &lonely, c),
        Err(FamilyError::NoFeasibleState { .. })
    ));
}

#[test]
fn maac_on_corpus_families() {
    let m = corpus();
    let conf = m.family("ConferenceFamily").unwrap();
    let expected = [("CPIM1", 6), ("CPIM2", 7), ("CPIM3", 2), ("CPIM4", 2), ("CPIM5", 0)];
    for (name, max) in expected {
        let r = maac(&m, conf, m.configuration(name).unwrap()).unwrap();
        assert_eq!(r, MaacRange { min: 0, max }, "{name}");
    }
    let video = m.family("VideoFamily").unwrap();
    let cpim5 = maac(&m, video, m.configuration("CPIM5").unwrap()).unwrap();
    assert_eq!(cpim5, MaacRange { min: 0, max: 1 });
    let low = maac(&m, video, m.configuration("CPIM5Low").unwrap()).unwrap();
    assert_eq!(low, MaacRange { min: 0, max: 0 });
}

#[test]
fn maac_without_states_is_an_error() {
    let m = corpus();
    let f = Family {
        context_states: Vec::new(),
        ..m.family("VideoFamily").unwrap().clone()
    };
    assert_eq!(
        maac(&m, &f, m.configuration("CPIM5").unwrap()),
        Err(FamilyError::NoContextStates("VideoFamily".into()))
    );
}

#[test]
fn oracle_agrees_on_corpus() {
    let m = corpus();
    for f in &m.families {
        for member in &f.members {
            let c = m.configuration(member).unwrap();
            for s in &f.context_states {
                let got = cheapest_adaptation(&m, f, c, s).map(|r| r.cost);
                assert_eq!(got, oracle_cost(&m, f, c, s), "{} {member} {}", f.name, s.name);
            }
        }
    }
}

fn arb_action() -> impl Strategy<Value = ReconfigurationAction> {
    prop_oneof![
        Just(ReconfigurationAction::ParamUpdate {
            instance: "VideoCodec".into(),
            param: "codec".into(),
            value: "x".into(),
        }),
        Just(ReconfigurationAction::Move {
            instance: "VideoResize".into(),
            device: "Relay1".into(),
        }),
        Just(ReconfigurationAction::DetachSubfamily {
            subfamily: "AudioHigh".into(),
        }),
    ]
}

proptest! {
    #[test]
    fn dijkstra_matches_exhaustive_paths(
        edges in prop::collection::vec(
            (0usize..7, 0usize..7, prop::collection::vec(arb_action(), 1..4)),
            0..14,
        ),
        bounds in prop::collection::vec(20.0f64..140.0, 1..4),
    ) {
        let m = corpus();
        let base = m.family("ConferenceFamily").unwrap();
        let mut f = base.clone();
        f.transitions = edges
            .into_iter()
            .map(|(a, b, actions)| Transition {
                from: base.members[a].clone(),
                to: base.members[b].clone(),
                trigger: base.transitions[0].trigger.clone(),
                actions,
            })
            .collect();
        f.context_states = bounds
            .iter()
            .enumerate()
            .map(|(i, b)| bandwidth_state(&format!("s{i}"), *b))
            .collect();
        for member in &f.members {
            let c = m.configuration(member).unwrap();
            let oracle: Vec<usize> = f
                .context_states
                .iter()
                .filter_map(|s| {
                    let got = cheapest_adaptation(&m, &f, c, s).map(|r| r.cost);
                    assert_eq!(got, oracle_cost(&m, &f, c, s));
                    got
                })
                .collect();
            match maac(&m, &f, c) {
                Ok(r) => {
                    prop_assert_eq!(Some(&r.min), oracle.iter().min());
                    prop_assert_eq!(Some(&r.max), oracle.iter().max());
                    prop_assert!(r.min <= r.max);
                }
                Err(_) => prop_assert!(oracle.is_empty()),
            }
        }
    }
}
