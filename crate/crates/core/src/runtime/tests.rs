use super::*;
use crate::adl::{parse_trace, EventKind, EventValue, TraceEvent};
use crate::families::ReconfigurationAction;
use crate::metrics::quality;
use crate::model::Model;
use crate::testing::corpus;

fn video_state(model: &Model) -> SimState {
    SimState::new(model, "CPIM5", "VideoFamily", 7).unwrap()
}

fn probe_n(state: &mut SimState, model: &Model, steps: usize) -> Vec<TraceEvent> {
    let mut out = Vec::new();
    for _ in 0..steps {
        state.clock += 100;
        out.extend(probe_step(state, model, 100));
    }
    out
}

#[test]
fn steady_buffer_emits_nothing() {
    let m = corpus();
    let mut s = video_state(&m);
    assert!(probe_n(&mut s, &m, 500).is_empty());
    assert_eq!(s.buffer_fill("VideoBuf"), Some(50.0));
}

#[test]
fn rising_buffer_overflows_once() {
    let mut m = corpus();
    let c = m.configurations.iter_mut().find(|c| c.name == "CPIM5").unwrap();
    c.buffers[0].drain_rate = Some(16.0);
    let mut s = video_state(&m);
    let events = probe_n(&mut s, &m, 200);
    assert_eq!(events.len(), 1, "{events:?}");
    assert_eq!(events[0].kind, EventKind::Overflow);
    // 1.25 percent per probe from 50 percent.
    assert_eq!(events[0].time, 2500);
    assert_eq!(s.buffer_fill("VideoBuf"), Some(100.0));
}

#[test]
fn pinned_low_buffer_underflows_once() {
    let m = corpus();
    let mut s = video_state(&m);
    s.context.buffers.insert("VideoBuf".into(), 15.0);
    let events = probe_n(&mut s, &m, 100);
    assert_eq!(events.len(), 1);
    assert_eq!(events[0].kind, EventKind::Underflow);
    assert_eq!(events[0].value, EventValue::Number(15.0));
    assert_eq!(s.buffer_fill("VideoBuf"), Some(15.0));
}

#[test]
fn leaving_and_reentering_a_zone_fires_again() {
    let m = corpus();
    let mut s = video_state(&m);
    s.context.buffers.insert("VideoBuf".into(), 10.0);
    assert_eq!(probe_n(&mut s, &m, 1).len(), 1);
    s.context.buffers.insert("VideoBuf".into(), 50.0);
    assert!(probe_n(&mut s, &m, 1).is_empty());
    s.context.buffers.insert("VideoBuf".into(), 10.0);
    assert_eq!(probe_n(&mut s, &m, 1).len(), 1);
}

#[test]
fn execute_renames_to_matching_member() {
    let m = corpus();
    let mut s = video_state(&m);
    let step = [ReconfigurationAction::SubstituteService {
        instance: "VideoCodec".into(),
        from: "HighQ".into(),
        to: "LowQ".into(),
    }];
    am_execute(&mut s, &step, &m).unwrap();
    assert_eq!(s.current_config(), "CPIM5Low");
}

#[test]
fn failed_execute_leaves_state_alone() {
    let m = corpus();
    let mut s = video_state(&m);
    let before = s.clone();
    let steps = [
        ReconfigurationAction::SubstituteService {
            instance: "VideoCodec".into(),
            from: "HighQ".into(),
            to: "LowQ".into(),
        },
        ReconfigurationAction::Move {
            instance: "VideoResize".into(),
            device: "Nowhere".into(),
        },
    ];
    assert!(am_execute(&mut s, &steps, &m).is_err());
    assert_eq!(s, before);
}

#[test]
fn underflow_under_low_bandwidth_picks_single_diff() {
    let m = corpus();
    let mut s = video_state(&m);
    s.context.links.insert("SA".into(), 26.0);
    let e = TraceEvent::new(0, EventKind::Underflow, "VideoBuf", EventValue::Number(19.0));
    let r = qm_search(&s, &e, &m).unwrap();
    assert_eq!(r.stage, Stage::SingleDiff);
    assert_eq!(r.target(), "CPIM5Low");
    assert_eq!(r.actions.len(), 1);
    assert!(r.candidates_searched >= 1);
}

#[test]
fn candidates_beat_a_feasible_live_configuration() {
    let m = corpus();
    let s = SimState::new(&m, "CPIM5", "ConferenceFamily", 7).unwrap();
    let e = TraceEvent::new(0, EventKind::Overflow, "VideoBuf", EventValue::Number(81.0));
    let live = quality(&m, &s.config, &s.context, m.family("ConferenceFamily")).unwrap();
    let r = qm_search(&s, &e, &m).unwrap();
    assert!(r.quality.unwrap() > live);
}

#[test]
fn repeated_search_climbs_then_stops() {
    let m = corpus();
    let mut s = SimState::new(&m, "CPIM5", "ConferenceFamily", 7).unwrap();
    let e = TraceEvent::new(0, EventKind::Overflow, "VideoBuf", EventValue::Number(81.0));
    let fam = m.family("ConferenceFamily");
    let mut last = quality(&m, &s.config, &s.context, fam).unwrap();
    let mut rounds = 0;
    while let Some(r) = qm_search(&s, &e, &m) {
        am_execute(&mut s, &r.actions, &m).unwrap();
        let now = quality(&m, &s.config, &s.context, fam).unwrap();
        assert!(now > last);
        last = now;
        rounds += 1;
        assert!(rounds < 50, "search does not settle");
    }
    assert!(rounds >= 1);
}

#[test]
fn instance_diff_names_changed_instances() {
    let m = corpus();
    let a = m.configuration("CPIM5").unwrap();
    let b = m.configuration("CPIM5Low").unwrap();
    let d = instance_diff(a, b);
    assert_eq!(d.into_iter().collect::<Vec<_>>(), vec!["VideoCodec".to_string()]);
    assert!(instance_diff(a, a).is_empty());
}

#[test]
fn run_rejects_bad_inputs() {
    let m = corpus();
    let t = parse_trace("").unwrap();
    assert_eq!(run(&m, "CPIM5", "VideoFamily", &t, 0, 100, 0), Err(SimError::ZeroStep));
    assert!(matches!(
        run(&m, "CPIM1", "VideoFamily", &t, 0, 100, 100),
        Err(SimError::NotAMember { .. })
    ));
    assert!(matches!(
        run(&m, "CPIM5", "NoFamily", &t, 0, 100, 100),
        Err(SimError::UnknownFamily(_))
    ));
}

#[test]
fn run_is_deterministic_and_drops_late_events() {
    let m = corpus();
    let t = parse_trace("0 bandwidth SA 56\n5000 bandwidth SA 26\n90000 bandwidth SA 10\n").unwrap();
    let a = run(&m, "CPIM5", "VideoFamily", &t, 3, 60_000, 100).unwrap();
    let b = run(&m, "CPIM5", "VideoFamily", &t, 3, 60_000, 100).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.serialize(), b.serialize());
    assert!(a.serialize().starts_with("# seed=3\n"));
    assert!(a.entries.iter().all(|e| e.time <= 60_000));
    assert_eq!(a.reconfigurations().count(), 1);
}

#[test]
fn move_event_relocates_directly() {
    let m = corpus();
    let t = parse_trace("100 move VideoResize Relay1\n").unwrap();
    let log = run(&m, "CPIM5", "VideoFamily", &t, 0, 1000, 100).unwrap();
    let e = &log.entries[0];
    assert_eq!(e.stage, Stage::Move);
    assert_eq!(e.config.device_of("VideoResize"), Some("Relay1"));
    assert_eq!(
        e.to_string(),
        format!(
            "t=100 event=move:VideoResize:Relay1 stage=move actions=[Move(VideoResize)] config=CPIM5 quality={:.3}",
            e.quality_after.unwrap()
        )
    );
}
