use super::*;
use crate::families::ReconfigurationAction as A;
use crate::testing::corpus;

fn errors(diags: &[Diagnostic]) -> Vec<RuleId> {
    diags.iter().filter(|d| d.is_error()).map(|d| d.rule_id).collect()
}

fn config(model: &Model, name: &str) -> Configuration {
    model.configuration(name).unwrap().clone()
}

#[test]
fn corpus_is_well_formed() {
    let m = corpus();
    let diags = validate_wellformed(&m);
    assert!(errors(&diags).is_empty(), "{diags:?}");
}

#[test]
fn duplicate_device_is_wf1() {
    let mut m = corpus();
    let d = m.devices[0].clone();
    m.devices.push(d);
    assert!(errors(&validate_universe(&m)).contains(&RuleId::WF1));
}

#[test]
fn port_reused_is_wf2() {
    let m = corpus();
    let mut c = config(&m, "PipeFilterPIM");
    c.attachments.push(Attachment::new("VideoEnc", "vout", "MixPipe", "src"));
    assert!(errors(&validate_configuration(&m, &c)).contains(&RuleId::WF2));
}

#[test]
fn context_port_on_data_role_is_wf3() {
    let m = corpus();
    let mut c = config(&m, "PipeFilterPIM");
    c.attachments.push(Attachment::new("VideoResize", "rctx", "MixPipe", "src"));
    assert_eq!(errors(&validate_configuration(&m, &c)), vec![RuleId::WF3]);
}

#[test]
fn contextual_connector_without_context_attachment_is_wf4() {
    let m = corpus();
    let mut c = config(&m, "CPIM1");
    c.attachments.retain(|a| a.role != "vctx");
    assert!(errors(&validate_configuration(&m, &c)).contains(&RuleId::WF4));
}

#[test]
fn context_role_on_plain_connector_is_wf5() {
    let mut m = corpus();
    let pipe = m.connector_types.iter_mut().find(|c| c.name == "Pipe").unwrap();
    pipe.roles.push(RoleDecl {
        name: "ctx".into(),
        kind: RoleKind::Context,
    });
    assert!(errors(&validate_universe(&m)).contains(&RuleId::WF5));
}

#[test]
fn undeployed_cpim_instance_is_wf6() {
    let m = corpus();
    let mut c = config(&m, "CPIM1");
    c.deployments.retain(|d| d.instance != "RateAudio");
    assert_eq!(errors(&validate_configuration(&m, &c)), vec![RuleId::WF6]);
}

#[test]
fn pim_deployment_is_wf6() {
    let m = corpus();
    let mut c = config(&m, "PipeFilterPIM");
    c.deployments.push(Deployment {
        instance: "VideoEnc".into(),
        device: "Speaker".into(),
    });
    assert!(errors(&validate_configuration(&m, &c)).contains(&RuleId::WF6));
}

#[test]
fn unlinked_cross_device_attachment_is_wf7() {
    let mut m = corpus();
    m.devices.push(Device {
        name: "Island".into(),
        cpu_capacity: 1000.0,
        memory_capacity: 64.0,
        battery: 100.0,
    });
    let mut c = config(&m, "CPIM1");
    for d in c.deployments.iter_mut().filter(|d| d.instance == "VideoResize") {
        d.device = "Island".into();
    }
    assert!(errors(&validate_configuration(&m, &c)).contains(&RuleId::WF7));
}

#[test]
fn unknown_service_is_wf8_error_and_missing_one_a_warning() {
    let m = corpus();
    let mut c = config(&m, "CPIM1");
    c.instance_mut("AudioEnc").unwrap().active_service = Some("Nope".into());
    assert_eq!(errors(&validate_configuration(&m, &c)), vec![RuleId::WF8]);

    c.instance_mut("AudioEnc").unwrap().active_service = None;
    let diags = validate_configuration(&m, &c);
    assert!(errors(&diags).is_empty());
    assert!(diags
        .iter()
        .any(|d| d.rule_id == RuleId::WF8 && d.severity == Severity::Warning));
}

#[test]
fn battery_out_of_range_is_wf9() {
    let mut m = corpus();
    m.devices[0].battery = 150.0;
    assert!(errors(&validate_universe(&m)).contains(&RuleId::WF9));
}

#[test]
fn unknown_type_is_wf0() {
    let m = corpus();
    let mut c = config(&m, "PipeFilterPIM");
    c.instances.push(ArtifactInstance::new("Ghost", "NoSuchT"));
    assert!(errors(&validate_configuration(&m, &c)).contains(&RuleId::WF0));
}

#[test]
fn family_rules() {
    let mut m = corpus();
    let fam = m.families.iter_mut().find(|f| f.name == "VideoFamily").unwrap();
    fam.subfamilies[0].members.push("CPIM1".into());
    fam.context_states[0].envelope.clear();
    fam.transitions[0].to = "CPIM5".into();
    let fam = m.family("VideoFamily").unwrap();
    let rules = errors(&validate_family(&m, fam));
    assert!(rules.contains(&RuleId::FM1));
    assert!(rules.contains(&RuleId::FM3));
    assert!(rules.contains(&RuleId::FM4));

    let mut m = corpus();
    let fam = m.families.iter_mut().find(|f| f.name == "VideoFamily").unwrap();
    fam.transitions[0].actions.clear();
    let fam = m.family("VideoFamily").unwrap();
    assert_eq!(errors(&validate_family(&m, fam)), vec![RuleId::FM2]);
}

#[test]
fn param_update_overrides_one_instance() {
    let m = corpus();
    let c = config(&m, "CPIM1");
    let a = A::ParamUpdate {
        instance: "VideoCodec".into(),
        param: "codec".into(),
        value: "h264".into(),
    };
    let out = apply_action(&m, &c, &a).unwrap();
    assert_eq!(
        out.instance("VideoCodec").unwrap().parameter_overrides.get("codec").map(String::as_str),
        Some("h264")
    );
    assert_eq!(out.instances.len(), c.instances.len());
}

#[test]
fn substitute_swaps_active_service_and_leaves_input_alone() {
    let m = corpus();
    let c = config(&m, "CPIM1");
    let before = c.clone();
    let a = A::SubstituteService {
        instance: "VideoCodec".into(),
        from: "HighQ".into(),
        to: "LowQ".into(),
    };
    let out = apply_action(&m, &c, &a).unwrap();
    assert_eq!(c, before);
    assert_eq!(out.instance("VideoCodec").unwrap().active_service.as_deref(), Some("LowQ"));

    let wrong = A::SubstituteService {
        instance: "VideoCodec".into(),
        from: "MediumQ".into(),
        to: "LowQ".into(),
    };
    assert!(matches!(apply_action(&m, &c, &wrong), Err(ActionError::TargetMissing(_))));
}

#[test]
fn substitute_then_inverse_restores_structure() {
    let m = corpus();
    let c = config(&m, "CPIM2");
    let there = A::SubstituteService {
        instance: "VideoCodec".into(),
        from: "MediumQ".into(),
        to: "HighQ".into(),
    };
    let back = A::SubstituteService {
        instance: "VideoCodec".into(),
        from: "HighQ".into(),
        to: "MediumQ".into(),
    };
    let r = Reconfigurer::new(&m, None);
    let out = r.apply_all(&c, &[there.clone(), back]).unwrap();
    assert!(out.same_structure(&c));
    assert!(r.apply(&c, &there).unwrap().same_structure(&config(&m, "CPIM1")));
}

#[test]
fn move_follows_links() {
    let m = corpus();
    let c = config(&m, "CPIM5");
    let a = A::Move {
        instance: "VideoResize".into(),
        device: "Relay1".into(),
    };
    let out = apply_action(&m, &c, &a).unwrap();
    assert_eq!(out.device_of("VideoResize"), Some("Relay1"));

    let mut m2 = m.clone();
    m2.links.retain(|l| l.name != "RA");
    assert!(matches!(
        apply_action(&m2, &c, &a),
        Err(ActionError::IllegalMove { .. })
    ));
}

#[test]
fn subfamily_detach_then_attach_round_trips() {
    let m = corpus();
    let fam = m.family("ConferenceFamily").unwrap();
    let r = Reconfigurer::new(&m, Some(fam));
    let c = config(&m, "CPIM1");
    let detach = A::DetachSubfamily {
        subfamily: "AudioHigh".into(),
    };
    let attach = A::AttachSubfamily {
        subfamily: "AudioHigh".into(),
    };
    let out = r.apply_all(&c, &[detach, attach.clone()]).unwrap();
    assert!(out.same_structure(&c));
    assert!(matches!(r.apply(&c, &attach), Err(ActionError::Collision(_))));
}

#[test]
fn failing_sequence_is_all_or_nothing() {
    let m = corpus();
    let c = config(&m, "CPIM1");
    let ok = A::SubstituteService {
        instance: "VideoCodec".into(),
        from: "HighQ".into(),
        to: "LowQ".into(),
    };
    let bad = A::Move {
        instance: "Nobody".into(),
        device: "Relay1".into(),
    };
    let before = c.clone();
    assert!(Reconfigurer::new(&m, None).apply_all(&c, &[ok, bad]).is_err());
    assert_eq!(c, before);
}
