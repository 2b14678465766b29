use std::fmt::Write;

use crate::families::{Family, ReconfigurationAction, Trigger};
use crate::model::*;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn service(out: &mut String, indent: &str, s: &ServiceProfile) {
    let _ = writeln!(out, "{indent}service {} {{", s.name);
    let _ = writeln!(out, "{indent}  cpu = {} MIPS;", s.cpu_demand);
    if s.output_rate != 0.0 {
        let _ = writeln!(out, "{indent}  out = {} kbps;", s.output_rate);
    }
    if let Some(r) = s.reduction {
        let _ = writeln!(out, "{indent}  reduce = {}:{};", r.input, r.output);
    }
    if s.quality != QualityLevel::NotApplicable {
        let _ = writeln!(out, "{indent}  quality = {};", s.quality);
    }
    if s.memory_demand != 0.0 {
        let _ = writeln!(out, "{indent}  memory = {} MB;", s.memory_demand);
    }
    let _ = writeln!(out, "{indent}}}");
}

fn port_kind(kind: PortKind) -> &'static str {
    match kind {
        PortKind::DataIn => "data in",
        PortKind::DataOut => "data out",
        PortKind::Context => "context",
        PortKind::Control => "control",
        PortKind::Qos => "qos",
    }
}

fn role_kind(kind: RoleKind) -> &'static str {
    match kind {
        RoleKind::DataSource => "data source",
        RoleKind::DataSink => "data sink",
        RoleKind::Context => "context",
    }
}

fn component(out: &mut String, c: &ComponentType) {
    let _ = writeln!(out, "  component {} {{", c.name);
    for p in &c.ports {
        let _ = writeln!(out, "    port {} {};", port_kind(p.kind), p.name);
    }
    for s in &c.services {
        service(out, "    ", s);
    }
    if !c.context_requirements.is_empty() {
        out.push_str("    requires {\n");
        for r in &c.context_requirements {
            let _ = writeln!(out, "      {r};");
        }
        out.push_str("    }\n");
    }
    out.push_str("  }\n");
}

fn connector(out: &mut String, c: &ConnectorType) {
    let prefix = if c.contextual { "contextual " } else { "" };
    let _ = writeln!(out, "  {prefix}connector {} {{", c.name);
    for r in &c.roles {
        let _ = writeln!(out, "    role {} {};", role_kind(r.kind), r.name);
    }
    for s in &c.adaptation_services {
        service(out, "    ", s);
    }
    for (k, v) in &c.parameters {
        let _ = writeln!(out, "    param {k} = {};", quote(v));
    }
    out.push_str("  }\n");
}

fn configuration(out: &mut String, c: &Configuration) {
    let _ = writeln!(out, "  configuration {} level {} {{", c.name, c.level);
    for i in &c.instances {
        match &i.active_service {
            Some(s) => {
                let _ = writeln!(out, "    use {} as {} with {s};", i.type_ref, i.name);
            }
            None => {
                let _ = writeln!(out, "    use {} as {};", i.type_ref, i.name);
            }
        }
    }
    for a in &c.attachments {
        let _ = writeln!(out, "    attach {a};");
    }
    for d in &c.deployments {
        let _ = writeln!(out, "    deploy {} on {};", d.instance, d.device);
    }
    for b in &c.buffers {
        let _ = write!(
            out,
            "    buffer {} on {} capacity {} KB fill {}%",
            b.name, b.owner, b.capacity, b.initial_fill
        );
        if let Some(d) = b.drain_rate {
            let _ = write!(out, " drain {d} kbps");
        }
        out.push_str(";\n");
    }
    for (i, w) in &c.weights {
        let _ = writeln!(out, "    weight {i} = {w};");
    }
    for i in &c.instances {
        for (p, v) in &i.parameter_overrides {
            let _ = writeln!(out, "    set {}.{p} = {};", i.name, quote(v));
        }
    }
    out.push_str("  }\n");
}

fn action(a: &ReconfigurationAction) -> String {
    use ReconfigurationAction::*;
    match a {
        ParamUpdate {
            instance,
            param,
            value,
        } => format!("set {instance}.{param} = {}", quote(value)),
        AddService { instance, service } => format!("add {instance}.{service}"),
        RemoveService { instance, service } => format!("remove {instance}.{service}"),
        SubstituteService { instance, from, to } => {
            format!("substitute {instance}.{from} with {to}")
        }
        AttachSubfamily { subfamily } => format!("attachsub {subfamily}"),
        DetachSubfamily { subfamily } => format!("detachsub {subfamily}"),
        Move { instance, device } => format!("moveto {instance} on {device}"),
    }
}

fn family(out: &mut String, f: &Family) {
    let _ = writeln!(out, "  family {} {{", f.name);
    for m in &f.members {
        let _ = writeln!(out, "    member {m};");
    }
    for s in &f.subfamilies {
        let _ = writeln!(out, "    subfamily {} {{", s.name);
        for m in &s.members {
            let _ = writeln!(out, "      member {m};");
        }
        out.push_str("    }\n");
    }
    for s in &f.context_states {
        let _ = writeln!(out, "    state {} {{", s.name);
        for r in &s.envelope {
            let _ = writeln!(out, "      {r};");
        }
        out.push_str("    }\n");
    }
    for t in &f.transitions {
        let trigger = match &t.trigger {
            Trigger::Resource {
                resource,
                relation,
                bound,
            } => format!("{resource} {} {bound}", relation.symbol()),
            Trigger::Signal { signal, target } => format!("{} {target}", signal.keyword()),
        };
        let _ = writeln!(
            out,
            "    transition {} -> {} on event({trigger}) do {{",
            t.from, t.to
        );
        for a in &t.actions {
            let _ = writeln!(out, "      {};", action(a));
        }
        out.push_str("    }\n");
    }
    out.push_str("  }\n");
}

/// Renders a model in canonical layout. Output is deterministic and parses
/// back to an equal model.
pub fn serialize_model(model: &Model) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {} {{", model.name);
    for d in &model.devices {
        let _ = writeln!(
            out,
            "  device {} {{ cpu = {} MIPS; memory = {} MB; battery = {}%; }}",
            d.name, d.cpu_capacity, d.memory_capacity, d.battery
        );
    }
    for l in &model.links {
        let _ = writeln!(
            out,
            "  link {} {{ connects {}, {}; bandwidth = {} kbps; }}",
            l.name, l.endpoints.0, l.endpoints.1, l.bandwidth
        );
    }
    for c in &model.component_types {
        component(&mut out, c);
    }
    for c in &model.connector_types {
        connector(&mut out, c);
    }
    for c in &model.configurations {
        configuration(&mut out, c);
    }
    for f in &model.families {
        family(&mut out, f);
    }
    if let Some(t) = &model.thresholds {
        let _ = writeln!(
            out,
            "  thresholds {{ coupling <= {}; cohesion >= {}; complexity <= {}; }}",
            t.coupling_max, t.cohesion_min, t.complexity_max
        );
    }
    out.push_str("}\n");
    out
}
