use std::fmt::Write;

use crate::model::Model;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Family descriptors as XML, in declaration order.
pub fn export_families_xml(model: &Model) -> String {
    if model.families.is_empty() {
        return "<families/>\n".to_string();
    }
    let mut out = String::from("<families>\n");
    for f in &model.families {
        let _ = writeln!(out, "  <family name=\"{}\">", escape(&f.name));
        for m in &f.members {
            let _ = writeln!(out, "    <configuration ref=\"{}\"/>", escape(m));
        }
        for s in &f.subfamilies {
            let _ = writeln!(out, "    <subfamily name=\"{}\">", escape(&s.name));
            for m in &s.members {
                let _ = writeln!(out, "      <configuration ref=\"{}\"/>", escape(m));
            }
            out.push_str("    </subfamily>\n");
        }
        for t in &f.transitions {
            let _ = writeln!(
                out,
                "    <transition from=\"{}\" to=\"{}\" trigger=\"{}\">",
                escape(&t.from),
                escape(&t.to),
                escape(&t.trigger.to_string())
            );
            for a in &t.actions {
                let _ = writeln!(
                    out,
                    "      <action kind=\"{}\" target=\"{}\" detail=\"{}\"/>",
                    a.kind(),
                    escape(a.target()),
                    escape(&a.detail())
                );
            }
            out.push_str("    </transition>\n");
        }
        out.push_str("  </family>\n");
    }
    out.push_str("</families>\n");
    out
}
