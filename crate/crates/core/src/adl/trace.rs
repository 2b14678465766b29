//! Context traces: one `<time_ms> <kind> <target> <value>` event per line.
//!
//! Blank lines and `#` comments are skipped. A context file is a trace whose
//! events all sit at time 0.

use std::fmt;

use super::{ParseError, SourceSpan};
use crate::model::Model;
use crate::resources::{ContextSnapshot, DeviceContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    Bandwidth,
    Cpu,
    Memory,
    Battery,
    BufferFill,
    Overflow,
    Underflow,
    Move,
    Fault,
}

impl EventKind {
    /// Kinds that may appear in a trace file.
    pub const SCRIPTED: [EventKind; 7] = [
        EventKind::Bandwidth,
        EventKind::Cpu,
        EventKind::Memory,
        EventKind::Battery,
        EventKind::BufferFill,
        EventKind::Move,
        EventKind::Fault,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            EventKind::Bandwidth => "bandwidth",
            EventKind::Cpu => "cpu",
            EventKind::Memory => "memory",
            EventKind::Battery => "battery",
            EventKind::BufferFill => "buffer_fill",
            EventKind::Overflow => "overflow",
            EventKind::Underflow => "underflow",
            EventKind::Move => "move",
            EventKind::Fault => "fault",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::SCRIPTED.into_iter().find(|k| k.keyword() == s)
    }

    /// Resource-level change, as opposed to a signal.
    pub fn is_resource(self) -> bool {
        matches!(
            self,
            EventKind::Bandwidth
                | EventKind::Cpu
                | EventKind::Memory
                | EventKind::Battery
                | EventKind::BufferFill
        )
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventValue {
    Number(f64),
    /// Destination device of a move.
    Device(String),
    /// Faults carry no value.
    Empty,
}

impl EventValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            EventValue::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_device(&self) -> Option<&str> {
        match self {
            EventValue::Device(d) => Some(d),
            _ => None,
        }
    }
}

impl fmt::Display for EventValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventValue::Number(n) => write!(f, "{n}"),
            EventValue::Device(d) => f.write_str(d),
            EventValue::Empty => f.write_str("-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    /// Milliseconds.
    pub time: u64,
    pub kind: EventKind,
    pub target: String,
    pub value: EventValue,
}

impl TraceEvent {
    pub fn new(time: u64, kind: EventKind, target: impl Into<String>, value: EventValue) -> Self {
        Self {
            time,
            kind,
            target: target.into(),
            value,
        }
    }
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.time, self.kind, self.target, self.value)
    }
}

/// Events sorted by time; equal times keep input order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
}

impl Trace {
    pub fn new(mut events: Vec<TraceEvent>) -> Self {
        events.sort_by_key(|e| e.time);
        Self { events }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

struct Field<'a> {
    text: &'a str,
    span: SourceSpan,
}

fn fields(line: &str, line_no: usize) -> Vec<Field<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    let mut col = 0;
    for (idx, c) in line.char_indices() {
        col += 1;
        if c.is_whitespace() {
            if let Some((s, scol)) = start.take() {
                let text = &line[s..idx];
                out.push(Field {
                    text,
                    span: SourceSpan::new(line_no, scol, text.chars().count()),
                });
            }
        } else if start.is_none() {
            start = Some((idx, col));
        }
    }
    if let Some((s, scol)) = start {
        let text = &line[s..];
        out.push(Field {
            text,
            span: SourceSpan::new(line_no, scol, text.chars().count()),
        });
    }
    out
}

fn parse_line(line: &str, line_no: usize) -> Result<Option<TraceEvent>, ParseError> {
    let content = line.split('#').next().unwrap_or("");
    let f = fields(content, line_no);
    if f.is_empty() {
        return Ok(None);
    }
    let end = SourceSpan::new(line_no, content.chars().count() + 1, 0);
    let missing = |what: &str| ParseError::new(end, what, "end of line");

    let time: u64 = f[0]
        .text
        .parse()
        .map_err(|_| ParseError::new(f[0].span, "non-negative integer time", f[0].text))?;
    let kind_field = f.get(1).ok_or_else(|| missing("event kind"))?;
    let kind = EventKind::from_keyword(kind_field.text).ok_or_else(|| {
        ParseError::new(
            kind_field.span,
            "one of bandwidth, cpu, memory, battery, buffer_fill, move, fault",
            kind_field.text,
        )
    })?;
    let target = f.get(2).ok_or_else(|| missing("target"))?;
    if !super::is_identifier(target.text) {
        return Err(ParseError::new(target.span, "identifier", target.text));
    }
    let value = match (kind, f.get(3)) {
        (EventKind::Fault, _) => EventValue::Empty,
        (EventKind::Move, Some(v)) if super::is_identifier(v.text) => {
            EventValue::Device(v.text.to_string())
        }
        (EventKind::Move, Some(v)) => return Err(ParseError::new(v.span, "device name", v.text)),
        (_, Some(v)) => {
            let n: f64 = v
                .text
                .parse()
                .ok()
                .filter(|n: &f64| n.is_finite() && *n >= 0.0)
                .ok_or_else(|| ParseError::new(v.span, "non-negative number", v.text))?;
            if matches!(kind, EventKind::Battery | EventKind::BufferFill) && n > 100.0 {
                return Err(ParseError::new(v.span, "percent in [0,100]", v.text));
            }
            EventValue::Number(n)
        }
        (_, None) => return Err(missing("value")),
    };
    let expected_len = if kind == EventKind::Fault && f.len() == 3 { 3 } else { 4 };
    if let Some(extra) = f.get(expected_len) {
        return Err(ParseError::new(extra.span, "end of line", extra.text));
    }
    Ok(Some(TraceEvent::new(time, kind, target.text, value)))
}

/// Parses a trace, reporting one error per malformed line.
pub fn parse_trace(text: &str) -> Result<Trace, Vec<ParseError>> {
    let mut events = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        match parse_line(line, i + 1) {
            Ok(Some(e)) => events.push(e),
            Ok(None) => {}
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(Trace::new(events))
    } else {
        Err(errors)
    }
}

pub fn serialize_trace(trace: &Trace) -> String {
    trace.events.iter().map(|e| format!("{e}\n")).collect()
}

fn device_entry<'s>(
    model: &Model,
    snapshot: &'s mut ContextSnapshot,
    name: &str,
) -> &'s mut DeviceContext {
    snapshot.devices.entry(name.to_string()).or_insert_with(|| {
        let d = model.device(name);
        DeviceContext {
            cpu_available: d.map_or(0.0, |d| d.cpu_capacity),
            memory_available: d.map_or(0.0, |d| d.memory_capacity),
            battery: d.map_or(100.0, |d| d.battery),
        }
    })
}

/// Folds a resource event into the snapshot. Signals leave it unchanged.
pub fn apply_event(model: &Model, snapshot: &mut ContextSnapshot, event: &TraceEvent) {
    let Some(value) = event.value.as_number() else {
        return;
    };
    match event.kind {
        EventKind::Bandwidth => {
            snapshot.links.insert(event.target.clone(), value);
        }
        EventKind::Cpu => device_entry(model, snapshot, &event.target).cpu_available = value,
        EventKind::Memory => device_entry(model, snapshot, &event.target).memory_available = value,
        EventKind::Battery => device_entry(model, snapshot, &event.target).battery = value,
        EventKind::BufferFill => {
            snapshot.buffers.insert(event.target.clone(), value);
        }
        _ => {}
    }
}

/// Reads a context file onto the model's nominal snapshot.
pub fn parse_context(text: &str, model: &Model) -> Result<ContextSnapshot, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut snapshot = ContextSnapshot::nominal(model);
    for (i, line) in text.lines().enumerate() {
        match parse_line(line, i + 1) {
            Ok(None) => {}
            Ok(Some(e)) if e.time != 0 => errors.push(ParseError::new(
                SourceSpan::new(i + 1, 1, e.time.to_string().len()),
                "time 0 in a context file",
                e.time.to_string(),
            )),
            Ok(Some(e)) if !e.kind.is_resource() => errors.push(ParseError::new(
                SourceSpan::new(i + 1, 1, 1),
                "a resource event in a context file",
                e.kind.keyword(),
            )),
            Ok(Some(e)) => apply_event(model, &mut snapshot, &e),
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(snapshot)
    } else {
        Err(errors)
    }
}
