use super::lexer::{tokenize, Token, TokenKind};
use super::ParseError;
use crate::families::{ContextState, Family, ReconfigurationAction, Signal, Subfamily, Transition, Trigger};
use crate::metrics::Thresholds;
use crate::model::*;

/// Parses an architecture document. Stops at the first syntax error.
pub fn parse_model(text: &str) -> Result<Model, Vec<ParseError>> {
    let tokens = tokenize(text).map_err(|e| vec![e])?;
    let mut p = Parser { tokens, pos: 0 };
    p.model().map_err(|e| vec![e])
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

fn describe(t: &Token) -> String {
    match t.kind {
        TokenKind::Eof => "end of input".to_string(),
        _ => format!("'{}'", t.text),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if !matches!(t.kind, TokenKind::Eof) {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: impl Into<String>) -> PResult<T> {
        let t = self.peek();
        Err(ParseError::new(t.span, expected, describe(t)))
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek().kind, TokenKind::Keyword(k) if k == kw)
    }

    fn at_sym(&self, sym: &str) -> bool {
        matches!(self.peek().kind, TokenKind::Symbol(s) if s == sym)
    }

    fn kw(&mut self, kw: &str) -> PResult<()> {
        if self.at_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("'{kw}'"))
        }
    }

    fn sym(&mut self, sym: &str) -> PResult<()> {
        if self.at_sym(sym) {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("'{sym}'"))
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        let hit = self.at_kw(kw);
        if hit {
            self.bump();
        }
        hit
    }

    fn ident(&mut self) -> PResult<String> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.fail("identifier"),
        }
    }

    fn number(&mut self) -> PResult<f64> {
        match self.peek().kind {
            TokenKind::Number(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.fail("number"),
        }
    }

    fn string(&mut self) -> PResult<String> {
        match &self.peek().kind {
            TokenKind::Str(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.fail("string"),
        }
    }

    fn one_of(&mut self, options: &[&'static str]) -> PResult<&'static str> {
        for o in options {
            if self.at_kw(o) {
                self.bump();
                return Ok(o);
            }
        }
        let expected = options
            .iter()
            .map(|o| format!("'{o}'"))
            .collect::<Vec<_>>()
            .join(" or ");
        self.fail(expected)
    }

    fn relation(&mut self) -> PResult<Relation> {
        if self.at_sym("<=") {
            self.bump();
            Ok(Relation::AtMost)
        } else if self.at_sym(">=") {
            self.bump();
            Ok(Relation::AtLeast)
        } else {
            self.fail("'<=' or '>='")
        }
    }

    fn resource(&mut self) -> PResult<Resource> {
        let r = self.one_of(&["cpu", "memory", "bandwidth", "battery"])?;
        Ok(Resource::from_keyword(r).expect("resource keyword"))
    }

    /// `kw = NUM unit ;`
    fn measure(&mut self, kw: &str, unit: &str) -> PResult<f64> {
        self.kw(kw)?;
        self.sym("=")?;
        let n = self.number()?;
        if unit == "%" {
            self.sym("%")?;
        } else {
            self.kw(unit)?;
        }
        self.sym(";")?;
        Ok(n)
    }

    fn model(&mut self) -> PResult<Model> {
        self.kw("model")?;
        let mut model = Model::new(self.ident()?);
        self.sym("{")?;
        loop {
            if self.at_sym("}") {
                self.bump();
                break;
            }
            if self.at_kw("device") {
                model.devices.push(self.device()?);
            } else if self.at_kw("link") {
                model.links.push(self.link()?);
            } else if self.at_kw("component") {
                model.component_types.push(self.component()?);
            } else if self.at_kw("contextual") || self.at_kw("connector") {
                model.connector_types.push(self.connector()?);
            } else if self.at_kw("configuration") {
                model.configurations.push(self.configuration()?);
            } else if self.at_kw("family") {
                model.families.push(self.family()?);
            } else if self.at_kw("thresholds") {
                model.thresholds = Some(self.thresholds()?);
            } else {
                return self.fail(
                    "'device', 'link', 'component', 'connector', 'configuration', 'family', 'thresholds' or '}'",
                );
            }
        }
        if !matches!(self.peek().kind, TokenKind::Eof) {
            return self.fail("end of input");
        }
        Ok(model)
    }

    fn device(&mut self) -> PResult<Device> {
        self.kw("device")?;
        let name = self.ident()?;
        self.sym("{")?;
        let cpu_capacity = self.measure("cpu", "MIPS")?;
        let memory_capacity = self.measure("memory", "MB")?;
        let battery = if self.at_kw("battery") {
            self.measure("battery", "%")?
        } else {
            100.0
        };
        self.sym("}")?;
        Ok(Device {
            name,
            cpu_capacity,
            memory_capacity,
            battery,
        })
    }

    fn link(&mut self) -> PResult<NetworkLink> {
        self.kw("link")?;
        let name = self.ident()?;
        self.sym("{")?;
        self.kw("connects")?;
        let a = self.ident()?;
        self.sym(",")?;
        let b = self.ident()?;
        self.sym(";")?;
        let bandwidth = self.measure("bandwidth", "kbps")?;
        self.sym("}")?;
        Ok(NetworkLink {
            name,
            endpoints: (a, b),
            bandwidth,
        })
    }

    fn service(&mut self) -> PResult<ServiceProfile> {
        self.kw("service")?;
        let mut s = ServiceProfile::new(self.ident()?, 0.0);
        self.sym("{")?;
        s.cpu_demand = self.measure("cpu", "MIPS")?;
        if self.at_kw("out") {
            s.output_rate = self.measure("out", "kbps")?;
        }
        if self.eat_kw("reduce") {
            self.sym("=")?;
            let input = self.number()?;
            self.sym(":")?;
            let output = self.number()?;
            self.sym(";")?;
            s.reduction = Some(Reduction { input, output });
        }
        if self.eat_kw("quality") {
            self.sym("=")?;
            s.quality = match self.one_of(&["high", "medium", "low"])? {
                "high" => QualityLevel::High,
                "medium" => QualityLevel::Medium,
                _ => QualityLevel::Low,
            };
            self.sym(";")?;
        }
        if self.at_kw("memory") {
            s.memory_demand = self.measure("memory", "MB")?;
        }
        self.sym("}")?;
        Ok(s)
    }

    fn component(&mut self) -> PResult<ComponentType> {
        self.kw("component")?;
        let mut c = ComponentType {
            name: self.ident()?,
            ports: Vec::new(),
            services: Vec::new(),
            context_requirements: Vec::new(),
        };
        self.sym("{")?;
        loop {
            if self.eat_kw("port") {
                let kind = match self.one_of(&["data", "context", "control", "qos"])? {
                    "data" => match self.one_of(&["in", "out"])? {
                        "in" => PortKind::DataIn,
                        _ => PortKind::DataOut,
                    },
                    "context" => PortKind::Context,
                    "control" => PortKind::Control,
                    _ => PortKind::Qos,
                };
                let name = self.ident()?;
                self.sym(";")?;
                c.ports.push(PortDecl { name, kind });
            } else if self.at_kw("service") {
                c.services.push(self.service()?);
            } else if self.eat_kw("requires") {
                self.sym("{")?;
                loop {
                    let resource = self.resource()?;
                    let relation = self.relation()?;
                    let bound = self.number()?;
                    self.sym(";")?;
                    c.context_requirements.push(ContextRequirement {
                        resource,
                        relation,
                        bound,
                    });
                    if self.at_sym("}") {
                        self.bump();
                        break;
                    }
                }
            } else if self.at_sym("}") {
                self.bump();
                return Ok(c);
            } else {
                return self.fail("'port', 'service', 'requires' or '}'");
            }
        }
    }

    fn connector(&mut self) -> PResult<ConnectorType> {
        let contextual = self.eat_kw("contextual");
        self.kw("connector")?;
        let mut c = ConnectorType {
            name: self.ident()?,
            contextual,
            roles: Vec::new(),
            adaptation_services: Vec::new(),
            parameters: Vec::new(),
        };
        self.sym("{")?;
        loop {
            if self.eat_kw("role") {
                let kind = match self.one_of(&["data", "context"])? {
                    "data" => match self.one_of(&["source", "sink"])? {
                        "source" => RoleKind::DataSource,
                        _ => RoleKind::DataSink,
                    },
                    _ => RoleKind::Context,
                };
                let name = self.ident()?;
                self.sym(";")?;
                c.roles.push(RoleDecl { name, kind });
            } else if self.at_kw("service") {
                c.adaptation_services.push(self.service()?);
            } else if self.eat_kw("param") {
                let name = self.ident()?;
                self.sym("=")?;
                let value = self.string()?;
                self.sym(";")?;
                c.parameters.push((name, value));
            } else if self.at_sym("}") {
                self.bump();
                return Ok(c);
            } else {
                return self.fail("'role', 'service', 'param' or '}'");
            }
        }
    }

    fn configuration(&mut self) -> PResult<Configuration> {
        self.kw("configuration")?;
        let name = self.ident()?;
        let level = if self.eat_kw("level") {
            match self.one_of(&["PIM", "CPIM"])? {
                "PIM" => Level::Pim,
                _ => Level::Cpim,
            }
        } else {
            Level::Pim
        };
        let mut c = Configuration::new(name, level);
        self.sym("{")?;
        loop {
            if self.eat_kw("use") {
                let ty = self.ident()?;
                self.kw("as")?;
                let mut inst = ArtifactInstance::new(self.ident()?, ty);
                if self.eat_kw("with") {
                    inst.active_service = Some(self.ident()?);
                }
                self.sym(";")?;
                c.instances.push(inst);
            } else if self.eat_kw("attach") {
                let component = self.ident()?;
                self.sym(".")?;
                let port = self.ident()?;
                self.kw("to")?;
                let connector = self.ident()?;
                self.sym(".")?;
                let role = self.ident()?;
                self.sym(";")?;
                c.attachments.push(Attachment {
                    component,
                    port,
                    connector,
                    role,
                });
            } else if self.eat_kw("deploy") {
                let instance = self.ident()?;
                self.kw("on")?;
                let device = self.ident()?;
                self.sym(";")?;
                c.deployments.push(Deployment { instance, device });
            } else if self.eat_kw("buffer") {
                let name = self.ident()?;
                self.kw("on")?;
                let owner = self.ident()?;
                self.kw("capacity")?;
                let capacity = self.number()?;
                self.kw("KB")?;
                let initial_fill = if self.eat_kw("fill") {
                    let f = self.number()?;
                    self.sym("%")?;
                    f
                } else {
                    DEFAULT_BUFFER_FILL
                };
                let drain_rate = if self.eat_kw("drain") {
                    let r = self.number()?;
                    self.kw("kbps")?;
                    Some(r)
                } else {
                    None
                };
                self.sym(";")?;
                c.buffers.push(BufferDecl {
                    name,
                    owner,
                    capacity,
                    initial_fill,
                    drain_rate,
                });
            } else if self.eat_kw("weight") {
                let inst = self.ident()?;
                self.sym("=")?;
                let w = self.number()?;
                self.sym(";")?;
                c.weights.push((inst, w));
            } else if self.eat_kw("set") {
                let inst = self.ident()?;
                self.sym(".")?;
                let param = self.ident()?;
                self.sym("=")?;
                let value = self.string()?;
                self.sym(";")?;
                match c.instance_mut(&inst) {
                    Some(i) => {
                        i.parameter_overrides.insert(param, value);
                    }
                    None => return self.fail_at_previous(format!("an instance declared before '{inst}.{param}'")),
                }
            } else if self.at_sym("}") {
                self.bump();
                return Ok(c);
            } else {
                return self.fail("'use', 'attach', 'deploy', 'buffer', 'weight', 'set' or '}'");
            }
        }
    }

    fn fail_at_previous<T>(&self, expected: String) -> PResult<T> {
        let t = &self.tokens[self.pos.saturating_sub(1)];
        Err(ParseError::new(t.span, expected, describe(t)))
    }

    fn members(&mut self) -> PResult<Vec<String>> {
        let mut out = Vec::new();
        while self.eat_kw("member") {
            out.push(self.ident()?);
            self.sym(";")?;
        }
        if out.is_empty() {
            return self.fail("'member'");
        }
        Ok(out)
    }

    fn family(&mut self) -> PResult<Family> {
        self.kw("family")?;
        let mut f = Family::new(self.ident()?);
        self.sym("{")?;
        f.members = self.members()?;
        loop {
            if self.eat_kw("subfamily") {
                let name = self.ident()?;
                self.sym("{")?;
                let members = self.members()?;
                self.sym("}")?;
                f.subfamilies.push(Subfamily { name, members });
            } else if self.eat_kw("state") {
                let name = self.ident()?;
                self.sym("{")?;
                let mut envelope = Vec::new();
                while !self.at_sym("}") {
                    let resource = self.resource()?;
                    let relation = self.relation()?;
                    let bound = self.number()?;
                    self.sym(";")?;
                    envelope.push(ContextRequirement {
                        resource,
                        relation,
                        bound,
                    });
                }
                self.bump();
                f.context_states.push(ContextState { name, envelope });
            } else if self.at_kw("transition") {
                f.transitions.push(self.transition()?);
            } else if self.at_sym("}") {
                self.bump();
                return Ok(f);
            } else {
                return self.fail("'subfamily', 'state', 'transition' or '}'");
            }
        }
    }

    fn transition(&mut self) -> PResult<Transition> {
        self.kw("transition")?;
        let from = self.ident()?;
        self.sym("->")?;
        let to = self.ident()?;
        self.kw("on")?;
        self.kw("event")?;
        self.sym("(")?;
        let trigger = if ["overflow", "underflow", "fault", "move"]
            .iter()
            .any(|k| self.at_kw(k))
        {
            let signal = match self.one_of(&["overflow", "underflow", "fault", "move"])? {
                "overflow" => Signal::Overflow,
                "underflow" => Signal::Underflow,
                "fault" => Signal::Fault,
                _ => Signal::Move,
            };
            Trigger::Signal {
                signal,
                target: self.ident()?,
            }
        } else {
            let resource = self.resource()?;
            let relation = self.relation()?;
            let bound = self.number()?;
            Trigger::Resource {
                resource,
                relation,
                bound,
            }
        };
        self.sym(")")?;
        self.kw("do")?;
        self.sym("{")?;
        let mut actions = Vec::new();
        loop {
            if self.at_sym("}") && !actions.is_empty() {
                self.bump();
                break;
            }
            actions.push(self.action()?);
        }
        Ok(Transition {
            from,
            to,
            trigger,
            actions,
        })
    }

    fn action(&mut self) -> PResult<ReconfigurationAction> {
        use ReconfigurationAction::*;
        let kw = self.one_of(&[
            "set",
            "add",
            "remove",
            "substitute",
            "attachsub",
            "detachsub",
            "moveto",
        ])?;
        let action = match kw {
            "set" => {
                let instance = self.ident()?;
                self.sym(".")?;
                let param = self.ident()?;
                self.sym("=")?;
                ParamUpdate {
                    instance,
                    param,
                    value: self.string()?,
                }
            }
            "add" | "remove" => {
                let instance = self.ident()?;
                self.sym(".")?;
                let service = self.ident()?;
                if kw == "add" {
                    AddService { instance, service }
                } else {
                    RemoveService { instance, service }
                }
            }
            "substitute" => {
                let instance = self.ident()?;
                self.sym(".")?;
                let from = self.ident()?;
                self.kw("with")?;
                SubstituteService {
                    instance,
                    from,
                    to: self.ident()?,
                }
            }
            "attachsub" => AttachSubfamily {
                subfamily: self.ident()?,
            },
            "detachsub" => DetachSubfamily {
                subfamily: self.ident()?,
            },
            _ => {
                let instance = self.ident()?;
                self.kw("on")?;
                Move {
                    instance,
                    device: self.ident()?,
                }
            }
        };
        self.sym(";")?;
        Ok(action)
    }

    fn thresholds(&mut self) -> PResult<Thresholds> {
        self.kw("thresholds")?;
        self.sym("{")?;
        self.kw("coupling")?;
        self.sym("<=")?;
        let coupling_max = self.number()?;
        self.sym(";")?;
        self.kw("cohesion")?;
        self.sym(">=")?;
        let cohesion_min = self.number()?;
        self.sym(";")?;
        self.kw("complexity")?;
        self.sym("<=")?;
        let complexity_max = self.number()?;
        self.sym(";")?;
        self.sym("}")?;
        Ok(Thresholds {
            coupling_max,
            cohesion_min,
            complexity_max,
        })
    }
}
