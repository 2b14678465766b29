//! Architectural, context and resource entities.
//!
//! Every collection keeps declaration order. Lookups are linear scans; the
//! models this crate handles hold tens of entities, not thousands.

use std::collections::BTreeMap;
use std::fmt;

use crate::families::Family;
use crate::metrics::Thresholds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PortKind {
    DataIn,
    DataOut,
    Context,
    Control,
    Qos,
}

impl PortKind {
    pub fn is_data(self) -> bool {
        matches!(self, PortKind::DataIn | PortKind::DataOut)
    }

    /// Whether a port of this kind may attach to a role of `role` kind.
    ///
    /// Data-out feeds a connector's source role, data-in drains its sink role,
    /// and the non-functional ports (context, control, qos) only meet context
    /// roles.
    pub fn compatible_with(self, role: RoleKind) -> bool {
        matches!(
            (self, role),
            (PortKind::DataOut, RoleKind::DataSource)
                | (PortKind::DataIn, RoleKind::DataSink)
                | (PortKind::Context | PortKind::Control | PortKind::Qos, RoleKind::Context)
        )
    }
}

impl fmt::Display for PortKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PortKind::DataIn => "data in",
            PortKind::DataOut => "data out",
            PortKind::Context => "context",
            PortKind::Control => "control",
            PortKind::Qos => "qos",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoleKind {
    DataSource,
    DataSink,
    Context,
}

impl fmt::Display for RoleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RoleKind::DataSource => "data source",
            RoleKind::DataSink => "data sink",
            RoleKind::Context => "context",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortDecl {
    pub name: String,
    pub kind: PortKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleDecl {
    pub name: String,
    pub kind: RoleKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QualityLevel {
    High,
    Medium,
    Low,
    #[default]
    NotApplicable,
}

impl fmt::Display for QualityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QualityLevel::High => "high",
            QualityLevel::Medium => "medium",
            QualityLevel::Low => "low",
            QualityLevel::NotApplicable => "n/a",
        })
    }
}

/// A reduction written `input:output`, e.g. `10:1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduction {
    pub input: f64,
    pub output: f64,
}

impl Reduction {
    pub fn ratio(&self) -> f64 {
        self.input / self.output
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceProfile {
    pub name: String,
    /// MIPS.
    pub cpu_demand: f64,
    /// kbps emitted on the instance's outgoing data attachments.
    pub output_rate: f64,
    pub reduction: Option<Reduction>,
    pub quality: QualityLevel,
    /// MB.
    pub memory_demand: f64,
}

impl ServiceProfile {
    pub fn new(name: impl Into<String>, cpu_demand: f64) -> Self {
        Self {
            name: name.into(),
            cpu_demand,
            output_rate: 0.0,
            reduction: None,
            quality: QualityLevel::NotApplicable,
            memory_demand: 0.0,
        }
    }

    pub fn with_output(mut self, kbps: f64) -> Self {
        self.output_rate = kbps;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Resource {
    Cpu,
    Memory,
    Bandwidth,
    Battery,
}

impl Resource {
    pub const ALL: [Resource; 4] = [
        Resource::Cpu,
        Resource::Memory,
        Resource::Bandwidth,
        Resource::Battery,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Resource::Cpu => "cpu",
            Resource::Memory => "memory",
            Resource::Bandwidth => "bandwidth",
            Resource::Battery => "battery",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Resource::ALL.into_iter().find(|r| r.keyword() == s)
    }
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    AtLeast,
    AtMost,
}

impl Relation {
    pub fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Relation::AtLeast => value >= bound,
            Relation::AtMost => value <= bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContextRequirement {
    pub resource: Resource,
    pub relation: Relation,
    pub bound: f64,
}

impl fmt::Display for ContextRequirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.resource, self.relation, self.bound)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentType {
    pub name: String,
    pub ports: Vec<PortDecl>,
    pub services: Vec<ServiceProfile>,
    pub context_requirements: Vec<ContextRequirement>,
}

impl ComponentType {
    pub fn port(&self, name: &str) -> Option<&PortDecl> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn data_port_count(&self) -> usize {
        self.ports.iter().filter(|p| p.kind.is_data()).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectorType {
    pub name: String,
    pub contextual: bool,
    pub roles: Vec<RoleDecl>,
    pub adaptation_services: Vec<ServiceProfile>,
    pub parameters: Vec<(String, String)>,
}

impl ConnectorType {
    pub fn role(&self, name: &str) -> Option<&RoleDecl> {
        self.roles.iter().find(|r| r.name == name)
    }
}

/// Either side of the type universe an instance can refer to.
#[derive(Debug, Clone, Copy)]
pub enum ArtifactType<'m> {
    Component(&'m ComponentType),
    Connector(&'m ConnectorType),
}

impl<'m> ArtifactType<'m> {
    pub fn name(&self) -> &'m str {
        match self {
            ArtifactType::Component(c) => &c.name,
            ArtifactType::Connector(c) => &c.name,
        }
    }

    pub fn services(&self) -> &'m [ServiceProfile] {
        match self {
            ArtifactType::Component(c) => &c.services,
            ArtifactType::Connector(c) => &c.adaptation_services,
        }
    }

    pub fn service(&self, name: &str) -> Option<&'m ServiceProfile> {
        self.services().iter().find(|s| s.name == name)
    }

    pub fn is_component(&self) -> bool {
        matches!(self, ArtifactType::Component(_))
    }

    pub fn requirements(&self) -> &'m [ContextRequirement] {
        match self {
            ArtifactType::Component(c) => &c.context_requirements,
            ArtifactType::Connector(_) => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Device {
    pub name: String,
    /// MIPS.
    pub cpu_capacity: f64,
    /// MB.
    pub memory_capacity: f64,
    /// Percent.
    pub battery: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLink {
    pub name: String,
    pub endpoints: (String, String),
    /// kbps.
    pub bandwidth: f64,
}

impl NetworkLink {
    pub fn joins(&self, a: &str, b: &str) -> bool {
        (self.endpoints.0 == a && self.endpoints.1 == b)
            || (self.endpoints.0 == b && self.endpoints.1 == a)
    }

    pub fn touches(&self, device: &str) -> bool {
        self.endpoints.0 == device || self.endpoints.1 == device
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Level {
    #[default]
    Pim,
    Cpim,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Pim => "PIM",
            Level::Cpim => "CPIM",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArtifactInstance {
    pub name: String,
    pub type_ref: String,
    pub active_service: Option<String>,
    pub parameter_overrides: BTreeMap<String, String>,
}

impl ArtifactInstance {
    pub fn new(name: impl Into<String>, type_ref: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            type_ref: type_ref.into(),
            active_service: None,
            parameter_overrides: BTreeMap::new(),
        }
    }

    pub fn with_service(mut self, service: impl Into<String>) -> Self {
        self.active_service = Some(service.into());
        self
    }
}

/// `component.port` attached to `connector.role`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attachment {
    pub component: String,
    pub port: String,
    pub connector: String,
    pub role: String,
}

impl Attachment {
    pub fn new(component: &str, port: &str, connector: &str, role: &str) -> Self {
        Self {
            component: component.into(),
            port: port.into(),
            connector: connector.into(),
            role: role.into(),
        }
    }

    pub fn touches(&self, instance: &str) -> bool {
        self.component == instance || self.connector == instance
    }
}

impl fmt::Display for Attachment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{} to {}.{}",
            self.component, self.port, self.connector, self.role
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Deployment {
    pub instance: String,
    pub device: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BufferDecl {
    pub name: String,
    /// Connector instance owning the buffer.
    pub owner: String,
    /// KB.
    pub capacity: f64,
    /// Percent.
    pub initial_fill: f64,
    /// kbps; the owner's nominal output rate when absent.
    pub drain_rate: Option<f64>,
}

pub const DEFAULT_BUFFER_FILL: f64 = 50.0;
pub const DEFAULT_WEIGHT: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Configuration {
    pub name: String,
    pub level: Level,
    pub instances: Vec<ArtifactInstance>,
    pub attachments: Vec<Attachment>,
    pub deployments: Vec<Deployment>,
    pub buffers: Vec<BufferDecl>,
    pub weights: Vec<(String, f64)>,
}

impl Configuration {
    pub fn new(name: impl Into<String>, level: Level) -> Self {
        Self {
            name: name.into(),
            level,
            ..Default::default()
        }
    }

    pub fn instance(&self, name: &str) -> Option<&ArtifactInstance> {
        self.instances.iter().find(|i| i.name == name)
    }

    pub fn instance_mut(&mut self, name: &str) -> Option<&mut ArtifactInstance> {
        self.instances.iter_mut().find(|i| i.name == name)
    }

    /// Device of the first deployment entry for `instance`.
    pub fn device_of(&self, instance: &str) -> Option<&str> {
        self.deployments
            .iter()
            .find(|d| d.instance == instance)
            .map(|d| d.device.as_str())
    }

    pub fn weight_of(&self, instance: &str) -> f64 {
        self.weights
            .iter()
            .find(|(n, _)| n == instance)
            .map(|(_, w)| *w)
            .unwrap_or(DEFAULT_WEIGHT)
    }

    pub fn buffer(&self, name: &str) -> Option<&BufferDecl> {
        self.buffers.iter().find(|b| b.name == name)
    }

    /// Order-insensitive copy used for structural comparison.
    pub fn canonical(&self) -> Configuration {
        let mut c = self.clone();
        c.instances.sort_by(|a, b| a.name.cmp(&b.name));
        c.attachments.sort();
        c.deployments.sort();
        c.buffers.sort_by(|a, b| a.name.cmp(&b.name));
        c.weights
            .sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        c
    }

    /// Equality of everything but the name and declaration order.
    pub fn same_structure(&self, other: &Configuration) -> bool {
        let mut a = self.canonical();
        let mut b = other.canonical();
        a.name.clear();
        b.name.clear();
        a == b
    }
}

/// The parsed universe.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Model {
    pub name: String,
    pub devices: Vec<Device>,
    pub links: Vec<NetworkLink>,
    pub component_types: Vec<ComponentType>,
    pub connector_types: Vec<ConnectorType>,
    pub configurations: Vec<Configuration>,
    pub families: Vec<Family>,
    pub thresholds: Option<Thresholds>,
}

impl Model {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn device(&self, name: &str) -> Option<&Device> {
        self.devices.iter().find(|d| d.name == name)
    }

    pub fn link(&self, name: &str) -> Option<&NetworkLink> {
        self.links.iter().find(|l| l.name == name)
    }

    /// First declared link joining two distinct devices.
    pub fn link_between(&self, a: &str, b: &str) -> Option<&NetworkLink> {
        self.links.iter().find(|l| l.joins(a, b))
    }

    pub fn component_type(&self, name: &str) -> Option<&ComponentType> {
        self.component_types.iter().find(|c| c.name == name)
    }

    pub fn connector_type(&self, name: &str) -> Option<&ConnectorType> {
        self.connector_types.iter().find(|c| c.name == name)
    }

    /// Component types shadow connector types of the same name.
    pub fn artifact_type(&self, name: &str) -> Option<ArtifactType<'_>> {
        self.component_type(name)
            .map(ArtifactType::Component)
            .or_else(|| self.connector_type(name).map(ArtifactType::Connector))
    }

    pub fn type_of(&self, instance: &ArtifactInstance) -> Option<ArtifactType<'_>> {
        self.artifact_type(&instance.type_ref)
    }

    /// The resolved active service of an instance, if it has one.
    pub fn active_service(&self, instance: &ArtifactInstance) -> Option<&ServiceProfile> {
        let service = instance.active_service.as_deref()?;
        self.type_of(instance)?.service(service)
    }

    pub fn configuration(&self, name: &str) -> Option<&Configuration> {
        self.configurations.iter().find(|c| c.name == name)
    }

    pub fn family(&self, name: &str) -> Option<&Family> {
        self.families.iter().find(|f| f.name == name)
    }

    /// First declared family listing `config` as a member.
    pub fn family_of(&self, config: &str) -> Option<&Family> {
        self.families
            .iter()
            .find(|f| f.members.iter().any(|m| m == config))
    }

    pub fn is_component(&self, config: &Configuration, instance: &str) -> bool {
        config
            .instance(instance)
            .and_then(|i| self.type_of(i))
            .is_some_and(|t| t.is_component())
    }
}
