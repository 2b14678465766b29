//! Pure application of reconfiguration actions to configurations.

use thiserror::Error;

use super::types::{Configuration, Model};
use super::validate::{has_errors, validate_configuration, Diagnostic};
use crate::families::{Family, ReconfigurationAction, Subfamily};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ActionError {
    #[error("target missing: {0}")]
    TargetMissing(String),
    #[error("name collision: '{0}' already exists")]
    Collision(String),
    #[error("illegal move of '{instance}' to '{device}': no link to peer device '{peer}'")]
    IllegalMove {
        instance: String,
        device: String,
        peer: String,
    },
    #[error("result is not well-formed ({} error(s), first: {})", .0.len(), .0.first().map(|d| d.to_string()).unwrap_or_default())]
    IllFormed(Vec<Diagnostic>),
}

/// Applies actions in the scope of a model and, optionally, one family whose
/// subfamilies take precedence when resolving subfamily names.
#[derive(Debug, Clone, Copy)]
pub struct Reconfigurer<'m> {
    model: &'m Model,
    family: Option<&'m Family>,
}

/// The artifacts a subfamily attaches or detaches: the instances common (by
/// name and type) to all of its members, taken from its first member together
/// with their deployments, buffers, weights and attachments.
pub fn subfamily_fragment(model: &Model, subfamily: &Subfamily) -> Option<Configuration> {
    let configs: Vec<&Configuration> = subfamily
        .members
        .iter()
        .map(|m| model.configuration(m))
        .collect::<Option<_>>()?;
    let (first, rest) = configs.split_first()?;
    let mut fragment = Configuration::new(subfamily.name.clone(), first.level);
    fragment.instances = first
        .instances
        .iter()
        .filter(|i| {
            rest.iter().all(|c| {
                c.instance(&i.name)
                    .is_some_and(|other| other.type_ref == i.type_ref)
            })
        })
        .cloned()
        .collect();
    let inside = |n: &str| fragment.instances.iter().any(|i| i.name == n);
    let deployments = first
        .deployments
        .iter()
        .filter(|d| inside(&d.instance))
        .cloned()
        .collect();
    let buffers = first
        .buffers
        .iter()
        .filter(|b| inside(&b.owner))
        .cloned()
        .collect();
    let weights = first
        .weights
        .iter()
        .filter(|(n, _)| inside(n))
        .cloned()
        .collect();
    let attachments = first
        .attachments
        .iter()
        .filter(|a| inside(&a.component) || inside(&a.connector))
        .cloned()
        .collect();
    fragment.deployments = deployments;
    fragment.buffers = buffers;
    fragment.weights = weights;
    fragment.attachments = attachments;
    Some(fragment)
}

impl<'m> Reconfigurer<'m> {
    pub fn new(model: &'m Model, family: Option<&'m Family>) -> Self {
        Self { model, family }
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn subfamily(&self, name: &str) -> Option<&'m Subfamily> {
        self.family
            .and_then(|f| f.subfamily(name))
            .or_else(|| self.model.families.iter().find_map(|f| f.subfamily(name)))
    }

    pub fn fragment(&self, subfamily: &str) -> Option<Configuration> {
        subfamily_fragment(self.model, self.subfamily(subfamily)?)
    }

    /// Applies one action and checks the result against the catalog.
    pub fn apply(
        &self,
        config: &Configuration,
        action: &ReconfigurationAction,
    ) -> Result<Configuration, ActionError> {
        self.apply_all(config, std::slice::from_ref(action))
    }

    /// Applies a sequence all-or-nothing; well-formedness is checked on the
    /// final result only.
    pub fn apply_all(
        &self,
        config: &Configuration,
        actions: &[ReconfigurationAction],
    ) -> Result<Configuration, ActionError> {
        let mut out = config.clone();
        for action in actions {
            self.step(&mut out, action)?;
        }
        let diagnostics: Vec<Diagnostic> = validate_configuration(self.model, &out)
            .into_iter()
            .filter(Diagnostic::is_error)
            .collect();
        if has_errors(&diagnostics) {
            return Err(ActionError::IllFormed(diagnostics));
        }
        Ok(out)
    }

    fn step(&self, config: &mut Configuration, action: &ReconfigurationAction) -> Result<(), ActionError> {
        use ReconfigurationAction::*;
        let missing = |what: String| ActionError::TargetMissing(what);
        match action {
            ParamUpdate {
                instance,
                param,
                value,
            } => {
                let inst = config
                    .instance_mut(instance)
                    .ok_or_else(|| missing(format!("instance '{instance}'")))?;
                inst.parameter_overrides.insert(param.clone(), value.clone());
            }
            AddService { instance, service } => {
                let model = self.model;
                let inst = config
                    .instance_mut(instance)
                    .ok_or_else(|| missing(format!("instance '{instance}'")))?;
                let ty = model
                    .type_of(inst)
                    .ok_or_else(|| missing(format!("type '{}'", inst.type_ref)))?;
                if ty.service(service).is_none() {
                    return Err(missing(format!("service '{service}' of '{}'", ty.name())));
                }
                if let Some(active) = &inst.active_service {
                    return Err(ActionError::Collision(format!("{instance}.{active}")));
                }
                inst.active_service = Some(service.clone());
            }
            RemoveService { instance, service } => {
                let inst = config
                    .instance_mut(instance)
                    .ok_or_else(|| missing(format!("instance '{instance}'")))?;
                if inst.active_service.as_deref() != Some(service) {
                    return Err(missing(format!("active service '{instance}.{service}'")));
                }
                inst.active_service = None;
            }
            SubstituteService { instance, from, to } => {
                let model = self.model;
                let inst = config
                    .instance_mut(instance)
                    .ok_or_else(|| missing(format!("instance '{instance}'")))?;
                if inst.active_service.as_deref() != Some(from) {
                    return Err(missing(format!("active service '{instance}.{from}'")));
                }
                let ty = model
                    .type_of(inst)
                    .ok_or_else(|| missing(format!("type '{}'", inst.type_ref)))?;
                if ty.service(to).is_none() {
                    return Err(missing(format!("service '{to}' of '{}'", ty.name())));
                }
                inst.active_service = Some(to.clone());
            }
            Move { instance, device } => {
                if config.instance(instance).is_none() {
                    return Err(missing(format!("instance '{instance}'")));
                }
                if self.model.device(device).is_none() {
                    return Err(missing(format!("device '{device}'")));
                }
                if config.device_of(instance).is_none() {
                    return Err(missing(format!("deployment of '{instance}'")));
                }
                for a in config.attachments.iter().filter(|a| a.touches(instance)) {
                    let peer = if a.component == *instance {
                        &a.connector
                    } else {
                        &a.component
                    };
                    let Some(peer_device) = config.device_of(peer) else {
                        continue;
                    };
                    if peer_device != device && self.model.link_between(peer_device, device).is_none() {
                        return Err(ActionError::IllegalMove {
                            instance: instance.clone(),
                            device: device.clone(),
                            peer: peer_device.to_string(),
                        });
                    }
                }
                for d in config.deployments.iter_mut().filter(|d| d.instance == *instance) {
                    d.device = device.clone();
                }
            }
            AttachSubfamily { subfamily } => {
                let fragment = self
                    .fragment(subfamily)
                    .ok_or_else(|| missing(format!("subfamily '{subfamily}'")))?;
                for inst in &fragment.instances {
                    if config.instance(&inst.name).is_some() {
                        return Err(ActionError::Collision(inst.name.clone()));
                    }
                }
                config.instances.extend(fragment.instances.iter().cloned());
                for a in fragment.attachments {
                    let present = config.instance(&a.component).is_some()
                        && config.instance(&a.connector).is_some();
                    if present && !config.attachments.contains(&a) {
                        config.attachments.push(a);
                    }
                }
                config.deployments.extend(fragment.deployments);
                config.buffers.extend(fragment.buffers);
                config.weights.extend(fragment.weights);
            }
            DetachSubfamily { subfamily } => {
                let fragment = self
                    .fragment(subfamily)
                    .ok_or_else(|| missing(format!("subfamily '{subfamily}'")))?;
                for inst in &fragment.instances {
                    if config.instance(&inst.name).is_none() {
                        return Err(missing(format!("instance '{}'", inst.name)));
                    }
                }
                let gone = |n: &str| fragment.instances.iter().any(|i| i.name == n);
                config.instances.retain(|i| !gone(&i.name));
                config
                    .attachments
                    .retain(|a| !gone(&a.component) && !gone(&a.connector));
                config.deployments.retain(|d| !gone(&d.instance));
                config.buffers.retain(|b| !gone(&b.owner));
                config.weights.retain(|(n, _)| !gone(n));
            }
        }
        Ok(())
    }
}

/// Applies `action` to `config`, resolving subfamilies across all families.
pub fn apply_action(
    model: &Model,
    config: &Configuration,
    action: &ReconfigurationAction,
) -> Result<Configuration, ActionError> {
    Reconfigurer::new(model, None).apply(config, action)
}
