use crate::model::{Configuration, Model, Resource};
use crate::resources::{flows, ContextSnapshot, ResourceLevels, SnapshotLevels};

use super::MetricError;

/// Time behaviour of one artifact instance, in milliseconds.
///
/// Compute time `1000 * cpu_demand / cpu_available` on its device plus
/// transfer time `1000 * output_rate / bandwidth` over the slowest link its
/// outgoing data crosses. Device-local output costs nothing.
pub fn tb_artifact(
    model: &Model,
    config: &Configuration,
    instance: &str,
    ctx: &ContextSnapshot,
) -> Result<f64, MetricError> {
    let inst = config
        .instance(instance)
        .ok_or_else(|| MetricError::UnknownInstance(instance.to_string()))?;
    let device = config
        .device_of(instance)
        .ok_or_else(|| MetricError::NotDeployed(instance.to_string()))?;
    let Some(service) = model.active_service(inst) else {
        return Ok(0.0);
    };
    let levels = SnapshotLevels::new(model, ctx);

    let mut tb = 0.0;
    if service.cpu_demand > 0.0 {
        let cpu = levels.device_level(Some(device), Resource::Cpu);
        if cpu <= 0.0 {
            return Err(MetricError::ZeroResource {
                instance: instance.to_string(),
                resource: Resource::Cpu,
            });
        }
        tb += 1000.0 * service.cpu_demand / cpu;
    }

    if service.output_rate > 0.0 {
        let mut slowest: Option<f64> = None;
        for f in flows(model, config)
            .iter()
            .filter(|f| f.producer == instance && f.crosses)
        {
            let link = f.link.ok_or_else(|| MetricError::NoRoute {
                from: device.to_string(),
                to: config.device_of(f.consumer).unwrap_or_default().to_string(),
            })?;
            let bw = levels.link_bandwidth(link);
            slowest = Some(slowest.map_or(bw, |s| s.min(bw)));
        }
        if let Some(bw) = slowest {
            if bw <= 0.0 {
                return Err(MetricError::ZeroResource {
                    instance: instance.to_string(),
                    resource: Resource::Bandwidth,
                });
            }
            tb += 1000.0 * service.output_rate / bw;
        }
    }
    Ok(tb)
}

/// Weighted sum of per-artifact time behaviour over every instance.
pub fn tbm(model: &Model, config: &Configuration, ctx: &ContextSnapshot) -> Result<f64, MetricError> {
    config.instances.iter().try_fold(0.0, |acc, inst| {
        Ok(acc + config.weight_of(&inst.name) * tb_artifact(model, config, &inst.name, ctx)?)
    })
}
