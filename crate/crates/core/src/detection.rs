//! Threshold detectors: a click for one or more photons, no number resolution.
//!
//! Each photon is registered independently with efficiency η, so `n`
//! incident photons click with probability `1 − (1−η)ⁿ`. For two photons this
//! is `2η − η²`.

use crate::error::{domain, Result};
use crate::fock::{OccupationDist, PhotonicState, Port};

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorSpec {
    pub name: String,
    pub port: Port,
    pub efficiency: f64,
}

impl DetectorSpec {
    pub fn new(name: impl Into<String>, port: impl Into<Port>, efficiency: f64) -> Result<Self> {
        check_efficiency(efficiency)?;
        Ok(DetectorSpec {
            name: name.into(),
            port: port.into(),
            efficiency,
        })
    }
}

fn check_efficiency(efficiency: f64) -> Result<()> {
    if (0.0..=1.0).contains(&efficiency) {
        Ok(())
    } else {
        domain(format!("detector efficiency {efficiency} outside [0, 1]"))
    }
}

/// Probability that `n` photons produce at least one click.
pub fn click_given(n: usize, efficiency: f64) -> f64 {
    1.0 - (1.0 - efficiency).powi(n as i32)
}

pub fn click_probability(dist: &OccupationDist, efficiency: f64) -> Result<f64> {
    check_efficiency(efficiency)?;
    Ok((1..=2)
        .map(|n| dist.get(n) * click_given(n, efficiency))
        .sum())
}

pub fn singles_probability(state: &PhotonicState, detector: &DetectorSpec) -> Result<f64> {
    let dist = state.occupation_distribution(&detector.port)?;
    click_probability(&dist, detector.efficiency)
}

/// Probability that both detectors click for one pair emission.
pub fn coincidence_probability(
    state: &PhotonicState,
    det_a: &DetectorSpec,
    det_b: &DetectorSpec,
) -> Result<f64> {
    if det_a.port == det_b.port {
        return domain(format!(
            "coincidence detectors {} and {} share port {}",
            det_a.name, det_b.name, det_a.port
        ));
    }
    check_efficiency(det_a.efficiency)?;
    check_efficiency(det_b.efficiency)?;
    let joint = state.joint_distribution(&det_a.port, &det_b.port)?;
    let mut acc = 0.0;
    for na in 1..=2 {
        for nb in 1..=2 {
            acc += joint.get(na, nb)
                * click_given(na, det_a.efficiency)
                * click_given(nb, det_b.efficiency);
        }
    }
    Ok(acc)
}
