//! The four interferometer configurations, delay scans over them, and
//! curve analysis of the resulting singles and coincidence traces.
//!
//! All scenarios start from one photon in port `a` (temporal mode 0) and one
//! in port `b` (temporal mode 1). The relative delay enters only through the
//! overlap of those two wavepackets.

mod curve;
mod sampling;

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

pub use curve::{analyze_curve, fit_gaussian_feature, CurveAnalysis, GaussianFit};
pub use sampling::sample_counts;

use crate::detection::{click_given, coincidence_probability, singles_probability, DetectorSpec};
use crate::elements::{Circuit, Element};
use crate::error::{configuration, domain, Error, Result};
use crate::fock::{
    make_pair_state, ModeLabel, PhotonicState, Polarization, Port, PortKind, TemporalModeSet,
};

/// Speed of light in nm/fs.
pub const SPEED_OF_LIGHT_NM_PER_FS: f64 = 299.792458;

/// Largest tolerated drift of the squared norm after running a circuit.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

/// Phase of the deterministic source that makes both photons leave together.
pub const DETERMINISTIC_DIP_PHASE: f64 = 0.0;
/// Phase of the deterministic source that sends one photon to each output.
pub const DETERMINISTIC_PEAK_PHASE: f64 = PI;

pub mod ports {
    pub const A: &str = "a";
    pub const B: &str = "b";
    pub const C: &str = "c";
    pub const D: &str = "d";
    pub const ENV_A1: &str = "env_a1";
    pub const ENV_A2: &str = "env_a2";
}

/// Gaussian spectral filter in front of the detectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralFilter {
    pub center_nm: f64,
    pub fwhm_nm: f64,
}

impl SpectralFilter {
    pub fn new(center_nm: f64, fwhm_nm: f64) -> Result<Self> {
        coherence_time_fs(center_nm, fwhm_nm)?;
        Ok(SpectralFilter { center_nm, fwhm_nm })
    }

    pub fn coherence_time_fs(&self) -> f64 {
        coherence_time_fs(self.center_nm, self.fwhm_nm).expect("validated filter")
    }

    pub fn overlap(&self, tau_fs: f64) -> f64 {
        gaussian_overlap(tau_fs, self.coherence_time_fs())
    }
}

/// Coherence time `τ_c` of the amplitude overlap `v(τ) = exp(−τ²/(2τ_c²))`.
///
/// A Gaussian power spectrum with frequency FWHM `Δν = c·Δλ/λ0²` has
/// standard deviation `σ = Δν / (2√(2 ln 2))`. Its Fourier transform, the
/// wavepacket self-overlap, is `exp(−2π²σ²τ²)`, hence
/// `τ_c = 1/(2πσ) = √(2 ln 2) / (π·Δν)`.
pub fn coherence_time_fs(center_nm: f64, fwhm_nm: f64) -> Result<f64> {
    if !(center_nm > 0.0 && center_nm.is_finite()) {
        return domain(format!("center wavelength {center_nm} nm must be positive"));
    }
    if !(fwhm_nm > 0.0 && fwhm_nm.is_finite()) {
        return domain(format!("filter FWHM {fwhm_nm} nm must be positive"));
    }
    let delta_nu = SPEED_OF_LIGHT_NM_PER_FS * fwhm_nm / (center_nm * center_nm);
    Ok((2.0 * LN_2).sqrt() / (PI * delta_nu))
}

fn gaussian_overlap(tau_fs: f64, coherence_fs: f64) -> f64 {
    (-tau_fs * tau_fs / (2.0 * coherence_fs * coherence_fs)).exp()
}

pub fn overlap_from_delay(tau_fs: f64, center_nm: f64, fwhm_nm: f64) -> Result<f64> {
    Ok(gaussian_overlap(
        tau_fs,
        coherence_time_fs(center_nm, fwhm_nm)?,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScenarioKind {
    /// Same-polarization pair on one beamsplitter, detectors on both outputs.
    HomDip,
    /// Output `b` of the first splitter split again by HWP(22.5°) + PBS onto `c`/`d`.
    Cascade,
    /// One input rotated to V, polarizers A1/A2 in front of the two detectors.
    Bell { a1_deg: f64, a2_deg: f64 },
    /// Polarization-entangled input `(|H,V⟩ + e^{iφ}|V,H⟩)/√2` on one beamsplitter.
    Deterministic { phase_rad: f64 },
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::HomDip => "hom_dip",
            ScenarioKind::Cascade => "cascade",
            ScenarioKind::Bell { .. } => "bell",
            ScenarioKind::Deterministic { .. } => "deterministic",
        }
    }

    /// Filter defaults: 3 nm at 702.2 nm for the type-I source, 20 nm at 780 nm
    /// for the deterministic type-II source.
    pub fn default_filter(&self) -> SpectralFilter {
        match self {
            ScenarioKind::Deterministic { .. } => SpectralFilter {
                center_nm: 780.0,
                fwhm_nm: 20.0,
            },
            _ => SpectralFilter {
                center_nm: 702.2,
                fwhm_nm: 3.0,
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let angle_ok = |deg: f64| deg.is_finite() && deg.abs() <= 360.0;
        match *self {
            ScenarioKind::Bell { a1_deg, a2_deg } if !(angle_ok(a1_deg) && angle_ok(a2_deg)) => {
                configuration(format!(
                    "polarizer angles {a1_deg}°/{a2_deg}° must lie in [-360, 360]"
                ))
            }
            ScenarioKind::Deterministic { phase_rad }
                if !(phase_rad.is_finite() && phase_rad.abs() <= 4.0 * PI) =>
            {
                configuration(format!("phase {phase_rad} rad must lie in [-4π, 4π]"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Efficiencies of the two detectors, in placement order.
    pub efficiencies: [f64; 2],
    pub filter: SpectralFilter,
}

/// Singles per detector and coincidences per detector pair at one delay.
#[derive(Clone, Debug, PartialEq)]
pub struct PointProbabilities {
    pub singles: Vec<f64>,
    pub coincidences: Vec<f64>,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, efficiencies: [f64; 2], filter: SpectralFilter) -> Result<Self> {
        kind.validate()?;
        for eta in efficiencies {
            if !(0.0..=1.0).contains(&eta) {
                return configuration(format!("detector efficiency {eta} outside [0, 1]"));
            }
        }
        SpectralFilter::new(filter.center_nm, filter.fwhm_nm)?;
        Ok(Scenario {
            kind,
            efficiencies,
            filter,
        })
    }

    /// Scenario with the kind's default filter and equal detector efficiencies.
    pub fn with_defaults(kind: ScenarioKind, efficiency: f64) -> Result<Self> {
        Scenario::new(kind, [efficiency; 2], kind.default_filter())
    }

    pub fn circuit(&self) -> Result<Circuit> {
        build_scenario(self)
    }

    pub fn detector_names(&self) -> [&'static str; 2] {
        match self.kind {
            ScenarioKind::Cascade => ["dc", "dd"],
            _ => ["da", "db"],
        }
    }

    /// Two-photon input with wavepacket overlap `overlap` between the arms.
    pub fn input_state(&self, overlap: f64) -> Result<PhotonicState> {
        use Polarization::{H, V};
        match self.kind {
            ScenarioKind::Deterministic { .. } => {
                let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                let terms = [
                    (
                        (
                            ModeLabel::new(ports::A, H, 0),
                            ModeLabel::new(ports::B, V, 1),
                        ),
                        amp,
                    ),
                    (
                        (
                            ModeLabel::new(ports::A, V, 0),
                            ModeLabel::new(ports::B, H, 1),
                        ),
                        amp,
                    ),
                ];
                PhotonicState::from_terms(
                    terms,
                    TemporalModeSet::pair(Complex64::new(overlap, 0.0))?,
                    [
                        (Port::new(ports::A), PortKind::Ordinary),
                        (Port::new(ports::B), PortKind::Ordinary),
                    ],
                )
            }
            _ => make_pair_state(ports::A, H, ports::B, H, Complex64::new(overlap, 0.0)),
        }
    }

    /// Runs the circuit at one overlap and reads out every detector.
    pub fn evaluate(&self, overlap: f64) -> Result<PointProbabilities> {
        let circuit = self.circuit()?;
        evaluate_circuit(&circuit, &self.input_state(overlap)?)
    }

    /// Closed-form singles and coincidence probabilities at overlap `v`,
    /// written out independently of the state simulation.
    pub fn predicted(&self, v: f64) -> PointProbabilities {
        let [eta_1, eta_2] = self.efficiencies;
        let v2 = v * v;
        let singles_from =
            |p1: f64, p2: f64, eta: f64| p1 * click_given(1, eta) + p2 * click_given(2, eta);
        // Photon-number distribution at one output of a same-polarization splitter.
        let hom = ((1.0 + v2) / 4.0, (1.0 - v2) / 2.0, (1.0 + v2) / 4.0);
        match self.kind {
            ScenarioKind::HomDip => PointProbabilities {
                singles: vec![
                    singles_from(hom.1, hom.2, eta_1),
                    singles_from(hom.1, hom.2, eta_2),
                ],
                coincidences: vec![eta_1 * eta_2 * hom.1],
            },
            ScenarioKind::Cascade => {
                // Conditional splitting at the HWP + PBS pair: P(1|1) = 1/2,
                // P(1|2) = 1/2, P(2|2) = 1/4.
                let p1 = hom.1 / 2.0 + hom.2 / 2.0;
                let p2 = hom.2 / 4.0;
                PointProbabilities {
                    singles: vec![singles_from(p1, p2, eta_1), singles_from(p1, p2, eta_2)],
                    coincidences: vec![eta_1 * eta_2 * hom.2 / 2.0],
                }
            }
            ScenarioKind::Bell { a1_deg, a2_deg } => {
                let at_polarizer = |alpha_deg: f64, eta: f64| {
                    let s2 = (2.0 * alpha_deg.to_radians()).sin().powi(2);
                    let c2 = 1.0 - s2;
                    let two_pass = s2 * (1.0 + v2) / 4.0;
                    let one_pass = v2 * c2 + (1.0 - v2) * (1.0 - s2 / 2.0);
                    singles_from(0.5 * 0.5 + 0.25 * one_pass, 0.25 * two_pass, eta)
                };
                let (sa, ca) = a1_deg.to_radians().sin_cos();
                let (sb, cb) = a2_deg.to_radians().sin_cos();
                let split =
                    0.25 * (ca * ca * sb * sb + sa * sa * cb * cb - 2.0 * ca * sb * sa * cb * v2);
                PointProbabilities {
                    singles: vec![at_polarizer(a1_deg, eta_1), at_polarizer(a2_deg, eta_2)],
                    coincidences: vec![eta_1 * eta_2 * split],
                }
            }
            ScenarioKind::Deterministic { phase_rad } => {
                let p1 = (1.0 - v2 * phase_rad.cos()) / 2.0;
                let p2 = (1.0 - p1) / 2.0;
                PointProbabilities {
                    singles: vec![singles_from(p1, p2, eta_1), singles_from(p1, p2, eta_2)],
                    coincidences: vec![eta_1 * eta_2 * p1],
                }
            }
        }
    }
}

/// Runs `circuit` on `input`, checks norm conservation, and reads out every
/// detector and detector pair.
pub fn evaluate_circuit(circuit: &Circuit, input: &PhotonicState) -> Result<PointProbabilities> {
    let output = circuit.run(input)?;
    let drift = (output.norm_sqr() - 1.0).abs();
    if drift > NORM_DRIFT_LIMIT {
        return Err(Error::Invariant(format!("norm drifted by {drift:e}")));
    }
    let detectors = circuit.detectors();
    let singles = detectors
        .iter()
        .map(|d| singles_probability(&output, d))
        .collect::<Result<Vec<_>>>()?;
    let coincidences = circuit
        .detector_pairs()
        .into_iter()
        .map(|(i, j)| coincidence_probability(&output, &detectors[i], &detectors[j]))
        .collect::<Result<Vec<_>>>()?;
    Ok(PointProbabilities {
        singles,
        coincidences,
    })
}

/// Wires the optical layout for `scenario`.
pub fn build_scenario(scenario: &Scenario) -> Result<Circuit> {
    scenario.kind.validate()?;
    let p = Port::new;
    let [eta_1, eta_2] = scenario.efficiencies;
    let [name_1, name_2] = scenario.detector_names();
    let base = Circuit::new()
        .with_port(ports::A, PortKind::Ordinary)?
        .with_port(ports::B, PortKind::Ordinary)?;
    let splitter = Element::Beamsplitter {
        a: p(ports::A),
        b: p(ports::B),
    };
    let circuit = match scenario.kind {
        ScenarioKind::HomDip => base
            .with_element(splitter)?
            .with_detector(DetectorSpec::new(name_1, ports::A, eta_1)?)?
            .with_detector(DetectorSpec::new(name_2, ports::B, eta_2)?)?,
        ScenarioKind::Cascade => base
            .with_port(ports::C, PortKind::Ordinary)?
            .with_port(ports::D, PortKind::Ordinary)?
            .with_element(splitter)?
            .with_element(Element::HalfWavePlate {
                port: p(ports::B),
                angle_deg: 22.5,
            })?
            .with_element(Element::PolarizingBeamsplitter {
                input: p(ports::B),
                h_out: p(ports::C),
                v_out: p(ports::D),
            })?
            .with_detector(DetectorSpec::new(name_1, ports::C, eta_1)?)?
            .with_detector(DetectorSpec::new(name_2, ports::D, eta_2)?)?,
        ScenarioKind::Bell { a1_deg, a2_deg } => base
            .with_port(ports::ENV_A1, PortKind::Environment)?
            .with_port(ports::ENV_A2, PortKind::Environment)?
            .with_element(Element::HalfWavePlate {
                port: p(ports::B),
                angle_deg: 45.0,
            })?
            .with_element(splitter)?
            .with_element(Element::Polarizer {
                port: p(ports::A),
                angle_deg: a1_deg,
                environment: p(ports::ENV_A1),
            })?
            .with_element(Element::Polarizer {
                port: p(ports::B),
                angle_deg: a2_deg,
                environment: p(ports::ENV_A2),
            })?
            .with_detector(DetectorSpec::new(name_1, ports::A, eta_1)?)?
            .with_detector(DetectorSpec::new(name_2, ports::B, eta_2)?)?,
        ScenarioKind::Deterministic { phase_rad } => base
            .with_element(Element::PhasePlate {
                port: p(ports::A),
                pol: Polarization::V,
                phase_rad,
            })?
            .with_element(splitter)?
            .with_detector(DetectorSpec::new(name_1, ports::A, eta_1)?)?
            .with_detector(DetectorSpec::new(name_2, ports::B, eta_2)?)?,
    };
    Ok(circuit)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RowCounts {
    pub singles: Vec<u64>,
    pub coincidences: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub tau_fs: f64,
    pub singles: Vec<f64>,
    pub coincidences: Vec<f64>,
    pub counts: Option<RowCounts>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplingInfo {
    pub pair_rate: f64,
    pub integration_time_s: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanMetadata {
    pub scenario: ScenarioKind,
    pub efficiencies: [f64; 2],
    pub filter: SpectralFilter,
    pub coherence_time_fs: f64,
    pub mode_match: f64,
    pub sampling: Option<SamplingInfo>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub detectors: Vec<String>,
    /// Detector index pairs, aligned with each row's `coincidences`.
    pub pairs: Vec<(usize, usize)>,
    pub rows: Vec<ScanRow>,
    pub metadata: ScanMetadata,
}

impl ScanResult {
    pub fn singles_curve(&self, detector: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .map(|r| (r.tau_fs, r.singles[detector]))
            .collect()
    }

    pub fn coincidence_curve(&self, pair: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .map(|r| (r.tau_fs, r.coincidences[pair]))
            .collect()
    }

    /// Sampled singles counts, or `None` before [`sample_counts`].
    pub fn singles_counts(&self, detector: usize) -> Option<Vec<(f64, f64)>> {
        self.rows
            .iter()
            .map(|r| {
                r.counts
                    .as_ref()
                    .map(|c| (r.tau_fs, c.singles[detector] as f64))
            })
            .collect()
    }

    pub fn coincidence_counts(&self, pair: usize) -> Option<Vec<(f64, f64)>> {
        self.rows
            .iter()
            .map(|r| {
                r.counts
                    .as_ref()
                    .map(|c| (r.tau_fs, c.coincidences[pair] as f64))
            })
            .collect()
    }

    pub fn pair_name(&self, pair: usize) -> String {
        let (i, j) = self.pairs[pair];
        format!("{}_{}", self.detectors[i], self.detectors[j])
    }
}

/// `steps` evenly spaced delays from `tau_min` to `tau_max` inclusive.
pub fn delay_grid(tau_min_fs: f64, tau_max_fs: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || tau_min_fs.is_nan() || tau_max_fs.is_nan() || tau_min_fs >= tau_max_fs {
        return domain(format!(
            "delay grid needs steps >= 2 and tau_min < tau_max (got {steps}, {tau_min_fs}, {tau_max_fs})"
        ));
    }
    let step = (tau_max_fs - tau_min_fs) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                tau_max_fs
            } else {
                tau_min_fs + step * i as f64
            }
        })
        .collect())
}

/// Evaluates `scenario` at every delay of `tau_grid`, using overlap
/// `mode_match · v(τ)`. Rows are computed in parallel and returned in grid order.
pub fn run_scan(scenario: &Scenario, tau_grid: &[f64], mode_match: f64) -> Result<ScanResult> {
    if tau_grid.is_empty() {
        return domain("delay grid is empty");
    }
    if tau_grid.iter().any(|t| !t.is_finite()) || tau_grid.windows(2).any(|w| w[0] >= w[1]) {
        return domain("delay grid must be finite and strictly increasing");
    }
    if !(0.0..=1.0).contains(&mode_match) {
        return domain(format!("mode_match {mode_match} outside [0, 1]"));
    }
    let circuit = scenario.circuit()?;
    let rows = tau_grid
        .par_iter()
        .map(|&tau_fs| {
            let overlap = mode_match * scenario.filter.overlap(tau_fs);
            let point = evaluate_circuit(&circuit, &scenario.input_state(overlap)?)?;
            Ok(ScanRow {
                tau_fs,
                singles: point.singles,
                coincidences: point.coincidences,
                counts: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult {
        detectors: circuit.detectors().iter().map(|d| d.name.clone()).collect(),
        pairs: circuit.detector_pairs(),
        rows,
        metadata: ScanMetadata {
            scenario: scenario.kind,
            efficiencies: scenario.efficiencies,
            filter: scenario.filter,
            coherence_time_fs: scenario.filter.coherence_time_fs(),
            mode_match,
            sampling: None,
        },
    })
}

/// Coincidence peak-dip visibility `(C_peak − C_dip)/(C_peak + C_dip)` of the
/// deterministic source at zero delay.
pub fn deterministic_visibility(
    efficiencies: [f64; 2],
    filter: SpectralFilter,
    mode_match: f64,
) -> Result<f64> {
    let coincidence = |phase_rad: f64| -> Result<f64> {
        let scenario = Scenario::new(
            ScenarioKind::Deterministic { phase_rad },
            efficiencies,
            filter,
        )?;
        Ok(scenario.evaluate(mode_match)?.coincidences[0])
    };
    let peak = coincidence(DETERMINISTIC_PEAK_PHASE)?;
    let dip = coincidence(DETERMINISTIC_DIP_PHASE)?;
    if peak + dip <= 0.0 {
        return domain("no coincidences at either phase");
    }
    Ok((peak - dip) / (peak + dip))
}

/// Bisects for the mode match that yields `target` peak-dip visibility.
pub fn mode_match_for_visibility(
    target: f64,
    efficiencies: [f64; 2],
    filter: SpectralFilter,
    tolerance: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, 1.0);
    let f = |m: f64| deterministic_visibility(efficiencies, filter, m).map(|vis| vis - target);
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return domain(format!(
            "visibility {target} is not reachable for mode_match in [0, 1]"
        ));
    }
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if f(mid)?.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn overlap_limits() {
        assert_eq!(overlap_from_delay(0.0, 702.2, 3.0).unwrap(), 1.0);
        assert!(overlap_from_delay(1e6, 702.2, 3.0).unwrap() < 1e-300);
        assert!(overlap_from_delay(10.0, 702.2, 0.0).is_err());
        assert!(overlap_from_delay(10.0, -1.0, 3.0).is_err());
    }

    #[test]
    fn coherence_time_for_three_nm_filter() {
        // Δν = c·Δλ/λ0², τ_c = √(2 ln 2)/(π Δν) evaluated by hand.
        let delta_nu = 299.792458 * 3.0 / (702.2 * 702.2);
        let expected = (2.0 * 2f64.ln()).sqrt() / (std::f64::consts::PI * delta_nu);
        assert!(close(
            coherence_time_fs(702.2, 3.0).unwrap(),
            expected,
            1e-12
        ));
        assert!(close(expected, 205.5, 0.5));
    }

    #[test]
    fn dip_depth_halves_at_root_ln2_coherence_times() {
        let tc = coherence_time_fs(702.2, 3.0).unwrap();
        let hom = Scenario::with_defaults(ScenarioKind::HomDip, 1.0).unwrap();
        let depth = |tau: f64| 0.5 - hom.evaluate(hom.filter.overlap(tau)).unwrap().coincidences[0];
        assert!(close(depth(tc * LN_2.sqrt()), 0.25, 1e-12));
        // At τ_c·√(2 ln 2) the overlap is one half, and the depth a quarter.
        let t = tc * (2.0 * LN_2).sqrt();
        assert!(close(hom.filter.overlap(t), 0.5, 1e-12));
        assert!(close(depth(t), 0.125, 1e-12));
    }

    #[test]
    fn simulation_matches_closed_forms() {
        let kinds = [
            ScenarioKind::HomDip,
            ScenarioKind::Cascade,
            ScenarioKind::Bell {
                a1_deg: 45.0,
                a2_deg: 45.0,
            },
            ScenarioKind::Bell {
                a1_deg: 45.0,
                a2_deg: -45.0,
            },
            ScenarioKind::Bell {
                a1_deg: 10.0,
                a2_deg: 70.0,
            },
            ScenarioKind::Deterministic { phase_rad: 0.0 },
            ScenarioKind::Deterministic { phase_rad: PI },
            ScenarioKind::Deterministic { phase_rad: 1.3 },
        ];
        for kind in kinds {
            let scenario = Scenario::new(kind, [0.6, 0.85], kind.default_filter()).unwrap();
            for v in [0.0, 0.3, 0.9, 1.0] {
                let sim = scenario.evaluate(v).unwrap();
                let pred = scenario.predicted(v);
                for (s, p) in sim.singles.iter().zip(&pred.singles) {
                    assert!(close(*s, *p, 1e-12), "{kind:?} v={v}: singles {s} vs {p}");
                }
                for (s, p) in sim.coincidences.iter().zip(&pred.coincidences) {
                    assert!(close(*s, *p, 1e-12), "{kind:?} v={v}: coinc {s} vs {p}");
                }
            }
        }
    }

    #[test]
    fn build_scenario_wiring() {
        let cascade = Scenario::with_defaults(ScenarioKind::Cascade, 1.0)
            .unwrap()
            .circuit()
            .unwrap();
        let ports: Vec<&str> = cascade.detectors().iter().map(|d| d.port.name()).collect();
        assert_eq!(ports, ["c", "d"]);
        let bell = Scenario::with_defaults(
            ScenarioKind::Bell {
                a1_deg: 45.0,
                a2_deg: -45.0,
            },
            1.0,
        )
        .unwrap()
        .circuit()
        .unwrap();
        assert_eq!(bell.elements().len(), 4);
        assert!(bell
            .ports()
            .any(|(p, k)| p.name() == ports::ENV_A1 && k == PortKind::Environment));
    }

    #[test]
    fn invalid_scenario_parameters() {
        let bad = Scenario::with_defaults(
            ScenarioKind::Bell {
                a1_deg: f64::NAN,
                a2_deg: 0.0,
            },
            1.0,
        );
        assert!(matches!(bad, Err(Error::Configuration(_))));
        let bad = Scenario::with_defaults(ScenarioKind::Deterministic { phase_rad: 100.0 }, 1.0);
        assert!(matches!(bad, Err(Error::Configuration(_))));
        let bad = Scenario::with_defaults(ScenarioKind::HomDip, 1.2);
        assert!(matches!(bad, Err(Error::Configuration(_))));
    }

    #[test]
    fn scan_validates_grid() {
        let s = Scenario::with_defaults(ScenarioKind::HomDip, 1.0).unwrap();
        assert!(run_scan(&s, &[], 1.0).is_err());
        assert!(run_scan(&s, &[0.0, 0.0], 1.0).is_err());
        assert!(run_scan(&s, &[1.0, 0.0], 1.0).is_err());
        assert!(run_scan(&s, &[0.0, 1.0], 1.5).is_err());
    }

    #[test]
    fn hom_scan_endpoints() {
        let eta = 0.4;
        let s = Scenario::with_defaults(ScenarioKind::HomDip, eta).unwrap();
        let tc = s.filter.coherence_time_fs();
        let grid = delay_grid(-20.0 * tc, 20.0 * tc, 41).unwrap();
        let scan = run_scan(&s, &grid, 1.0).unwrap();
        for row in [scan.rows.first().unwrap(), scan.rows.last().unwrap()] {
            assert!(close(row.singles[0], eta - eta * eta / 4.0, 1e-12));
        }
        assert!(close(
            scan.rows[20].singles[0],
            eta - eta * eta / 2.0,
            1e-12
        ));
    }

    #[test]
    fn cascade_peak_is_twice_background() {
        let s = Scenario::with_defaults(ScenarioKind::Cascade, 1.0).unwrap();
        let peak = s.evaluate(1.0).unwrap().coincidences[0];
        let bg = s.evaluate(0.0).unwrap().coincidences[0];
        assert!(close(peak, 0.25, 1e-12));
        assert!(close(peak / bg, 2.0, 1e-10));
    }

    #[test]
    fn bell_singles_agree_across_settings() {
        let dip = Scenario::with_defaults(
            ScenarioKind::Bell {
                a1_deg: 45.0,
                a2_deg: 45.0,
            },
            0.7,
        )
        .unwrap();
        let peak = Scenario::with_defaults(
            ScenarioKind::Bell {
                a1_deg: 45.0,
                a2_deg: -45.0,
            },
            0.7,
        )
        .unwrap();
        let grid = delay_grid(-600.0, 600.0, 31).unwrap();
        let (a, b) = (
            run_scan(&dip, &grid, 1.0).unwrap(),
            run_scan(&peak, &grid, 1.0).unwrap(),
        );
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert!(close(ra.singles[0], rb.singles[0], 1e-12));
        }
    }

    #[test]
    fn deterministic_phases_switch_peak_and_dip() {
        let eta = 0.8;
        let peak = Scenario::with_defaults(
            ScenarioKind::Deterministic {
                phase_rad: DETERMINISTIC_PEAK_PHASE,
            },
            eta,
        )
        .unwrap()
        .evaluate(1.0)
        .unwrap();
        let dip = Scenario::with_defaults(
            ScenarioKind::Deterministic {
                phase_rad: DETERMINISTIC_DIP_PHASE,
            },
            eta,
        )
        .unwrap()
        .evaluate(1.0)
        .unwrap();
        assert!(close(peak.singles[0], eta, 1e-12));
        assert!(close(dip.singles[0], eta - eta * eta / 2.0, 1e-12));
        assert!(close(peak.coincidences[0], eta * eta, 1e-12));
        assert!(dip.coincidences[0].abs() < 1e-12);
    }

    #[test]
    fn visibility_scales_as_mode_match_squared() {
        let filter = ScenarioKind::Deterministic { phase_rad: 0.0 }.default_filter();
        for m in [0.2, 0.5, 0.93] {
            let vis = deterministic_visibility([1.0, 1.0], filter, m).unwrap();
            assert!(close(vis, m * m, 1e-12));
        }
        let m = mode_match_for_visibility(0.87, [1.0, 1.0], filter, 1e-9).unwrap();
        assert!(close(m, 0.87f64.sqrt(), 1e-8));
    }

    #[test]
    fn delay_grid_is_inclusive() {
        let g = delay_grid(-3.0, 3.0, 7).unwrap();
        assert_eq!(g, vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert!(delay_grid(0.0, 1.0, 1).is_err());
        assert!(delay_grid(1.0, 0.0, 3).is_err());
    }
}
