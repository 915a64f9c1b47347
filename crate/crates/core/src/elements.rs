//! Linear optical elements acting on [`PhotonicState`] mode labels.
//!
//! Every element except [`Element::Delay`] is a single-photon unitary on the
//! `(port, polarization)` space that leaves temporal indices alone; the
//! two-photon action is its tensor square.
//!
//! Beamsplitter convention: `a† → (a† + i·b†)/√2`, `b† → (i·a† + b†)/√2`.
//! Half-wave plate at axis angle θ: `H → cos2θ·H + sin2θ·V`,
//! `V → sin2θ·H − cos2θ·V`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::detection::DetectorSpec;
use crate::error::{configuration, domain, Result};
use crate::fock::{checked_overlap, ModeLabel, PhotonicState, Polarization, Port, PortKind};

#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    /// Lossless 50/50 splitter mixing ports `a` and `b`.
    Beamsplitter {
        a: Port,
        b: Port,
    },
    HalfWavePlate {
        port: Port,
        angle_deg: f64,
    },
    /// Ideal linear polarizer; the rejected component is routed to `environment`.
    Polarizer {
        port: Port,
        angle_deg: f64,
        environment: Port,
    },
    PolarizingBeamsplitter {
        input: Port,
        h_out: Port,
        v_out: Port,
    },
    PhasePlate {
        port: Port,
        pol: Polarization,
        phase_rad: f64,
    },
    /// Moves photons at `port` onto a wavepacket whose overlap with temporal mode 0 is `overlap`.
    Delay {
        port: Port,
        overlap: Complex64,
    },
}

impl Element {
    pub fn ports(&self) -> Vec<&Port> {
        match self {
            Element::Beamsplitter { a, b } => vec![a, b],
            Element::HalfWavePlate { port, .. }
            | Element::PhasePlate { port, .. }
            | Element::Delay { port, .. } => vec![port],
            Element::Polarizer {
                port, environment, ..
            } => vec![port, environment],
            Element::PolarizingBeamsplitter {
                input,
                h_out,
                v_out,
            } => vec![input, h_out, v_out],
        }
    }

    pub fn apply(&self, state: &PhotonicState) -> Result<PhotonicState> {
        match self {
            Element::Beamsplitter { a, b } => apply_beamsplitter(state, a, b),
            Element::HalfWavePlate { port, angle_deg } => apply_hwp(state, port, *angle_deg),
            Element::Polarizer {
                port,
                angle_deg,
                environment,
            } => apply_polarizer(state, port, *angle_deg, environment),
            Element::PolarizingBeamsplitter {
                input,
                h_out,
                v_out,
            } => apply_pbs(state, input, h_out, v_out),
            Element::PhasePlate {
                port,
                pol,
                phase_rad,
            } => apply_phase(state, port, *pol, *phase_rad),
            Element::Delay { port, overlap } => apply_delay(state, port, *overlap),
        }
    }

    /// Image of one creation operator under this element.
    ///
    /// Returns `None` for [`Element::Delay`], which acts on the temporal
    /// Gram matrix rather than as a fixed mode map.
    pub fn transfer(&self, label: &ModeLabel) -> Option<Vec<(ModeLabel, Complex64)>> {
        let out = match self {
            Element::Beamsplitter { a, b } => beamsplitter_image(label, a, b),
            Element::HalfWavePlate { port, angle_deg } => hwp_image(label, port, *angle_deg),
            Element::Polarizer {
                port,
                angle_deg,
                environment,
            } => polarizer_image(label, port, *angle_deg, environment),
            Element::PolarizingBeamsplitter {
                input,
                h_out,
                v_out,
            } => vec![(pbs_image(label, input, h_out, v_out), one())],
            Element::PhasePlate {
                port,
                pol,
                phase_rad,
            } => {
                if &label.port == port && label.pol == *pol {
                    vec![(label.clone(), Complex64::from_polar(1.0, *phase_rad))]
                } else {
                    vec![(label.clone(), one())]
                }
            }
            Element::Delay { .. } => return None,
        };
        Some(out)
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn at(label: &ModeLabel, port: &Port, pol: Polarization) -> ModeLabel {
    ModeLabel {
        port: port.clone(),
        pol,
        temporal: label.temporal,
    }
}

fn beamsplitter_image(label: &ModeLabel, a: &Port, b: &Port) -> Vec<(ModeLabel, Complex64)> {
    let t = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let r = Complex64::new(0.0, FRAC_1_SQRT_2);
    if &label.port == a {
        vec![(label.clone(), t), (at(label, b, label.pol), r)]
    } else if &label.port == b {
        vec![(at(label, a, label.pol), r), (label.clone(), t)]
    } else {
        vec![(label.clone(), one())]
    }
}

fn hwp_image(label: &ModeLabel, port: &Port, angle_deg: f64) -> Vec<(ModeLabel, Complex64)> {
    if &label.port != port {
        return vec![(label.clone(), one())];
    }
    let (s, c) = (2.0 * angle_deg.to_radians()).sin_cos();
    let (h, v) = match label.pol {
        Polarization::H => (c, s),
        Polarization::V => (s, -c),
    };
    vec![
        (at(label, port, Polarization::H), Complex64::new(h, 0.0)),
        (at(label, port, Polarization::V), Complex64::new(v, 0.0)),
    ]
}

/// Rotated-basis routing: the component along the transmission axis stays
/// on its port, the orthogonal component swaps between `port` and `environment`.
fn polarizer_image(
    label: &ModeLabel,
    port: &Port,
    angle_deg: f64,
    environment: &Port,
) -> Vec<(ModeLabel, Complex64)> {
    let other = if &label.port == port {
        environment
    } else if &label.port == environment {
        port
    } else {
        return vec![(label.clone(), one())];
    };
    let (s, c) = angle_deg.to_radians().sin_cos();
    // Projections of the incoming polarization on the pass axis (c, s) and the blocked axis (-s, c).
    let (pass, block) = match label.pol {
        Polarization::H => (c, -s),
        Polarization::V => (s, c),
    };
    vec![
        (
            at(label, &label.port, Polarization::H),
            Complex64::new(pass * c, 0.0),
        ),
        (
            at(label, &label.port, Polarization::V),
            Complex64::new(pass * s, 0.0),
        ),
        (
            at(label, other, Polarization::H),
            Complex64::new(-block * s, 0.0),
        ),
        (
            at(label, other, Polarization::V),
            Complex64::new(block * c, 0.0),
        ),
    ]
}

fn pbs_image(label: &ModeLabel, input: &Port, h_out: &Port, v_out: &Port) -> ModeLabel {
    let target = match label.pol {
        Polarization::H => h_out,
        Polarization::V => v_out,
    };
    if &label.port == input {
        at(label, target, label.pol)
    } else if &label.port == target {
        at(label, input, label.pol)
    } else {
        label.clone()
    }
}

fn require(state: &PhotonicState, port: &Port) -> Result<PortKind> {
    state.require_port(port)
}

fn map_with(state: &PhotonicState, element: &Element) -> PhotonicState {
    let temporal = state.temporal_modes().clone();
    state.map_photons(temporal, |label| {
        element.transfer(label).expect("mode-map element")
    })
}

pub fn apply_beamsplitter(
    state: &PhotonicState,
    port_a: &Port,
    port_b: &Port,
) -> Result<PhotonicState> {
    require(state, port_a)?;
    require(state, port_b)?;
    if port_a == port_b {
        return domain(format!(
            "beamsplitter ports must differ, got {port_a} twice"
        ));
    }
    let element = Element::Beamsplitter {
        a: port_a.clone(),
        b: port_b.clone(),
    };
    Ok(map_with(state, &element))
}

pub fn apply_hwp(state: &PhotonicState, port: &Port, angle_deg: f64) -> Result<PhotonicState> {
    require(state, port)?;
    if !angle_deg.is_finite() {
        return domain("wave-plate angle must be finite");
    }
    let element = Element::HalfWavePlate {
        port: port.clone(),
        angle_deg,
    };
    Ok(map_with(state, &element))
}

pub fn apply_polarizer(
    state: &PhotonicState,
    port: &Port,
    angle_deg: f64,
    environment: &Port,
) -> Result<PhotonicState> {
    require(state, port)?;
    if !angle_deg.is_finite() {
        return domain("polarizer angle must be finite");
    }
    match state.port_kind(environment) {
        Some(PortKind::Environment) => {}
        Some(PortKind::Ordinary) => {
            return configuration(format!(
                "polarizer sink {environment} is not an environment port"
            ))
        }
        None => {
            return configuration(format!(
                "polarizer on {port} has no environment port {environment}"
            ))
        }
    }
    let element = Element::Polarizer {
        port: port.clone(),
        angle_deg,
        environment: environment.clone(),
    };
    Ok(map_with(state, &element))
}

pub fn apply_pbs(
    state: &PhotonicState,
    input: &Port,
    h_out: &Port,
    v_out: &Port,
) -> Result<PhotonicState> {
    for port in [input, h_out, v_out] {
        require(state, port)?;
    }
    if h_out == v_out {
        return domain(format!("PBS outputs collide on {h_out}"));
    }
    let element = Element::PolarizingBeamsplitter {
        input: input.clone(),
        h_out: h_out.clone(),
        v_out: v_out.clone(),
    };
    Ok(map_with(state, &element))
}

pub fn apply_phase(
    state: &PhotonicState,
    port: &Port,
    pol: Polarization,
    phase_rad: f64,
) -> Result<PhotonicState> {
    require(state, port)?;
    if !phase_rad.is_finite() {
        return domain("phase must be finite");
    }
    let element = Element::PhasePlate {
        port: port.clone(),
        pol,
        phase_rad,
    };
    Ok(map_with(state, &element))
}

/// Reassigns the wavepacket of every photon at `port`.
///
/// The new wavepacket `ψ = v·φ₀ + √(1−|v|²)·φ_⊥` has overlap `v` with the
/// reference mode 0 and `v·⟨φⱼ|φ₀⟩` with every other existing mode. All
/// photons at the port must share one temporal mode.
pub fn apply_delay(
    state: &PhotonicState,
    port: &Port,
    new_overlap: Complex64,
) -> Result<PhotonicState> {
    require(state, port)?;
    let overlap = checked_overlap(new_overlap)?;
    let present = state.temporal_modes_at(port);
    let old = match present.len() {
        0 => return Ok(state.clone()),
        1 => *present.first().unwrap(),
        _ => {
            return domain(format!(
                "delay on {port}: photons occupy {} distinct temporal modes",
                present.len()
            ))
        }
    };
    let mut temporal = state.temporal_modes().clone();
    let new = temporal.push_displaced(0, overlap);
    Ok(state.relabel(temporal, |label| {
        if &label.port == port && label.temporal == old {
            ModeLabel {
                temporal: new,
                ..label.clone()
            }
        } else {
            label.clone()
        }
    }))
}

/// An ordered element list with declared ports and detector placements.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    ports: BTreeMap<Port, PortKind>,
    elements: Vec<Element>,
    detectors: Vec<DetectorSpec>,
}

impl Circuit {
    pub fn new() -> Self {
        Circuit::default()
    }

    pub fn with_port(mut self, port: impl Into<Port>, kind: PortKind) -> Result<Self> {
        let port = port.into();
        if let Some(existing) = self.ports.get(&port) {
            if *existing != kind {
                return configuration(format!("port {port} declared twice with different kinds"));
            }
        }
        self.ports.insert(port, kind);
        Ok(self)
    }

    pub fn with_element(mut self, element: Element) -> Result<Self> {
        for port in element.ports() {
            if !self.ports.contains_key(port) {
                return configuration(format!(
                    "element {element:?} references undeclared port {port}"
                ));
            }
        }
        match &element {
            Element::Polarizer {
                port, environment, ..
            } => {
                if self.ports.get(environment) != Some(&PortKind::Environment) {
                    return configuration(format!(
                        "polarizer on {port} needs {environment} declared as an environment port"
                    ));
                }
                if port == environment {
                    return configuration("polarizer port and environment port coincide");
                }
            }
            Element::PolarizingBeamsplitter { h_out, v_out, .. } if h_out == v_out => {
                return domain(format!("PBS outputs collide on {h_out}"));
            }
            Element::Beamsplitter { a, b } if a == b => {
                return domain(format!("beamsplitter ports must differ, got {a} twice"));
            }
            _ => {}
        }
        self.elements.push(element);
        Ok(self)
    }

    pub fn with_detector(mut self, detector: DetectorSpec) -> Result<Self> {
        match self.ports.get(&detector.port) {
            Some(PortKind::Ordinary) => {}
            Some(PortKind::Environment) => {
                return configuration(format!(
                    "detector {} sits on environment port {}",
                    detector.name, detector.port
                ))
            }
            None => {
                return configuration(format!(
                    "detector {} on undeclared port {}",
                    detector.name, detector.port
                ))
            }
        }
        if self.detectors.iter().any(|d| d.name == detector.name) {
            return configuration(format!("duplicate detector name {}", detector.name));
        }
        self.detectors.push(detector);
        Ok(self)
    }

    pub fn ports(&self) -> impl Iterator<Item = (&Port, PortKind)> {
        self.ports.iter().map(|(p, k)| (p, *k))
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn detectors(&self) -> &[DetectorSpec] {
        &self.detectors
    }

    /// Index pairs `(i, j)`, `i < j`, of detectors whose coincidences are reported.
    pub fn detector_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.detectors.len();
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect()
    }

    /// Declares this circuit's ports on `input`.
    pub fn prepare(&self, input: &PhotonicState) -> Result<PhotonicState> {
        let mut state = input.clone();
        for (port, kind) in &self.ports {
            state = state.declare_port(port.clone(), *kind)?;
        }
        Ok(state)
    }

    pub fn run(&self, input: &PhotonicState) -> Result<PhotonicState> {
        self.elements
            .iter()
            .try_fold(self.prepare(input)?, |state, element| element.apply(&state))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::fock::make_pair_state;
    use Polarization::{H, V};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn single_photon_like(port: &str, pol: Polarization) -> PhotonicState {
        // A spectator photon parked on its own port stands in for vacuum elsewhere.
        make_pair_state(port, pol, "spectator", H, c(0.0)).unwrap()
    }

    fn p(name: &str) -> Port {
        Port::new(name)
    }

    fn mean_at(state: &PhotonicState, port: &str) -> f64 {
        state.occupation_distribution(&p(port)).unwrap().mean()
    }

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn beamsplitter_single_photon_has_relative_phase_i() {
        let s = single_photon_like("a", H)
            .declare_port("b", PortKind::Ordinary)
            .unwrap();
        let out = apply_beamsplitter(&s, &p("a"), &p("b")).unwrap();
        let spect = ModeLabel::new("spectator", H, 1);
        let amp_a = out.amplitude(&ModeLabel::new("a", H, 0), &spect);
        let amp_b = out.amplitude(&ModeLabel::new("b", H, 0), &spect);
        assert_close(amp_a.norm_sqr(), 0.5);
        assert_close(amp_b.norm_sqr(), 0.5);
        assert!((amp_b / amp_a - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn beamsplitter_bunches_indistinguishable_pair() {
        let s = make_pair_state("a", H, "b", H, c(1.0)).unwrap();
        let out = apply_beamsplitter(&s, &p("a"), &p("b")).unwrap();
        let orth = out.orthonormalize().unwrap();
        let a = ModeLabel::new("a", H, 0);
        let b = ModeLabel::new("b", H, 0);
        assert!(orth.amplitude(&a, &b).norm() < 1e-15);
        assert_close(orth.amplitude(&a, &a).norm_sqr(), 0.5);
        assert_close(orth.amplitude(&b, &b).norm_sqr(), 0.5);
        assert!((orth.amplitude(&a, &a) / orth.amplitude(&b, &b)).norm() - 1.0 < 1e-12);
    }

    #[test]
    fn beamsplitter_orthogonal_pair_routes_independently() {
        for v in [0.0, 0.4, 1.0] {
            let s = make_pair_state("a", H, "b", V, c(v)).unwrap();
            let out = apply_beamsplitter(&s, &p("a"), &p("b")).unwrap();
            let j = out.joint_distribution(&p("a"), &p("b")).unwrap();
            assert_close(j.get(2, 0), 0.25);
            assert_close(j.get(0, 2), 0.25);
            assert_close(j.get(1, 1), 0.5);
        }
    }

    #[test]
    fn hwp_rotations() {
        let s = single_photon_like("a", H);
        let rotated = apply_hwp(&s, &p("a"), 45.0).unwrap();
        let spect = ModeLabel::new("spectator", H, 1);
        assert_close(
            rotated
                .amplitude(&ModeLabel::new("a", V, 0), &spect)
                .norm_sqr(),
            1.0,
        );

        let half = apply_hwp(&s, &p("a"), 22.5).unwrap();
        assert_close(
            half.amplitude(&ModeLabel::new("a", H, 0), &spect).re,
            FRAC_1_SQRT_2,
        );
        assert_close(
            half.amplitude(&ModeLabel::new("a", V, 0), &spect).re,
            FRAC_1_SQRT_2,
        );

        let v = single_photon_like("a", V);
        let same = apply_hwp(&v, &p("a"), 0.0).unwrap();
        assert_close(same.amplitude(&ModeLabel::new("a", V, 0), &spect).re, -1.0);
    }

    #[test]
    fn polarizer_passes_half_of_h_at_45() {
        let s = single_photon_like("a", H)
            .declare_port("env", PortKind::Environment)
            .unwrap();
        let out = apply_polarizer(&s, &p("a"), 45.0, &p("env")).unwrap();
        assert_close(mean_at(&out, "a"), 0.5);
        assert_close(mean_at(&out, "env"), 0.5);
    }

    #[test]
    fn polarizer_pair_statistics_follow_overlap() {
        for (v, expected) in [(1.0, [0.5, 0.0, 0.5]), (0.0, [0.25, 0.5, 0.25])] {
            let s = make_pair_state("a", H, "a", V, c(v))
                .unwrap()
                .declare_port("env", PortKind::Environment)
                .unwrap();
            let out = apply_polarizer(&s, &p("a"), 45.0, &p("env")).unwrap();
            let d = out.occupation_distribution(&p("a")).unwrap();
            for (n, e) in expected.iter().enumerate() {
                assert_close(d.get(n), *e);
            }
        }
    }

    #[test]
    fn polarizer_requires_environment_port() {
        let s = single_photon_like("a", H);
        assert!(matches!(
            apply_polarizer(&s, &p("a"), 45.0, &p("env")),
            Err(Error::Configuration(_))
        ));
        let s = s.declare_port("b", PortKind::Ordinary).unwrap();
        assert!(matches!(
            apply_polarizer(&s, &p("a"), 45.0, &p("b")),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn pbs_routing() {
        let base = |pol| {
            single_photon_like("in", pol)
                .declare_port("h", PortKind::Ordinary)
                .unwrap()
                .declare_port("v", PortKind::Ordinary)
                .unwrap()
        };
        let out = apply_pbs(&base(H), &p("in"), &p("h"), &p("v")).unwrap();
        assert_close(mean_at(&out, "h"), 1.0);

        let diag = apply_hwp(&base(H), &p("in"), 22.5).unwrap();
        let out = apply_pbs(&diag, &p("in"), &p("h"), &p("v")).unwrap();
        assert_close(mean_at(&out, "h"), 0.5);
        assert_close(mean_at(&out, "v"), 0.5);

        let pair = make_pair_state("in", H, "in", V, c(0.3))
            .unwrap()
            .declare_port("h", PortKind::Ordinary)
            .unwrap()
            .declare_port("v", PortKind::Ordinary)
            .unwrap();
        let out = apply_pbs(&pair, &p("in"), &p("h"), &p("v")).unwrap();
        assert_close(
            out.joint_distribution(&p("h"), &p("v")).unwrap().get(1, 1),
            1.0,
        );

        assert!(matches!(
            apply_pbs(&pair, &p("in"), &p("h"), &p("h")),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn phase_composes_additively() {
        let s = make_pair_state("a", H, "b", V, c(0.7)).unwrap();
        let twice =
            apply_phase(&apply_phase(&s, &p("a"), H, 0.4).unwrap(), &p("a"), H, 0.4).unwrap();
        let once = apply_phase(&s, &p("a"), H, 0.8).unwrap();
        for ((pair, amp), (pair2, amp2)) in twice.terms().zip(once.terms()) {
            assert_eq!(pair, pair2);
            assert!((amp - amp2).norm() < 1e-14);
        }
        assert_eq!(apply_phase(&s, &p("a"), H, 0.0).unwrap(), s);
    }

    #[test]
    fn phase_on_doubly_occupied_mode_doubles() {
        let s = make_pair_state("a", H, "a", H, c(1.0))
            .unwrap()
            .orthonormalize()
            .unwrap();
        let out = apply_phase(&s, &p("a"), H, 0.3).unwrap();
        let x = ModeLabel::new("a", H, 0);
        let ratio = out.amplitude(&x, &x) / s.amplitude(&x, &x);
        assert!((ratio - Complex64::from_polar(1.0, 0.6)).norm() < 1e-14);
    }

    #[test]
    fn delay_sets_overlap_and_coincidence() {
        for v in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let s = make_pair_state("a", H, "b", H, c(1.0)).unwrap();
            let delayed = apply_delay(&s, &p("b"), c(v)).unwrap();
            assert!((delayed.norm_sqr() - 1.0).abs() < 1e-12);
            let out = apply_beamsplitter(&delayed, &p("a"), &p("b")).unwrap();
            let j = out.joint_distribution(&p("a"), &p("b")).unwrap();
            assert_close(j.get(1, 1), (1.0 - v * v) / 2.0);
        }
    }

    #[test]
    fn delay_rejects_mixed_temporal_modes() {
        let s = make_pair_state("a", H, "b", H, c(0.5)).unwrap();
        let mixed = apply_beamsplitter(&s, &p("a"), &p("b")).unwrap();
        assert!(matches!(
            apply_delay(&mixed, &p("a"), c(0.2)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            apply_delay(&s, &p("a"), c(1.5)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn transfer_matrices_are_unitary() {
        let ports = [p("a"), p("b"), p("env")];
        let elements = [
            Element::Beamsplitter {
                a: p("a"),
                b: p("b"),
            },
            Element::HalfWavePlate {
                port: p("a"),
                angle_deg: 17.0,
            },
            Element::Polarizer {
                port: p("a"),
                angle_deg: 33.0,
                environment: p("env"),
            },
            Element::PolarizingBeamsplitter {
                input: p("a"),
                h_out: p("b"),
                v_out: p("env"),
            },
            Element::PolarizingBeamsplitter {
                input: p("a"),
                h_out: p("a"),
                v_out: p("b"),
            },
            Element::PhasePlate {
                port: p("b"),
                pol: V,
                phase_rad: 1.1,
            },
        ];
        let basis: Vec<ModeLabel> = ports
            .iter()
            .flat_map(|port| {
                [
                    ModeLabel::new(port.clone(), H, 0),
                    ModeLabel::new(port.clone(), V, 0),
                ]
            })
            .collect();
        for element in &elements {
            let columns: Vec<Vec<Complex64>> = basis
                .iter()
                .map(|input| {
                    let image = element.transfer(input).unwrap();
                    basis
                        .iter()
                        .map(|out| image.iter().filter(|(l, _)| l == out).map(|(_, a)| a).sum())
                        .collect()
                })
                .collect();
            for (i, ci) in columns.iter().enumerate() {
                for (j, cj) in columns.iter().enumerate() {
                    let dot: Complex64 = ci.iter().zip(cj).map(|(x, y)| x.conj() * y).sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (dot - c(expected)).norm() < 1e-12,
                        "{element:?} not unitary"
                    );
                }
            }
        }
    }

    #[test]
    fn circuit_rejects_unresolved_ports() {
        let circuit = Circuit::new().with_port("a", PortKind::Ordinary).unwrap();
        let err = circuit.clone().with_element(Element::Beamsplitter {
            a: p("a"),
            b: p("b"),
        });
        assert!(matches!(err, Err(Error::Configuration(_))));
        let err = circuit
            .with_port("env", PortKind::Ordinary)
            .unwrap()
            .with_element(Element::Polarizer {
                port: p("a"),
                angle_deg: 0.0,
                environment: p("env"),
            });
        assert!(matches!(err, Err(Error::Configuration(_))));
    }
}
