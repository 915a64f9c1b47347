//! Brute-force reference engine for circuit statistics.
//!
//! Every input photon is pushed through the element list one branch at a
//! time, recording each complete single-photon path. Pairs of paths give
//! two-photon path amplitudes; these are projected onto an orthonormal
//! temporal basis obtained by eigendecomposition of the Gram matrix, then
//! squared. Nothing here touches the Fock-state measurement code, so
//! agreement between the two is a meaningful check.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::elements::{Circuit, Element};
use crate::error::{domain, Error, Result};
use crate::fock::{
    ModeLabel, PhotonicState, Polarization, Port, PortKind, PortPatterns, TemporalModeSet,
};

/// One two-photon history: where each input photon ended up, with the
/// product of branch amplitudes along both paths.
#[derive(Clone, Debug, PartialEq)]
pub struct PathAmplitude {
    pub assignment: [ModeLabel; 2],
    pub amplitude: Complex64,
}

type Jones = [[Complex64; 2]; 2];

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn pol_index(pol: Polarization) -> usize {
    match pol {
        Polarization::H => 0,
        Polarization::V => 1,
    }
}

const POLS: [Polarization; 2] = [Polarization::H, Polarization::V];

fn jones_hwp(angle_deg: f64) -> Jones {
    let t = 2.0 * angle_deg.to_radians();
    [[re(t.cos()), re(t.sin())], [re(t.sin()), re(-t.cos())]]
}

/// Projector onto the pass axis and onto the blocked axis.
fn jones_polarizer(angle_deg: f64) -> (Jones, Jones) {
    let a = angle_deg.to_radians();
    let (c, s) = (a.cos(), a.sin());
    let pass = [[re(c * c), re(c * s)], [re(c * s), re(s * s)]];
    let block = [[re(s * s), re(-c * s)], [re(-c * s), re(c * c)]];
    (pass, block)
}

/// Branches of one photon through one element: `(port, pol, amplitude)`.
/// The Jones matrices are indexed `[out][in]`.
fn branch(
    element: &Element,
    port: &Port,
    pol: Polarization,
) -> Vec<(Port, Polarization, Complex64)> {
    let stay = || vec![(port.clone(), pol, re(1.0))];
    let through = |target: &Port, m: &Jones| -> Vec<(Port, Polarization, Complex64)> {
        POLS.iter()
            .map(|&out| (target.clone(), out, m[pol_index(out)][pol_index(pol)]))
            .filter(|(_, _, amp)| *amp != re(0.0))
            .collect()
    };
    match element {
        Element::Beamsplitter { a, b } => {
            // Port transfer matrix [[1, i], [i, 1]] / √2 acting on (a, b).
            let (t, r) = (re(FRAC_1_SQRT_2), Complex64::new(0.0, FRAC_1_SQRT_2));
            if port == a {
                vec![(a.clone(), pol, t), (b.clone(), pol, r)]
            } else if port == b {
                vec![(a.clone(), pol, r), (b.clone(), pol, t)]
            } else {
                stay()
            }
        }
        Element::HalfWavePlate { port: p, angle_deg } if p == port => {
            through(p, &jones_hwp(*angle_deg))
        }
        Element::Polarizer {
            port: p,
            angle_deg,
            environment,
        } if p == port || environment == port => {
            let (pass, block) = jones_polarizer(*angle_deg);
            let other = if p == port { environment } else { p };
            let mut out = through(port, &pass);
            out.extend(through(other, &block));
            out
        }
        Element::PolarizingBeamsplitter {
            input,
            h_out,
            v_out,
        } => {
            let exit = if pol == Polarization::H { h_out } else { v_out };
            if port == input {
                vec![(exit.clone(), pol, re(1.0))]
            } else if port == exit {
                vec![(input.clone(), pol, re(1.0))]
            } else {
                stay()
            }
        }
        Element::PhasePlate {
            port: p,
            pol: q,
            phase_rad,
        } if p == port && *q == pol => vec![(
            port.clone(),
            pol,
            Complex64::new(phase_rad.cos(), phase_rad.sin()),
        )],
        _ => stay(),
    }
}

/// All complete single-photon paths from `start`, one entry per branch sequence.
///
/// `delay_modes[k]` is the temporal index assigned by the `k`-th delay
/// element of the circuit.
fn single_photon_paths(
    circuit: &Circuit,
    start: &ModeLabel,
    delay_modes: &[usize],
) -> Vec<(ModeLabel, Complex64)> {
    let mut paths = vec![(start.clone(), re(1.0))];
    let mut delay_counter = 0;
    for element in circuit.elements() {
        if let Element::Delay { port, .. } = element {
            let target = delay_modes[delay_counter];
            delay_counter += 1;
            for (label, _) in paths.iter_mut() {
                if &label.port == port {
                    label.temporal = target;
                }
            }
            continue;
        }
        paths = paths
            .into_iter()
            .flat_map(|(label, amp)| {
                branch(element, &label.port, label.pol)
                    .into_iter()
                    .map(move |(port, pol, a)| {
                        (
                            ModeLabel {
                                port,
                                pol,
                                temporal: label.temporal,
                            },
                            amp * a,
                        )
                    })
            })
            .collect();
    }
    paths
}

/// Every two-photon path of `input` through `circuit`, and the temporal Gram
/// matrix after all delays.
pub fn enumerate_paths(
    circuit: &Circuit,
    input: &PhotonicState,
) -> Result<(Vec<PathAmplitude>, Vec<Vec<Complex64>>)> {
    let declared: BTreeSet<&Port> = circuit.ports().map(|(p, _)| p).collect();
    for ((x, y), _) in input.terms() {
        for label in [x, y] {
            if !declared.contains(&label.port) && input.port_kind(&label.port).is_none() {
                return domain(format!("input photon on unresolved port {}", label.port));
            }
        }
    }
    let input_ports: BTreeSet<&Port> = input.ports().map(|(p, _)| p).collect();
    for element in circuit.elements() {
        for port in element.ports() {
            if !declared.contains(port) && !input_ports.contains(port) {
                return domain(format!("element references unresolved port {port}"));
            }
        }
    }

    let mut gram: Vec<Vec<Complex64>> = input.temporal_modes().gram().to_vec();
    let mut delay_modes = Vec::new();
    for element in circuit.elements() {
        if let Element::Delay { overlap, .. } = element {
            let n = gram.len();
            let new_col: Vec<Complex64> = (0..n).map(|j| *overlap * gram[j][0]).collect();
            for (row, value) in gram.iter_mut().zip(&new_col) {
                row.push(*value);
            }
            let mut last: Vec<Complex64> = new_col.iter().map(|z| z.conj()).collect();
            last.push(re(1.0));
            gram.push(last);
            delay_modes.push(n);
        }
    }

    let mut cache: BTreeMap<ModeLabel, Vec<(ModeLabel, Complex64)>> = BTreeMap::new();
    let mut paths = Vec::new();
    for ((x, y), amp) in input.terms() {
        // Occupation amplitudes of a doubly occupied mode carry a 1/√2 relative
        // to the a†a† coefficient.
        let coefficient = if x == y { amp * FRAC_1_SQRT_2 } else { *amp };
        for label in [x, y] {
            cache
                .entry(label.clone())
                .or_insert_with(|| single_photon_paths(circuit, label, &delay_modes));
        }
        for (lx, ax) in &cache[x] {
            for (ly, ay) in &cache[y] {
                paths.push(PathAmplitude {
                    assignment: [lx.clone(), ly.clone()],
                    amplitude: coefficient * ax * ay,
                });
            }
        }
    }
    Ok((paths, gram))
}

/// Orthonormal expansion `φₖ = Σⱼ basis[j][k] eⱼ` from the Hermitian
/// eigendecomposition of the Gram matrix.
fn eigen_basis(gram: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    let n = gram.len();
    let matrix = DMatrix::from_fn(n, n, |i, j| gram[i][j]);
    let eigen = matrix.symmetric_eigen();
    let mut basis = Vec::new();
    for (j, &lambda) in eigen.eigenvalues.iter().enumerate() {
        if lambda < -1e-12 {
            return Err(Error::Numeric(format!(
                "Gram eigenvalue {lambda:e} is negative"
            )));
        }
        if lambda <= 1e-12 {
            continue;
        }
        let scale = lambda.sqrt();
        basis.push(
            (0..n)
                .map(|k| eigen.eigenvectors[(k, j)].conj() * scale)
                .collect(),
        );
    }
    Ok(basis)
}

/// Probability of each unordered pair of destination ports.
pub fn oracle_joint_distribution(circuit: &Circuit, input: &PhotonicState) -> Result<PortPatterns> {
    let (paths, gram) = enumerate_paths(circuit, input)?;
    let basis = eigen_basis(&gram)?;

    // Ordered two-photon tensor over (port, pol, orthonormal temporal index).
    type Slot = (Port, Polarization, usize);
    let mut tensor: BTreeMap<(Slot, Slot), Complex64> = BTreeMap::new();
    for path in &paths {
        let [x, y] = &path.assignment;
        for (jx, bx) in basis.iter().enumerate() {
            let cx = bx[x.temporal];
            if cx.norm() == 0.0 {
                continue;
            }
            for (jy, by) in basis.iter().enumerate() {
                let cy = by[y.temporal];
                if cy.norm() == 0.0 {
                    continue;
                }
                let key = ((x.port.clone(), x.pol, jx), (y.port.clone(), y.pol, jy));
                *tensor.entry(key).or_insert(re(0.0)) += path.amplitude * cx * cy;
            }
        }
    }

    let mut patterns = PortPatterns::new();
    let mut visited = BTreeSet::new();
    for (alpha, beta) in tensor.keys() {
        let key = if alpha <= beta {
            (alpha.clone(), beta.clone())
        } else {
            (beta.clone(), alpha.clone())
        };
        if !visited.insert(key.clone()) {
            continue;
        }
        let (p, q) = key;
        let forward = tensor
            .get(&(p.clone(), q.clone()))
            .copied()
            .unwrap_or_default();
        let prob = if p == q {
            2.0 * forward.norm_sqr()
        } else {
            let backward = tensor
                .get(&(q.clone(), p.clone()))
                .copied()
                .unwrap_or_default();
            (forward + backward).norm_sqr()
        };
        let ports = if p.0 <= q.0 { (p.0, q.0) } else { (q.0, p.0) };
        *patterns.entry(ports).or_insert(0.0) += prob;
    }
    Ok(patterns)
}

/// Largest absolute difference between two pattern maps over the union of keys.
pub fn max_pattern_difference(a: &PortPatterns, b: &PortPatterns) -> f64 {
    a.keys()
        .chain(b.keys())
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Random small circuit with a random two-photon input, for cross-checks.
///
/// Uses six ordinary ports `p0..p5` and two environment ports `e0`, `e1`,
/// with 1 to `max_elements` elements. The input is a product pair or a
/// two-term superposition with a random complex wavepacket overlap.
pub fn random_case<R: Rng>(rng: &mut R, max_elements: usize) -> Result<(Circuit, PhotonicState)> {
    const ORDINARY: [&str; 6] = ["p0", "p1", "p2", "p3", "p4", "p5"];
    const ENVIRONMENT: [&str; 2] = ["e0", "e1"];
    let pick = |rng: &mut R| Port::new(ORDINARY[rng.random_range(0..ORDINARY.len())]);
    let pick_pol = |rng: &mut R| {
        if rng.random::<bool>() {
            Polarization::H
        } else {
            Polarization::V
        }
    };
    let angle = |rng: &mut R| rng.random_range(-180.0..180.0);

    let mut circuit = Circuit::new();
    for name in ORDINARY {
        circuit = circuit.with_port(name, PortKind::Ordinary)?;
    }
    for name in ENVIRONMENT {
        circuit = circuit.with_port(name, PortKind::Environment)?;
    }
    let count = rng.random_range(1..=max_elements);
    for _ in 0..count {
        let element = match rng.random_range(0..6) {
            0 => {
                let a = pick(rng);
                let mut b = pick(rng);
                while b == a {
                    b = pick(rng);
                }
                Element::Beamsplitter { a, b }
            }
            1 => Element::HalfWavePlate {
                port: pick(rng),
                angle_deg: angle(rng),
            },
            2 => Element::Polarizer {
                port: pick(rng),
                angle_deg: angle(rng),
                environment: Port::new(ENVIRONMENT[rng.random_range(0..2)]),
            },
            3 => {
                let h_out = pick(rng);
                let mut v_out = pick(rng);
                while v_out == h_out {
                    v_out = pick(rng);
                }
                Element::PolarizingBeamsplitter {
                    input: pick(rng),
                    h_out,
                    v_out,
                }
            }
            4 => Element::PhasePlate {
                port: pick(rng),
                pol: pick_pol(rng),
                phase_rad: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            },
            _ => Element::Delay {
                port: pick(rng),
                overlap: Complex64::from_polar(rng.random::<f64>(), rng.random_range(-3.0..3.0)),
            },
        };
        circuit = circuit.with_element(element)?;
    }

    let overlap = Complex64::from_polar(rng.random::<f64>().sqrt(), rng.random_range(-3.0..3.0));
    let temporal = TemporalModeSet::pair(overlap)?;
    let label = |rng: &mut R, temporal: usize| ModeLabel {
        port: pick(rng),
        pol: pick_pol(rng),
        temporal,
    };
    let terms_count = rng.random_range(1..=2);
    let terms: Vec<_> = (0..terms_count)
        .map(|_| {
            let amp = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            ((label(rng, 0), label(rng, 1)), amp)
        })
        .collect();
    let input = PhotonicState::from_terms(terms, temporal, std::iter::empty())?;
    Ok((circuit, input))
}
