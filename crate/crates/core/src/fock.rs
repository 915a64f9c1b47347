//! Exact two-photon Fock states over labeled single-photon modes.
//!
//! A mode is a `(port, polarization, temporal)` triple. Temporal modes need
//! not be orthogonal: their pairwise overlaps live in a [`TemporalModeSet`]
//! Gram matrix, which is how delay-dependent distinguishability enters.
//!
//! Amplitudes are stored in the occupation-number basis. For two distinct
//! labels `x < y` the amplitude multiplies `a†ₓ a†ᵧ |0⟩`; for a doubly
//! occupied label `x` it multiplies `(a†ₓ)² / √2 |0⟩`. That basis is
//! orthonormal once the temporal Gram matrix is the identity, so Born-rule
//! probabilities are read off after [`PhotonicState::orthonormalize`].

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::SQRT_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Eigenvalue (and Cholesky pivot) floor below which a Gram matrix is rejected.
pub const PSD_TOLERANCE: f64 = 1e-12;

/// Amplitudes smaller than this are dropped from the canonical term list.
pub const PRUNE_TOLERANCE: f64 = 1e-14;

const ENTRY_TOLERANCE: f64 = 1e-12;

/// A spatial port identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Port(Arc<str>);

impl Port {
    pub fn new(name: &str) -> Self {
        Port(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Port {
    fn from(name: &str) -> Self {
        Port::new(name)
    }
}

impl fmt::Debug for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Port({})", self.0)
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Whether a port can carry a detector or only absorbs discarded light.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PortKind {
    Ordinary,
    Environment,
}

/// Polarization component in the fixed lab basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    H,
    V,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub port: Port,
    pub pol: Polarization,
    pub temporal: usize,
}

impl ModeLabel {
    pub fn new(port: impl Into<Port>, pol: Polarization, temporal: usize) -> Self {
        ModeLabel {
            port: port.into(),
            pol,
            temporal,
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}:{}", self.port, self.pol, self.temporal)
    }
}

/// Unordered pair of labels, stored with `first <= second`.
pub type LabelPair = (ModeLabel, ModeLabel);

fn ordered_pair(x: ModeLabel, y: ModeLabel) -> LabelPair {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// Gram matrix of the temporal wavepackets, `gram[i][j] = ⟨φᵢ|φⱼ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalModeSet {
    gram: Vec<Vec<Complex64>>,
}

impl TemporalModeSet {
    /// Validates and stores a Gram matrix. Round-off asymmetry and diagonal
    /// drift below `1e-12` are snapped away.
    pub fn new(gram: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = gram.len();
        if n == 0 {
            return domain("temporal mode set must contain at least one mode");
        }
        if gram.iter().any(|row| row.len() != n) {
            return domain("Gram matrix must be square");
        }
        let mut g = gram;
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            if (g[i][i] - Complex64::new(1.0, 0.0)).norm() > ENTRY_TOLERANCE {
                return Err(Error::Numeric(format!(
                    "Gram diagonal entry {i} is {} (expected 1)",
                    g[i][i]
                )));
            }
            g[i][i] = Complex64::new(1.0, 0.0);
            for j in (i + 1)..n {
                if (g[i][j] - g[j][i].conj()).norm() > ENTRY_TOLERANCE {
                    return Err(Error::Numeric(format!(
                        "Gram matrix is not Hermitian at ({i}, {j})"
                    )));
                }
                if g[i][j].norm() > 1.0 + ENTRY_TOLERANCE {
                    return Err(Error::Numeric(format!(
                        "Gram overlap |g[{i}][{j}]| = {} exceeds 1",
                        g[i][j].norm()
                    )));
                }
                g[j][i] = g[i][j].conj();
            }
        }
        let set = TemporalModeSet { gram: g };
        set.orthonormal_factor()?;
        Ok(set)
    }

    pub fn identity(count: usize) -> Self {
        let gram = (0..count)
            .map(|i| {
                (0..count)
                    .map(|j| {
                        if i == j {
                            Complex64::new(1.0, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        TemporalModeSet { gram }
    }

    /// Two wavepackets with `⟨φ₀|φ₁⟩ = overlap`.
    pub fn pair(overlap: Complex64) -> Result<Self> {
        let overlap = checked_overlap(overlap)?;
        let one = Complex64::new(1.0, 0.0);
        Ok(TemporalModeSet {
            gram: vec![vec![one, overlap], vec![overlap.conj(), one]],
        })
    }

    pub fn count(&self) -> usize {
        self.gram.len()
    }

    pub fn overlap(&self, i: usize, j: usize) -> Complex64 {
        self.gram[i][j]
    }

    pub fn gram(&self) -> &[Vec<Complex64>] {
        &self.gram
    }

    pub fn is_identity(&self) -> bool {
        self.gram.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, g)| {
                if i == j {
                    *g == Complex64::new(1.0, 0.0)
                } else {
                    g.norm() == 0.0
                }
            })
        })
    }

    /// Appends the wavepacket `overlap·φ_reference + √(1−|overlap|²)·φ_⊥`,
    /// where `φ_⊥` is orthogonal to every existing mode. Returns its index.
    pub(crate) fn push_displaced(&mut self, reference: usize, overlap: Complex64) -> usize {
        let n = self.count();
        let column: Vec<Complex64> = (0..n).map(|j| overlap * self.gram[j][reference]).collect();
        for (j, row) in self.gram.iter_mut().enumerate() {
            row.push(column[j]);
        }
        let mut last: Vec<Complex64> = column.iter().map(|c| c.conj()).collect();
        last.push(Complex64::new(1.0, 0.0));
        self.gram.push(last);
        n
    }

    /// Rank-revealing Cholesky factor `B` with `B†B = gram`.
    ///
    /// Row `j` of the result is orthonormal basis vector `eⱼ`; column `k`
    /// expands wavepacket `φₖ = Σⱼ B[j][k] eⱼ`. Zero pivots (within
    /// [`PSD_TOLERANCE`]) are clamped, so the row count equals the numerical
    /// rank.
    pub fn orthonormal_factor(&self) -> Result<Vec<Vec<Complex64>>> {
        let n = self.count();
        let zero = Complex64::new(0.0, 0.0);
        let mut lower = vec![vec![zero; n]; n];
        let mut kept = Vec::with_capacity(n);
        for j in 0..n {
            let pivot = self.gram[j][j].re - (0..j).map(|m| lower[j][m].norm_sqr()).sum::<f64>();
            if pivot < -PSD_TOLERANCE {
                return Err(Error::Numeric(format!(
                    "Gram matrix is not positive semidefinite (pivot {pivot:e} at {j})"
                )));
            }
            let residual = |i: usize, lower: &Vec<Vec<Complex64>>| {
                self.gram[i][j]
                    - (0..j)
                        .map(|m| lower[i][m] * lower[j][m].conj())
                        .sum::<Complex64>()
            };
            if pivot <= PSD_TOLERANCE {
                for i in (j + 1)..n {
                    if residual(i, &lower).norm() > PSD_TOLERANCE.sqrt() {
                        return Err(Error::Numeric(format!(
                            "Gram matrix is not positive semidefinite (rank defect at {j})"
                        )));
                    }
                }
                continue;
            }
            let diag = pivot.sqrt();
            lower[j][j] = Complex64::new(diag, 0.0);
            for i in (j + 1)..n {
                lower[i][j] = residual(i, &lower) / diag;
            }
            kept.push(j);
        }
        Ok(kept
            .into_iter()
            .map(|j| (0..n).map(|k| lower[k][j].conj()).collect())
            .collect())
    }
}

pub(crate) fn checked_overlap(overlap: Complex64) -> Result<Complex64> {
    let magnitude = overlap.norm();
    if !magnitude.is_finite() || magnitude > 1.0 + ENTRY_TOLERANCE {
        return domain(format!("overlap magnitude {magnitude} exceeds 1"));
    }
    if magnitude > 1.0 {
        Ok(overlap / magnitude)
    } else {
        Ok(overlap)
    }
}

/// Photon-number distribution at one port.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OccupationDist {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

impl OccupationDist {
    pub fn new(p0: f64, p1: f64, p2: f64) -> Result<Self> {
        let dist = OccupationDist { p0, p1, p2 };
        dist.validate()?;
        Ok(dist)
    }

    pub fn validate(&self) -> Result<()> {
        const TOL: f64 = 1e-10;
        let ps = [self.p0, self.p1, self.p2];
        if ps
            .iter()
            .any(|p| !p.is_finite() || *p < -TOL || *p > 1.0 + TOL)
        {
            return domain(format!("occupation probabilities {ps:?} outside [0, 1]"));
        }
        let total: f64 = ps.iter().sum();
        if (total - 1.0).abs() > TOL {
            return domain(format!("occupation probabilities sum to {total}"));
        }
        Ok(())
    }

    /// Probability of exactly `n` photons; zero for `n > 2`.
    pub fn get(&self, n: usize) -> f64 {
        match n {
            0 => self.p0,
            1 => self.p1,
            2 => self.p2,
            _ => 0.0,
        }
    }

    pub fn mean(&self) -> f64 {
        self.p1 + 2.0 * self.p2
    }
}

/// Joint photon-number distribution over two ports, indexed `[n_a][n_b]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointDist {
    pub p: [[f64; 3]; 3],
}

impl JointDist {
    pub fn get(&self, n_a: usize, n_b: usize) -> f64 {
        if n_a > 2 || n_b > 2 {
            0.0
        } else {
            self.p[n_a][n_b]
        }
    }

    pub fn marginal_a(&self) -> OccupationDist {
        let row = |n: usize| self.p[n].iter().sum::<f64>();
        OccupationDist {
            p0: row(0),
            p1: row(1),
            p2: row(2),
        }
    }

    pub fn marginal_b(&self) -> OccupationDist {
        let col = |n: usize| (0..3).map(|m| self.p[m][n]).sum::<f64>();
        OccupationDist {
            p0: col(0),
            p1: col(1),
            p2: col(2),
        }
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    /// `E[n_a · n_b]`.
    pub fn mean_product(&self) -> f64 {
        let mut acc = 0.0;
        for (na, row) in self.p.iter().enumerate() {
            for (nb, p) in row.iter().enumerate() {
                acc += (na * nb) as f64 * p;
            }
        }
        acc
    }
}

/// Probability of each unordered pair of destination ports, keyed `(p, q)` with `p <= q`.
pub type PortPatterns = BTreeMap<(Port, Port), f64>;

/// A normalized pure two-photon state.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonicState {
    terms: BTreeMap<LabelPair, Complex64>,
    temporal: TemporalModeSet,
    ports: BTreeMap<Port, PortKind>,
}

/// One photon in each of two modes, with wavepacket overlap `overlap`.
///
/// Photon 1 occupies temporal mode 0 and photon 2 temporal mode 1. When both
/// photons share `(port, pol)` the bosonic norm `1 + |overlap|²` is divided
/// out; at `|overlap| = 1` this is the normalized doubly occupied mode.
pub fn make_pair_state(
    port1: impl Into<Port>,
    pol1: Polarization,
    port2: impl Into<Port>,
    pol2: Polarization,
    overlap: Complex64,
) -> Result<PhotonicState> {
    let temporal = TemporalModeSet::pair(overlap)?;
    let (port1, port2) = (port1.into(), port2.into());
    let pair = ordered_pair(
        ModeLabel::new(port1.clone(), pol1, 0),
        ModeLabel::new(port2.clone(), pol2, 1),
    );
    PhotonicState::from_terms(
        vec![(pair, Complex64::new(1.0, 0.0))],
        temporal,
        [(port1, PortKind::Ordinary), (port2, PortKind::Ordinary)],
    )
}

impl PhotonicState {
    /// Builds and normalizes a state from occupation-basis amplitudes.
    ///
    /// Ports referenced by labels but missing from `ports` are declared as
    /// ordinary ports. Duplicate pairs are merged.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (LabelPair, Complex64)>,
        temporal: TemporalModeSet,
        ports: impl IntoIterator<Item = (Port, PortKind)>,
    ) -> Result<Self> {
        let mut declared = BTreeMap::new();
        for (port, kind) in ports {
            declare_into(&mut declared, port, kind)?;
        }
        let mut merged = BTreeMap::new();
        for ((x, y), amp) in terms {
            for label in [&x, &y] {
                if label.temporal >= temporal.count() {
                    return domain(format!("label {label} refers to an unknown temporal mode"));
                }
                declared
                    .entry(label.port.clone())
                    .or_insert(PortKind::Ordinary);
            }
            *merged
                .entry(ordered_pair(x, y))
                .or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        let mut state = PhotonicState {
            terms: merged,
            temporal,
            ports: declared,
        };
        state.prune();
        let norm = state.norm_sqr();
        if norm.is_nan() || norm <= PRUNE_TOLERANCE {
            return domain("state has zero norm");
        }
        let scale = 1.0 / norm.sqrt();
        for amp in state.terms.values_mut() {
            *amp *= scale;
        }
        Ok(state)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LabelPair, &Complex64)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn amplitude(&self, x: &ModeLabel, y: &ModeLabel) -> Complex64 {
        self.terms
            .get(&ordered_pair(x.clone(), y.clone()))
            .copied()
            .unwrap_or_default()
    }

    pub fn temporal_modes(&self) -> &TemporalModeSet {
        &self.temporal
    }

    pub fn ports(&self) -> impl Iterator<Item = (&Port, PortKind)> {
        self.ports.iter().map(|(p, k)| (p, *k))
    }

    pub fn port_kind(&self, port: &Port) -> Option<PortKind> {
        self.ports.get(port).copied()
    }

    pub fn require_port(&self, port: &Port) -> Result<PortKind> {
        self.port_kind(port)
            .ok_or_else(|| Error::Domain(format!("port {port} is not declared")))
    }

    /// Returns a copy with `port` added to the declared ports.
    pub fn declare_port(&self, port: impl Into<Port>, kind: PortKind) -> Result<Self> {
        let mut out = self.clone();
        declare_into(&mut out.ports, port.into(), kind)?;
        Ok(out)
    }

    /// Squared norm evaluated against the temporal Gram matrix.
    pub fn norm_sqr(&self) -> f64 {
        let poly = self.creation_coefficients();
        let g = |x: &ModeLabel, y: &ModeLabel| {
            if x.port == y.port && x.pol == y.pol {
                self.temporal.overlap(x.temporal, y.temporal)
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for ((s1, s2), cs) in &poly {
            for ((t1, t2), ct) in &poly {
                let contraction = g(s1, t1) * g(s2, t2) + g(s1, t2) * g(s2, t1);
                acc += cs.conj() * ct * contraction;
            }
        }
        acc.re
    }

    /// Coefficients of the creation-operator polynomial `Σ c·a†ₓa†ᵧ|0⟩`.
    fn creation_coefficients(&self) -> BTreeMap<LabelPair, Complex64> {
        self.terms
            .iter()
            .map(|(pair, amp)| {
                let c = if pair.0 == pair.1 { amp / SQRT_2 } else { *amp };
                (pair.clone(), c)
            })
            .collect()
    }

    fn prune(&mut self) {
        self.terms.retain(|_, amp| amp.norm() >= PRUNE_TOLERANCE);
    }

    /// Applies a linear map to every photon independently.
    ///
    /// `transfer` returns the image of one creation operator as a list of
    /// `(label, coefficient)`. The result is not renormalized.
    pub(crate) fn map_photons<F>(&self, temporal: TemporalModeSet, transfer: F) -> PhotonicState
    where
        F: Fn(&ModeLabel) -> Vec<(ModeLabel, Complex64)>,
    {
        let mut poly: BTreeMap<LabelPair, Complex64> = BTreeMap::new();
        let mut cache: BTreeMap<ModeLabel, Vec<(ModeLabel, Complex64)>> = BTreeMap::new();
        for ((x, y), c) in self.creation_coefficients() {
            for label in [&x, &y] {
                if !cache.contains_key(label) {
                    cache.insert(label.clone(), transfer(label));
                }
            }
            for (xo, cx) in &cache[&x] {
                for (yo, cy) in &cache[&y] {
                    *poly
                        .entry(ordered_pair(xo.clone(), yo.clone()))
                        .or_insert(Complex64::new(0.0, 0.0)) += c * cx * cy;
                }
            }
        }
        let terms = poly
            .into_iter()
            .map(|(pair, c)| {
                let amp = if pair.0 == pair.1 { c * SQRT_2 } else { c };
                (pair, amp)
            })
            .collect();
        let mut out = PhotonicState {
            terms,
            temporal,
            ports: self.ports.clone(),
        };
        out.prune();
        out
    }

    /// Replaces the temporal mode set and relabels photons, leaving amplitudes unchanged.
    pub(crate) fn with_temporal(&self, temporal: TemporalModeSet) -> PhotonicState {
        PhotonicState {
            terms: self.terms.clone(),
            temporal,
            ports: self.ports.clone(),
        }
    }

    pub(crate) fn relabel<F>(&self, temporal: TemporalModeSet, rename: F) -> PhotonicState
    where
        F: Fn(&ModeLabel) -> ModeLabel,
    {
        let mut out = self.with_temporal(temporal);
        out.terms = self
            .terms
            .iter()
            .map(|((x, y), amp)| (ordered_pair(rename(x), rename(y)), *amp))
            .collect();
        out
    }

    /// Equivalent state over an orthonormal temporal basis.
    ///
    /// Each wavepacket is expanded through the Cholesky factor of the Gram
    /// matrix, so `φ₀ ↦ e₀`, `φ₁ ↦ v·e₀ + √(1−|v|²)·e₁` and so on. The
    /// returned state has an identity Gram matrix whose size is the rank.
    pub fn orthonormalize(&self) -> Result<PhotonicState> {
        if self.temporal.is_identity() {
            return Ok(self.clone());
        }
        let factor = self.temporal.orthonormal_factor()?;
        let rank = factor.len();
        Ok(self.map_photons(TemporalModeSet::identity(rank), |label| {
            factor
                .iter()
                .enumerate()
                .filter(|(_, row)| row[label.temporal].norm() > 0.0)
                .map(|(j, row)| {
                    (
                        ModeLabel {
                            port: label.port.clone(),
                            pol: label.pol,
                            temporal: j,
                        },
                        row[label.temporal],
                    )
                })
                .collect()
        }))
    }

    /// Probability of every unordered pair of destination ports.
    pub fn occupation_patterns(&self) -> Result<PortPatterns> {
        let orth = self.orthonormalize()?;
        let mut out = PortPatterns::new();
        for ((x, y), amp) in &orth.terms {
            let key = if x.port <= y.port {
                (x.port.clone(), y.port.clone())
            } else {
                (y.port.clone(), x.port.clone())
            };
            *out.entry(key).or_insert(0.0) += amp.norm_sqr();
        }
        Ok(out)
    }

    /// Marginal photon-number distribution at `port`, summed over
    /// polarizations and temporal modes.
    pub fn occupation_distribution(&self, port: &Port) -> Result<OccupationDist> {
        self.require_port(port)?;
        let mut p = [0.0; 3];
        for ((x, y), prob) in self.occupation_patterns()? {
            let n = usize::from(&x == port) + usize::from(&y == port);
            p[n] += prob;
        }
        Ok(OccupationDist {
            p0: p[0],
            p1: p[1],
            p2: p[2],
        })
    }

    pub fn joint_distribution(&self, port_a: &Port, port_b: &Port) -> Result<JointDist> {
        if port_a == port_b {
            return domain(format!(
                "joint distribution needs distinct ports, got {port_a} twice"
            ));
        }
        self.require_port(port_a)?;
        self.require_port(port_b)?;
        let mut p = [[0.0; 3]; 3];
        for ((x, y), prob) in self.occupation_patterns()? {
            let na = usize::from(&x == port_a) + usize::from(&y == port_a);
            let nb = usize::from(&x == port_b) + usize::from(&y == port_b);
            p[na][nb] += prob;
        }
        Ok(JointDist { p })
    }

    /// Temporal indices of every photon currently at `port`.
    pub(crate) fn temporal_modes_at(&self, port: &Port) -> BTreeSet<usize> {
        self.terms
            .keys()
            .flat_map(|(x, y)| [x, y])
            .filter(|label| &label.port == port)
            .map(|label| label.temporal)
            .collect()
    }
}

fn declare_into(ports: &mut BTreeMap<Port, PortKind>, port: Port, kind: PortKind) -> Result<()> {
    match ports.get(&port) {
        Some(existing) if *existing != kind => domain(format!(
            "port {port} already declared as {existing:?}, cannot redeclare as {kind:?}"
        )),
        _ => {
            ports.insert(port, kind);
            Ok(())
        }
    }
}
