//! Config-driven scan runner behind the `twophoton` binary.
//!
//! The config is a TOML document, versioned by `schema_version`:
//!
//! ```toml
//! schema_version = 1
//!
//! [scenario]
//! kind = "bell"                       # hom_dip | cascade | bell | deterministic
//! efficiency = 0.6                    # or [eta_1, eta_2]; default 1.0
//! center_wavelength_nm = 702.2        # default 702.2 (780 for deterministic)
//! filter_fwhm_nm = 3.0                # default 3 (20 for deterministic)
//! mode_match = 1.0                    # default 1.0
//! polarizer_angles_deg = [45.0, -45.0] # bell only, required
//! # phase_rad = 3.141592653589793     # deterministic only, required
//!
//! [scan]                              # optional; defaults to ±6 τ_c, 241 steps
//! tau_min_fs = -1200.0
//! tau_max_fs = 1200.0
//! steps = 241
//!
//! [sampling]                          # optional
//! enabled = true
//! pair_rate = 1000.0                  # pairs per second
//! integration_time_s = 10.0
//! seed = 7
//!
//! [output]
//! path = "scan.csv"
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::scenarios::{
    analyze_curve, delay_grid, fit_gaussian_feature, run_scan, sample_counts, RowCounts,
    ScanResult, ScanRow, Scenario, ScenarioKind, SpectralFilter,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_OUTPUT: &str = "scan.csv";
/// Default scan half-width in coherence times.
pub const DEFAULT_SCAN_HALF_WIDTH: f64 = 6.0;
pub const DEFAULT_STEPS: usize = 241;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid<T>(field: &str, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    })
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(err: crate::Error) -> Self {
        match err {
            crate::Error::Configuration(message) | crate::Error::Domain(message) => {
                CliError::Config(ConfigError::Invalid {
                    field: "scenario".into(),
                    message,
                })
            }
            other => CliError::Internal(other.to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    scenario: RawScenario,
    scan: Option<RawScan>,
    sampling: Option<RawSampling>,
    output: Option<RawOutput>,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum KindName {
    HomDip,
    Cascade,
    Bell,
    Deterministic,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Efficiency {
    Shared(f64),
    PerDetector([f64; 2]),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    kind: KindName,
    efficiency: Option<Efficiency>,
    center_wavelength_nm: Option<f64>,
    filter_fwhm_nm: Option<f64>,
    mode_match: Option<f64>,
    polarizer_angles_deg: Option<[f64; 2]>,
    phase_rad: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    tau_min_fs: Option<f64>,
    tau_max_fs: Option<f64>,
    steps: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampling {
    #[serde(default)]
    enabled: bool,
    pair_rate: Option<f64>,
    integration_time_s: Option<f64>,
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanSpec {
    pub tau_min_fs: f64,
    pub tau_max_fs: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplingSpec {
    pub enabled: bool,
    pub pair_rate: f64,
    pub integration_time_s: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub mode_match: f64,
    pub scan: ScanSpec,
    pub sampling: SamplingSpec,
    pub output: PathBuf,
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    if raw.schema_version != SCHEMA_VERSION {
        return invalid(
            "schema_version",
            format!(
                "unsupported version {} (expected {SCHEMA_VERSION})",
                raw.schema_version
            ),
        );
    }

    let s = raw.scenario;
    let kind = match s.kind {
        KindName::HomDip => ScenarioKind::HomDip,
        KindName::Cascade => ScenarioKind::Cascade,
        KindName::Bell => {
            let Some([a1_deg, a2_deg]) = s.polarizer_angles_deg else {
                return invalid(
                    "scenario.polarizer_angles_deg",
                    "required for kind = \"bell\"",
                );
            };
            ScenarioKind::Bell { a1_deg, a2_deg }
        }
        KindName::Deterministic => {
            let Some(phase_rad) = s.phase_rad else {
                return invalid(
                    "scenario.phase_rad",
                    "required for kind = \"deterministic\"",
                );
            };
            ScenarioKind::Deterministic { phase_rad }
        }
    };
    if s.polarizer_angles_deg.is_some() && !matches!(kind, ScenarioKind::Bell { .. }) {
        return invalid(
            "scenario.polarizer_angles_deg",
            "only valid for kind = \"bell\"",
        );
    }
    if s.phase_rad.is_some() && !matches!(kind, ScenarioKind::Deterministic { .. }) {
        return invalid(
            "scenario.phase_rad",
            "only valid for kind = \"deterministic\"",
        );
    }
    match kind {
        ScenarioKind::Bell { a1_deg, a2_deg }
            if !(a1_deg.is_finite()
                && a2_deg.is_finite()
                && a1_deg.abs() <= 360.0
                && a2_deg.abs() <= 360.0) =>
        {
            return invalid(
                "scenario.polarizer_angles_deg",
                "angles must lie in [-360, 360] degrees",
            );
        }
        ScenarioKind::Deterministic { phase_rad }
            if !(phase_rad.is_finite() && phase_rad.abs() <= 4.0 * std::f64::consts::PI) =>
        {
            return invalid("scenario.phase_rad", "phase must lie in [-4π, 4π]");
        }
        _ => {}
    }

    let efficiencies = match s.efficiency {
        None => [1.0, 1.0],
        Some(Efficiency::Shared(eta)) => [eta, eta],
        Some(Efficiency::PerDetector(etas)) => etas,
    };
    if efficiencies.iter().any(|eta| !(0.0..=1.0).contains(eta)) {
        return invalid(
            "scenario.efficiency",
            format!("{efficiencies:?} outside [0, 1]"),
        );
    }
    let defaults = kind.default_filter();
    let center_nm = s.center_wavelength_nm.unwrap_or(defaults.center_nm);
    if !(center_nm > 0.0 && center_nm.is_finite()) {
        return invalid("scenario.center_wavelength_nm", "must be positive");
    }
    let fwhm_nm = s.filter_fwhm_nm.unwrap_or(defaults.fwhm_nm);
    if !(fwhm_nm > 0.0 && fwhm_nm.is_finite()) {
        return invalid("scenario.filter_fwhm_nm", "must be positive");
    }
    let mode_match = s.mode_match.unwrap_or(1.0);
    if !(0.0..=1.0).contains(&mode_match) {
        return invalid(
            "scenario.mode_match",
            format!("{mode_match} outside [0, 1]"),
        );
    }
    let filter = SpectralFilter { center_nm, fwhm_nm };
    let scenario = Scenario::new(kind, efficiencies, filter).map_err(|e| ConfigError::Invalid {
        field: "scenario".into(),
        message: e.to_string(),
    })?;

    let half_width = DEFAULT_SCAN_HALF_WIDTH * filter.coherence_time_fs();
    let scan = match raw.scan {
        None => ScanSpec {
            tau_min_fs: -half_width,
            tau_max_fs: half_width,
            steps: DEFAULT_STEPS,
        },
        Some(scan) => ScanSpec {
            tau_min_fs: scan.tau_min_fs.unwrap_or(-half_width),
            tau_max_fs: scan.tau_max_fs.unwrap_or(half_width),
            steps: scan.steps.unwrap_or(DEFAULT_STEPS),
        },
    };
    if scan.steps < 2 {
        return invalid("scan.steps", format!("{} < 2", scan.steps));
    }
    if !(scan.tau_min_fs.is_finite()
        && scan.tau_max_fs.is_finite()
        && scan.tau_min_fs < scan.tau_max_fs)
    {
        return invalid("scan.tau_min_fs", "tau_min_fs must be below tau_max_fs");
    }

    let sampling = match raw.sampling {
        None => SamplingSpec {
            enabled: false,
            pair_rate: 0.0,
            integration_time_s: 0.0,
            seed: 0,
        },
        Some(raw) => {
            let spec = SamplingSpec {
                enabled: raw.enabled,
                pair_rate: raw.pair_rate.unwrap_or(0.0),
                integration_time_s: raw.integration_time_s.unwrap_or(0.0),
                seed: raw.seed.unwrap_or(0),
            };
            if spec.enabled {
                if raw.pair_rate.is_none() {
                    return invalid("sampling.pair_rate", "required when sampling is enabled");
                }
                if raw.integration_time_s.is_none() {
                    return invalid(
                        "sampling.integration_time_s",
                        "required when sampling is enabled",
                    );
                }
                if !(spec.pair_rate > 0.0 && spec.pair_rate.is_finite()) {
                    return invalid("sampling.pair_rate", "must be positive");
                }
                if !(spec.integration_time_s > 0.0 && spec.integration_time_s.is_finite()) {
                    return invalid("sampling.integration_time_s", "must be positive");
                }
            }
            spec
        }
    };

    let output = raw
        .output
        .and_then(|o| o.path)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));

    Ok(RunConfig {
        scenario,
        mode_match,
        scan,
        sampling,
        output,
    })
}

/// Columns: `tau_fs`, `singles_<det>`…, `coinc_<a>_<b>`…, then
/// `counts_singles_<det>`… and `counts_coinc_<a>_<b>`… when sampled.
pub fn csv_header(result: &ScanResult) -> Vec<String> {
    let mut header = vec!["tau_fs".to_string()];
    header.extend(result.detectors.iter().map(|d| format!("singles_{d}")));
    header.extend((0..result.pairs.len()).map(|k| format!("coinc_{}", result.pair_name(k))));
    if result.rows.iter().any(|r| r.counts.is_some()) {
        header.extend(
            result
                .detectors
                .iter()
                .map(|d| format!("counts_singles_{d}")),
        );
        header.extend(
            (0..result.pairs.len()).map(|k| format!("counts_coinc_{}", result.pair_name(k))),
        );
    }
    header
}

/// 17 significant digits, enough to round-trip any `f64`.
fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(result: &ScanResult, writer: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(csv_header(result))?;
    let sampled = result.rows.iter().any(|r| r.counts.is_some());
    for row in &result.rows {
        let mut record: Vec<String> = vec![format_float(row.tau_fs)];
        record.extend(row.singles.iter().map(|p| format_float(*p)));
        record.extend(row.coincidences.iter().map(|p| format_float(*p)));
        if sampled {
            let counts = row.counts.as_ref().expect("every row sampled");
            record.extend(counts.singles.iter().map(u64::to_string));
            record.extend(counts.coincidences.iter().map(u64::to_string));
        }
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

/// Rows and column names read back from a scan CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<ScanRow>,
}

pub fn read_csv<R: Read>(reader: R) -> Result<CsvTable, String> {
    let mut input = csv::Reader::from_reader(reader);
    let header: Vec<String> = input
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(str::to_string)
        .collect();
    if header.first().map(String::as_str) != Some("tau_fs") {
        return Err("first column must be tau_fs".into());
    }
    let count = |prefix: &str| header.iter().filter(|h| h.starts_with(prefix)).count();
    let n_singles = count("singles_");
    let n_coinc = count("coinc_");
    let sampled = count("counts_") > 0;
    let mut rows = Vec::new();
    for record in input.records() {
        let record = record.map_err(|e| e.to_string())?;
        let float = |i: usize| -> Result<f64, String> {
            record
                .get(i)
                .ok_or_else(|| format!("missing column {i}"))?
                .parse::<f64>()
                .map_err(|e| e.to_string())
        };
        let int = |i: usize| -> Result<u64, String> {
            record
                .get(i)
                .ok_or_else(|| format!("missing column {i}"))?
                .parse::<u64>()
                .map_err(|e| e.to_string())
        };
        let singles = (1..=n_singles).map(float).collect::<Result<Vec<_>, _>>()?;
        let coincidences = (n_singles + 1..=n_singles + n_coinc)
            .map(float)
            .collect::<Result<Vec<_>, _>>()?;
        let counts = if sampled {
            let base = 1 + n_singles + n_coinc;
            Some(RowCounts {
                singles: (base..base + n_singles)
                    .map(int)
                    .collect::<Result<_, _>>()?,
                coincidences: (base + n_singles..base + n_singles + n_coinc)
                    .map(int)
                    .collect::<Result<_, _>>()?,
            })
        } else {
            None
        };
        rows.push(ScanRow {
            tau_fs: float(0)?,
            singles,
            coincidences,
            counts,
        });
    }
    Ok(CsvTable { header, rows })
}

/// Runs the scan described by `config`, sampling counts if enabled.
pub fn execute(config: &RunConfig) -> Result<ScanResult, CliError> {
    let grid = delay_grid(
        config.scan.tau_min_fs,
        config.scan.tau_max_fs,
        config.scan.steps,
    )?;
    let result = run_scan(&config.scenario, &grid, config.mode_match)?;
    if config.sampling.enabled {
        Ok(sample_counts(
            &result,
            config.sampling.pair_rate,
            config.sampling.integration_time_s,
            config.sampling.seed,
        )?)
    } else {
        Ok(result)
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

/// Human-readable summary: curve analysis per column plus closed-form
/// predictions at background and zero delay.
pub fn summary(config: &RunConfig, result: &ScanResult) -> Result<String, CliError> {
    let meta = &result.metadata;
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "scenario      {}", meta.scenario.name());
    match meta.scenario {
        ScenarioKind::Bell { a1_deg, a2_deg } => {
            let _ = writeln!(w, "polarizers    {a1_deg}° / {a2_deg}°");
        }
        ScenarioKind::Deterministic { phase_rad } => {
            let _ = writeln!(w, "phase         {phase_rad} rad");
        }
        _ => {}
    }
    let _ = writeln!(
        w,
        "efficiencies  {} {}",
        meta.efficiencies[0], meta.efficiencies[1]
    );
    let _ = writeln!(
        w,
        "filter        {} nm FWHM at {} nm, tau_c = {:.3} fs",
        meta.filter.fwhm_nm, meta.filter.center_nm, meta.coherence_time_fs
    );
    let _ = writeln!(w, "mode_match    {}", meta.mode_match);
    let _ = writeln!(
        w,
        "rows          {} (tau {:.3} .. {:.3} fs)",
        result.rows.len(),
        config.scan.tau_min_fs,
        config.scan.tau_max_fs
    );
    let _ = writeln!(w);
    let _ = writeln!(
        w,
        "{:<18} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "curve", "baseline", "extremum", "tau_ext_fs", "visibility", "fwhm_fs"
    );

    let mut curves: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for (i, d) in result.detectors.iter().enumerate() {
        curves.push((format!("singles_{d}"), result.singles_curve(i)));
    }
    for k in 0..result.pairs.len() {
        curves.push((
            format!("coinc_{}", result.pair_name(k)),
            result.coincidence_curve(k),
        ));
    }
    for (name, curve) in &curves {
        match analyze_curve(curve) {
            Ok(a) => {
                let _ = writeln!(
                    w,
                    "{:<18} {:>12.6} {:>12.6} {:>12.3} {:>12.6} {:>12}",
                    name,
                    a.baseline,
                    a.extremum,
                    a.extremum_tau_fs,
                    a.visibility,
                    fmt_opt(a.fwhm_fs)
                );
            }
            Err(e) => {
                let _ = writeln!(w, "{name:<18} analysis unavailable: {e}");
            }
        }
    }

    let _ = writeln!(w);
    let _ = writeln!(
        w,
        "closed-form predictions (overlap 0 and mode_match at tau = 0)"
    );
    let _ = writeln!(
        w,
        "{:<18} {:>12} {:>12} {:>12}",
        "curve", "background", "tau=0", "visibility"
    );
    let background = config.scenario.predicted(0.0);
    let centre = config.scenario.predicted(meta.mode_match);
    let rows = background
        .singles
        .iter()
        .zip(&centre.singles)
        .chain(background.coincidences.iter().zip(&centre.coincidences));
    for ((name, _), (bg, c)) in curves.iter().zip(rows) {
        let vis = if *bg > 0.0 { (bg - c).abs() / bg } else { 0.0 };
        let _ = writeln!(w, "{name:<18} {bg:>12.6} {c:>12.6} {vis:>12.6}");
    }

    if let Some(sampling) = &meta.sampling {
        let _ = writeln!(w);
        let _ = writeln!(
            w,
            "sampled counts (pair_rate {} /s, {} s per point, seed {})",
            sampling.pair_rate, sampling.integration_time_s, sampling.seed
        );
        for k in 0..result.pairs.len() {
            let Some(counts) = result.coincidence_counts(k) else {
                continue;
            };
            let sigmas: Vec<f64> = counts.iter().map(|(_, y)| y.max(1.0).sqrt()).collect();
            let name = format!("counts_coinc_{}", result.pair_name(k));
            match fit_gaussian_feature(&counts, Some(&sigmas), 0.0) {
                Ok(fit) => {
                    let _ = writeln!(
                        w,
                        "{name:<18} fitted visibility {:.4} ± {:.4}, width {:.2} fs",
                        fit.visibility, fit.visibility_stderr, fit.width_fs
                    );
                }
                Err(e) => {
                    let _ = writeln!(w, "{name:<18} fit unavailable: {e}");
                }
            }
        }
    }
    Ok(out)
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Executes `config`, writes the CSV to `config.output`, and returns the summary.
pub fn run_cli(config: &RunConfig) -> Result<(ScanResult, String), CliError> {
    let result = execute(config)?;
    let file = std::fs::File::create(&config.output).map_err(io_error(&config.output))?;
    write_csv(&result, std::io::BufWriter::new(file)).map_err(|e| CliError::Io {
        path: config.output.clone(),
        source: std::io::Error::other(e),
    })?;
    let text = summary(config, &result)?;
    Ok((result, text))
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    Ok(parse_config(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "schema_version = 1\n[scenario]\nkind = \"hom_dip\"\n";

    #[test]
    fn minimal_config_uses_defaults() {
        let config = parse_config(MINIMAL).unwrap();
        assert_eq!(config.scenario.filter.center_nm, 702.2);
        assert_eq!(config.scenario.filter.fwhm_nm, 3.0);
        assert_eq!(config.scenario.efficiencies, [1.0, 1.0]);
        assert_eq!(config.scan.steps, DEFAULT_STEPS);
        assert!(!config.sampling.enabled);
        assert_eq!(config.output, PathBuf::from(DEFAULT_OUTPUT));
    }

    #[test]
    fn deterministic_defaults_to_type_two_filter() {
        let config = parse_config(
            "schema_version = 1\n[scenario]\nkind = \"deterministic\"\nphase_rad = 0.0\n",
        )
        .unwrap();
        assert_eq!(config.scenario.filter.center_nm, 780.0);
        assert_eq!(config.scenario.filter.fwhm_nm, 20.0);
    }

    #[test]
    fn one_step_is_rejected() {
        let err = parse_config(&format!("{MINIMAL}[scan]\nsteps = 1\n")).unwrap_err();
        assert!(
            matches!(err, ConfigError::Invalid { ref field, .. } if field == "scan.steps"),
            "{err}"
        );
    }

    #[test]
    fn bell_needs_angles() {
        let err = parse_config("schema_version = 1\n[scenario]\nkind = \"bell\"\n").unwrap_err();
        assert!(err.to_string().contains("polarizer_angles_deg"));
    }

    #[test]
    fn angles_on_other_kinds_are_rejected() {
        let err =
            parse_config(&format!("{MINIMAL}polarizer_angles_deg = [45.0, 45.0]\n")).unwrap_err();
        assert!(err.to_string().contains("only valid"));
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let err = parse_config(&format!("{MINIMAL}efficency = 0.5\n")).unwrap_err();
        let text = err.to_string();
        assert!(matches!(err, ConfigError::Parse(_)));
        assert!(text.contains("efficency"), "{text}");
        assert!(text.contains("line 4"), "{text}");
    }

    #[test]
    fn missing_kind_is_reported() {
        let err = parse_config("schema_version = 1\n[scenario]\nefficiency = 0.5\n").unwrap_err();
        assert!(err.to_string().contains("kind"), "{err}");
    }

    #[test]
    fn out_of_domain_values() {
        for extra in [
            "efficiency = 1.5",
            "mode_match = -0.1",
            "filter_fwhm_nm = 0.0",
            "efficiency = [0.5, 2.0]",
        ] {
            let err = parse_config(&format!("{MINIMAL}{extra}\n")).unwrap_err();
            assert!(matches!(err, ConfigError::Invalid { .. }), "{extra}: {err}");
        }
        let err = parse_config("schema_version = 2\n[scenario]\nkind = \"hom_dip\"\n").unwrap_err();
        assert!(err.to_string().contains("schema_version"));
    }

    #[test]
    fn sampling_requires_rates_when_enabled() {
        let err = parse_config(&format!(
            "{MINIMAL}[sampling]\nenabled = true\npair_rate = 10.0\n"
        ))
        .unwrap_err();
        assert!(err.to_string().contains("integration_time_s"));
        let ok = parse_config(&format!("{MINIMAL}[sampling]\nenabled = false\n")).unwrap();
        assert!(!ok.sampling.enabled);
    }

    #[test]
    fn unsampled_csv_has_no_count_columns() {
        let config = parse_config(&format!("{MINIMAL}[scan]\nsteps = 11\n")).unwrap();
        let result = execute(&config).unwrap();
        let header = csv_header(&result);
        assert_eq!(
            header,
            ["tau_fs", "singles_da", "singles_db", "coinc_da_db"]
        );
    }

    #[test]
    fn hom_summary_reports_full_coincidence_visibility() {
        let eta = 0.5;
        let config = parse_config(&format!("{MINIMAL}efficiency = {eta}\n")).unwrap();
        let result = execute(&config).unwrap();
        let coinc = analyze_curve(&result.coincidence_curve(0)).unwrap();
        assert!((coinc.visibility - 1.0).abs() < 1e-6);
        let singles = analyze_curve(&result.singles_curve(0)).unwrap();
        let expected = (eta * eta / 4.0) / (eta - eta * eta / 4.0);
        assert!((singles.visibility - expected).abs() < 1e-6);
        let text = summary(&config, &result).unwrap();
        assert!(text.contains("coinc_da_db"));
        assert!(text.contains("closed-form predictions"));
    }
}
