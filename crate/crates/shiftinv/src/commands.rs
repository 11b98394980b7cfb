//! The subcommands. Each returns its exit code and the text meant for standard output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use shiftinv_core::criteria::{run_suite, Consensus, CriteriaError};
use shiftinv_core::genspace::{default_truncation, spectral_function, GeneratorSystem, SampleCheck, SpectralFunction};
use shiftinv_core::registry::{self, GroundTruth};
use shiftinv_core::wavelets::{
    calderon_check, decomposition_check, semiorthogonality_check, wavelet_origin_test, CalderonReport,
    DecompositionReport, SemiorthogonalityReport, WaveletSystem,
};
use shiftinv_core::{DilationMatrix, RealFunction, Verdict};

use crate::config::{Format, RunConfig, Subject};
use crate::report::{self, CriteriaDocument, CriterionSummary, SeriesSummary, Timing, TOOL};
use crate::{exit, Error};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

/// Options shared by the commands that run a configuration.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct RunFlags {
    /// TOML run configuration.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Registry key to run when no configuration file is given.
    #[arg(long, short)]
    pub example: Option<String>,
    /// Region expression for G, e.g. "halfspace(1,0)".
    #[arg(long, short)]
    pub region: Option<String>,
    /// Expected outcome, overriding the registry label.
    #[arg(long, value_parser = parse_truth)]
    pub expect: Option<GroundTruth>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub jmax: Option<u32>,
    /// Samples per level.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Report file, or the output directory for `--format csv`.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Leave wall-clock fields out of reports.
    #[arg(long)]
    pub deterministic: bool,
    /// Also write a matplotlib script that plots the emitted data.
    #[arg(long)]
    pub plot_script: Option<PathBuf>,
}

fn parse_truth(s: &str) -> Result<GroundTruth, String> {
    match s {
        "complete" => Ok(GroundTruth::Complete),
        "incomplete" => Ok(GroundTruth::Incomplete),
        _ => Err(format!("expected 'complete' or 'incomplete', found '{s}'")),
    }
}

impl RunFlags {
    pub fn for_example(key: &str) -> Self {
        Self { example: Some(key.to_string()), ..Self::default() }
    }

    /// The configuration file (or registry defaults) with command-line overrides applied.
    pub fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = match (&self.config, &self.example) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(key)) => RunConfig::for_example(key)?,
            (None, None) => return Err(Error::Config("pass --config or --example".into())),
        };
        if let (Some(_), Some(key)) = (&self.config, &self.example) {
            if *key != cfg.example {
                return Err(Error::Config(format!("--example {key} conflicts with the config's '{}'", cfg.example)));
            }
        }
        if let Some(r) = &self.region {
            cfg.region = Some(r.clone());
        }
        if self.expect.is_some() {
            cfg.expect = self.expect;
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.jmax.is_some() {
            cfg.probe.j_max = self.jmax;
        }
        if let Some(n) = self.samples {
            cfg.probe.samples_per_level = n;
        }
        if let Some(e) = self.epsilon {
            cfg.probe.epsilon = e;
        }
        if self.out.is_some() {
            cfg.output.path = self.out.clone();
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parse a row-major integer matrix such as `[[1,1],[1,-1]]` or `3`.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<i64>>, Error> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("matrix '{text}': {e}")))?;
    let bad = || Error::Config(format!("matrix '{text}' must be an integer or a list of integer rows"));
    match value {
        serde_json::Value::Number(n) => Ok(vec![vec![n.as_i64().ok_or_else(bad)?]]),
        serde_json::Value::Array(_) => serde_json::from_value(value).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

#[derive(Serialize)]
struct DilationDocument {
    matrix: Vec<Vec<i64>>,
    accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    det_abs: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    digits: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

/// Expansiveness check of an integer matrix, with `d_A` and a digit set.
pub fn dilation(matrix: &str, format: Format) -> Result<Outcome, Error> {
    let rows = parse_matrix(matrix)?;
    let doc = match DilationMatrix::from_rows(&rows) {
        Ok(a) => DilationDocument {
            det_abs: Some(a.det_abs()),
            digits: Some(a.digit_set()?),
            matrix: rows,
            accepted: true,
            reason: None,
        },
        Err(e) => DilationDocument { matrix: rows, accepted: false, det_abs: None, digits: None, reason: Some(e.to_string()) },
    };
    let code = if doc.accepted { exit::OK } else { exit::FAILURE };
    let stdout = match format {
        Format::Json => report::to_json(&doc)?,
        Format::Csv => {
            let mut s = String::new();
            if let (Some(d), Some(digits)) = (doc.det_abs, &doc.digits) {
                let _ = writeln!(s, "accepted: yes");
                let _ = writeln!(s, "d_A: {d}");
                let list: Vec<String> = digits.iter().map(|v| format!("{v:?}")).collect();
                let _ = writeln!(s, "digits: {}", list.join(" "));
            } else {
                let _ = writeln!(s, "accepted: no");
                let _ = writeln!(s, "reason: {}", doc.reason.as_deref().unwrap_or_default());
            }
            s
        }
    };
    Ok(Outcome { code, stdout })
}

/// The system `run_suite` examines: tight frame generators as given, others normalized.
fn suite_system(system: &GeneratorSystem) -> Result<GeneratorSystem, Error> {
    if system.claimed_tight_frame() || !system.is_principal() {
        Ok(system.clone())
    } else {
        Ok(system.normalized(default_truncation(system.dim()))?)
    }
}

fn spectral_of(system: &GeneratorSystem, seed: u64) -> Result<SpectralFunction, Error> {
    let check = SampleCheck { seed, ..SampleCheck::default() };
    Ok(spectral_function(&suite_system(system)?, &check)?)
}

fn write_or_return(path: Option<&Path>, text: String) -> Result<String, Error> {
    match path {
        Some(p) => {
            report::write_file(p, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// Overrides of the `[spectral]` grid.
#[derive(Debug, Clone, Copy, Default, clap::Args)]
pub struct GridFlags {
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
}

/// Tabulate `σ` (or `Σ|ψ̂|²` for a wavelet) on a regular grid, as CSV.
pub fn spectral(flags: &RunFlags, grid: &GridFlags) -> Result<Outcome, Error> {
    let mut cfg = flags.resolve()?;
    cfg.spectral.lo = grid.lo.unwrap_or(cfg.spectral.lo);
    cfg.spectral.hi = grid.hi.unwrap_or(cfg.spectral.hi);
    cfg.spectral.step = grid.step.unwrap_or(cfg.spectral.step);
    cfg.validate()?;
    let (dim, f): (usize, RealFunction) = match cfg.subject()? {
        Subject::Scaling(s) => {
            let sigma = spectral_of(&s, cfg.effective_seed())?;
            (sigma.dim(), sigma.as_real())
        }
        Subject::Wavelet(w) => (w.dim(), w.sigma()),
    };
    if dim > 2 {
        return Err(Error::Config(format!("spectral tables are limited to d <= 2, found d = {dim}")));
    }
    let grid = cfg.spectral;
    let n = ((grid.hi - grid.lo) / grid.step + 1e-9).floor() as usize;
    let coord = |k: usize| ((grid.lo + k as f64 * grid.step) * 1e12).round() / 1e12;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=dim).map(|k| format!("xi_{k}")).collect();
    header.push("value".into());
    w.write_record(&header)?;
    if dim == 1 {
        for k in 0..=n {
            let x = coord(k);
            w.write_record([x.to_string(), f.eval(&[x]).to_string()])?;
        }
    } else {
        for k2 in 0..=n {
            for k1 in 0..=n {
                let (x1, x2) = (coord(k1), coord(k2));
                w.write_record([x1.to_string(), x2.to_string(), f.eval(&[x1, x2]).to_string()])?;
            }
        }
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))?;
    if let Some(script) = &flags.plot_script {
        let data = cfg.output.path.clone().unwrap_or_else(|| PathBuf::from("spectral.csv"));
        report::write_file(script, &report::spectral_plot_script(&data, dim))?;
    }
    Ok(Outcome { code: exit::OK, stdout: write_or_return(cfg.output.path.as_deref(), text)? })
}

fn criteria_exit(consensus: Consensus, matches: Option<bool>) -> i32 {
    match (consensus, matches) {
        (Consensus::Split, _) => exit::INCONCLUSIVE,
        (_, Some(false)) => exit::FAILURE,
        _ => exit::OK,
    }
}

/// Run the criteria suite and emit its report.
pub fn criteria(flags: &RunFlags) -> Result<Outcome, Error> {
    let started = Instant::now();
    let cfg = flags.resolve()?;
    let system = match cfg.subject()? {
        Subject::Scaling(s) => s,
        Subject::Wavelet(_) => {
            return Err(Error::Config(format!("'{}' is a wavelet example; use the wavelet command", cfg.example)))
        }
    };
    let probe = cfg.effective_probe();
    let support = if cfg.region_expr()?.contains("support") {
        Some(spectral_of(&system, probe.seed)?.support_region())
    } else {
        None
    };
    let g = cfg.region(system.dim(), support.as_ref())?;
    let truth = cfg.ground_truth()?;
    let mut doc = CriteriaDocument {
        tool: TOOL,
        version: env!("CARGO_PKG_VERSION"),
        command: "criteria",
        config_hash: cfg.hash()?,
        seed: probe.seed,
        example: cfg.example.clone(),
        region: cfg.region_expr()?,
        j_max: None,
        timing: Timing::default(),
        hypothesis_violated: None,
        hypotheses: None,
        consensus: None,
        ground_truth: truth,
        matches: None,
        exit_code: exit::OK,
        criteria: Vec::new(),
        config: RunConfig { output: Default::default(), ..cfg.clone() },
    };
    let mut traces = Vec::new();
    match run_suite(&system, &g, &probe, &cfg.suite_options(), truth) {
        Ok(result) => {
            doc.j_max = Some(result.j_max);
            doc.hypotheses = Some(result.hypotheses.clone());
            doc.consensus = Some(result.consensus);
            doc.matches = result.matches;
            doc.exit_code = criteria_exit(result.consensus, result.matches);
            doc.criteria = result.reports.iter().map(CriterionSummary::from).collect();
            traces = result.reports.into_iter().map(|r| (r.id.as_str().to_string(), r.trace)).collect();
        }
        Err(CriteriaError::HypothesisViolated { reason }) => {
            doc.hypothesis_violated = Some(reason);
            doc.exit_code = exit::HYPOTHESIS_VIOLATED;
        }
        Err(e) => return Err(e.into()),
    }
    doc.timing = Timing::capture(flags.deterministic, started);

    let stdout = match cfg.output.format {
        Format::Json => {
            let json = report::to_json(&doc)?;
            write_or_return(cfg.output.path.as_deref(), json)?
        }
        Format::Csv => {
            let summary = report::summary_csv(&doc)?;
            match &cfg.output.path {
                Some(dir) => {
                    report::write_file(&dir.join("summary.csv"), &summary)?;
                    report::write_file(&dir.join("report.json"), &report::to_json(&doc)?)?;
                    for (id, trace) in &traces {
                        report::write_file(&dir.join(report::trace_file_name(id)), &report::trace_csv(trace)?)?;
                    }
                    String::new()
                }
                None => summary,
            }
        }
    };
    if let Some(script) = &flags.plot_script {
        let dir = match (&cfg.output.path, cfg.output.format) {
            (Some(d), Format::Csv) => d.clone(),
            _ => PathBuf::from("."),
        };
        report::write_file(script, &report::criteria_plot_script(&dir))?;
    }
    Ok(Outcome { code: doc.exit_code, stdout })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OriginSummary {
    pub generator: String,
    pub verdict: Verdict,
    pub deepest_epsilon: Option<f64>,
    pub trace_summary: Vec<SeriesSummary>,
}

/// A check result, or the reason it could not be run.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Checked<T> {
    Done(T),
    Skipped { skipped: String },
}

impl<T> Checked<T> {
    fn verdict(&self, f: impl Fn(&T) -> Verdict) -> Option<Verdict> {
        match self {
            Checked::Done(t) => Some(f(t)),
            Checked::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveletDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub example: String,
    #[serde(flatten)]
    pub timing: Timing,
    pub calderon: CalderonReport,
    pub semiorthogonality: SemiorthogonalityReport,
    pub origin: Checked<Vec<OriginSummary>>,
    pub origin_verdict: Option<Verdict>,
    pub decomposition: Checked<DecompositionReport>,
    pub verdict: Verdict,
    pub exit_code: i32,
    pub config: RunConfig,
}

fn core_sigma(w: &WaveletSystem, key: &str, seed: u64) -> Result<Checked<SpectralFunction>, Error> {
    let Ok(entry) = registry::lookup(key) else {
        return Ok(Checked::Skipped { skipped: "no core space is registered for this wavelet".into() });
    };
    let Some(core) = entry.core else {
        return Ok(Checked::Skipped { skipped: format!("no core space is registered for '{}'", w.label()) });
    };
    Ok(Checked::Done(spectral_of(&registry::scaling_system(core)?, seed)?))
}

/// Calderón condition, semiorthogonality, origin test and decomposition identity.
pub fn wavelet(flags: &RunFlags) -> Result<Outcome, Error> {
    let started = Instant::now();
    let cfg = flags.resolve()?;
    let w = match cfg.subject()? {
        Subject::Wavelet(w) => w,
        Subject::Scaling(_) => {
            return Err(Error::Config(format!("'{}' is a scaling example; use the criteria command", cfg.example)))
        }
    };
    let probe = cfg.effective_probe();
    let calderon = calderon_check(&w, &cfg.wavelet.calderon, &probe)?;
    let semi_cfg = shiftinv_core::wavelets::SemiorthogonalityConfig { seed: probe.seed, ..cfg.wavelet.semiorthogonality };
    let semiorthogonality = semiorthogonality_check(&w, &semi_cfg)?;
    let (origin, origin_verdict) = if w.semiorthogonal_claimed() {
        let r = wavelet_origin_test(&w, &probe)?;
        let per = r
            .per_psi
            .iter()
            .map(|(label, c)| OriginSummary {
                generator: label.clone(),
                verdict: c.verdict,
                deepest_epsilon: c.deepest_epsilon,
                trace_summary: report::summarize(&c.trace),
            })
            .collect();
        (Checked::Done(per), Some(r.verdict))
    } else {
        (Checked::Skipped { skipped: "the system is not declared semiorthogonal".into() }, None)
    };
    let decomposition = match core_sigma(&w, &cfg.example, probe.seed)? {
        Checked::Done(sigma) => {
            let check = SampleCheck { seed: probe.seed, samples: 1000, ..SampleCheck::default() };
            Checked::Done(decomposition_check(&sigma, &w, &check, cfg.wavelet.calderon.h, cfg.wavelet.calderon.tol)?)
        }
        Checked::Skipped { skipped } => Checked::Skipped { skipped },
    };
    let verdict = Verdict::all(
        [Some(calderon.verdict), Some(semiorthogonality.verdict), origin_verdict, decomposition.verdict(|d| d.verdict)]
            .into_iter()
            .flatten(),
    );
    let code = match verdict {
        Verdict::Pass => exit::OK,
        Verdict::Fail => exit::FAILURE,
        Verdict::Inconclusive => exit::INCONCLUSIVE,
    };
    let doc = WaveletDocument {
        tool: TOOL,
        version: env!("CARGO_PKG_VERSION"),
        command: "wavelet",
        config_hash: cfg.hash()?,
        seed: probe.seed,
        example: cfg.example.clone(),
        timing: Timing::capture(flags.deterministic, started),
        calderon,
        semiorthogonality,
        origin,
        origin_verdict,
        decomposition,
        verdict,
        exit_code: code,
        config: RunConfig { output: Default::default(), ..cfg.clone() },
    };
    let text = match cfg.output.format {
        Format::Json => report::to_json(&doc)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["check", "verdict"])?;
            w.write_record(["calderon", doc.calderon.verdict.as_str()])?;
            w.write_record(["semiorthogonality", doc.semiorthogonality.verdict.as_str()])?;
            w.write_record(["origin", doc.origin_verdict.map_or("SKIPPED", Verdict::as_str)])?;
            w.write_record(["decomposition", doc.decomposition.verdict(|d| d.verdict).map_or("SKIPPED", Verdict::as_str)])?;
            w.write_record(["overall", doc.verdict.as_str()])?;
            String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))?
        }
    };
    Ok(Outcome { code, stdout: write_or_return(cfg.output.path.as_deref(), text)? })
}

/// One line per registry entry: key, kind, default region and description.
pub fn registry_list() -> Outcome {
    let mut s = String::new();
    for e in registry::entries() {
        let kind = match e.kind {
            registry::EntryKind::Scaling => "scaling",
            registry::EntryKind::Wavelet => "wavelet",
        };
        let _ = writeln!(s, "{:<28} {:<8} G = {:<16} {}", e.key, kind, e.default_region, e.description);
    }
    Outcome { code: exit::OK, stdout: s }
}
