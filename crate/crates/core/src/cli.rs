//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input or parse error,
//! 3 numerical failure, 4 residue identity mismatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::demo::{run_demo, DEFAULT_CHARGES};
use crate::engine::{psl_over_filtration, SpectraSweep};
use crate::error::{PslError, Result};
use crate::filtration::{build_alpha, build_vr, ComplexKind};
use crate::geometry::{pairwise_distances, CloudOptions, DistanceSpec};
use crate::io;
use crate::protein::features::{featurize_site, FeatureConfig};
use crate::protein::pqr::read_pqr;
use crate::protein::site::MutationSpec;
use crate::sheaf::{FKind, SheafWeighting};
use crate::spectrum::ZeroTolerance;
use crate::verify::{run_verify, VerifyOptions};

pub const THREADS_ENV: &str = "PSL_THREADS";

pub const EXIT_VERIFY_FAILED: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "psl", version, about = "Persistent sheaf Laplacian spectra and site features")]
pub struct Cli {
    /// TOML run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (0 = all cores). Overrides PSL_THREADS and the config file.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectra of the persistent sheaf Laplacian over a filtration grid.
    Spectra(SpectraArgs),
    /// Site feature vectors for point mutations.
    Featurize(FeaturizeArgs),
    /// Two-cluster demonstration sweep, written as CSV tables.
    Demo(DemoArgs),
    /// Randomized comparison of the engine against the dense reference.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexChoice {
    Vr,
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChargeSource {
    /// Charges from the points file.
    File,
    /// Every charge set to 1.
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FChoice {
    Product,
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SpectraArgs {
    /// Points file: `x y z charge [element]` per line.
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long, value_enum)]
    pub charges: Option<ChargeSource>,
    #[arg(long, value_enum)]
    pub complex: Option<ComplexChoice>,
    /// Split the cloud after this many points and use the bipartite distance
    /// (Rips only).
    #[arg(long)]
    pub bipartite_split: Option<usize>,
    /// `start:stop:step` or a comma-separated list.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long, value_enum)]
    pub f_kind: Option<FChoice>,
    /// Write the filtered complex as `dim v0 v1 ... value` lines.
    #[arg(long)]
    pub dump_complex: Option<PathBuf>,
    #[arg(long)]
    pub jitter_seed: Option<u64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    #[arg(long)]
    pub wt: Option<PathBuf>,
    #[arg(long)]
    pub mt: Option<PathBuf>,
    /// `CHAIN:POS:WT:MT`, e.g. `A:39:Q:G`.
    #[arg(long)]
    pub mutation: Option<String>,
    /// Manifest with one entry per line: `MUTATION` or `WT.pqr MT.pqr MUTATION`.
    #[arg(long, conflicts_with = "mutation")]
    pub batch: Option<PathBuf>,
    /// In batch mode, skip failing entries and report them at the end.
    #[arg(long)]
    pub keep_going: bool,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub jitter_seed: Option<u64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long)]
    pub delta: Option<f64>,
    /// `HI,LO`: charges of the two clusters.
    #[arg(long)]
    pub charges: Option<String>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Contents of the `--config` file. Every key is optional; unknown keys are
/// rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub threads: Option<usize>,
    pub format: Option<OutputFormat>,
    pub cutoff: Option<f64>,
    pub grid: Option<Vec<f64>>,
    pub elements: Option<Vec<String>>,
    pub delta: Option<f64>,
    pub q: Option<usize>,
    pub complex: Option<ComplexChoice>,
    pub charges: Option<ChargeSource>,
    pub f_kind: Option<FChoice>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub tol_rel: Option<f64>,
    pub tol_abs: Option<f64>,
    pub jitter_seed: Option<u64>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| PslError::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&io::read_text(path)?)
    }

    fn tolerance(&self) -> ZeroTolerance {
        let d = ZeroTolerance::default();
        ZeroTolerance {
            rel: self.tol_rel.unwrap_or(d.rel),
            abs: self.tol_abs.unwrap_or(d.abs),
        }
    }
}

/// `3:9:1` (inclusive) or `3,4,5`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| PslError::InvalidConfig(format!("grid '{s}': {why}"));
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let grid: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts.as_slice() else {
            return Err(bad("expected start:stop:step"));
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0) || b < a {
            return Err(bad("need step > 0 and stop >= start"));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| a + i as f64 * step).collect()
    } else {
        s.split(',').map(num).collect::<Result<_>>()?
    };
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(bad("must be nonempty and strictly ascending"));
    }
    Ok(grid)
}

fn parse_charge_pair(s: &str) -> Result<(f64, f64)> {
    let bad = || PslError::InvalidConfig(format!("charges '{s}': expected HI,LO"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn thread_count(cli: &Cli, cfg: &RunConfig) -> Result<usize> {
    if let Some(t) = cli.threads {
        return Ok(t);
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        return v
            .trim()
            .parse()
            .map_err(|_| PslError::InvalidConfig(format!("{THREADS_ENV}='{v}' is not a count")));
    }
    Ok(cfg.threads.unwrap_or(0))
}

fn emit(output: Option<&Path>, text: &str, stdout: &mut (dyn Write + Send)) -> Result<()> {
    match output {
        Some(p) => io::write_text(p, text),
        None => stdout.write_all(text.as_bytes()).map_err(|source| PslError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> Result<i32> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let threads = thread_count(cli, &cfg)?;
    crate::parallel::with_threads(threads, || match &cli.command {
        Command::Spectra(a) => cmd_spectra(a, &cfg, stdout).map(|_| 0),
        Command::Featurize(a) => cmd_featurize(a, &cfg, stdout, stderr),
        Command::Demo(a) => cmd_demo(a, &cfg, stdout).map(|_| 0),
        Command::Verify(a) => cmd_verify(a, &cfg, stdout, stderr),
    })?
}

#[derive(Serialize)]
struct SpectraOutput<'a> {
    #[serde(flatten)]
    sweep: &'a SpectraSweep,
    complex: &'static str,
    value_convention: &'static str,
    f_kind: &'static str,
    charges: ChargeSource,
    zero_tolerance: ZeroTolerance,
}

pub fn cmd_spectra(a: &SpectraArgs, cfg: &RunConfig, stdout: &mut (dyn Write + Send)) -> Result<()> {
    let opts = CloudOptions {
        jitter_seed: a.jitter_seed.or(cfg.jitter_seed),
        ..CloudOptions::default()
    };
    let cloud = io::read_points(&a.points, opts)?;
    let charges = a.charges.or(cfg.charges).unwrap_or(ChargeSource::File);
    let cloud = match charges {
        ChargeSource::File => cloud,
        ChargeSource::Unit => cloud.map_charges(|_| 1.0),
    };
    let f_kind = match a.f_kind.or(cfg.f_kind).unwrap_or(FChoice::Product) {
        FChoice::Product => FKind::ProductOfPairwiseDistances,
        FChoice::One => FKind::ConstantOne,
    };
    let w = SheafWeighting::new(cloud.charges(), f_kind)?;
    let grid = match (&a.grid, &cfg.grid) {
        (Some(s), _) => parse_grid(s)?,
        (None, Some(g)) => g.clone(),
        (None, None) => (3..=9).map(f64::from).collect(),
    };
    let delta = a.delta.or(cfg.delta).unwrap_or(0.0);
    let q = a.q.or(cfg.q).unwrap_or(0);
    let complex = a.complex.or(cfg.complex).unwrap_or(ComplexChoice::Vr);
    let fc = match complex {
        ComplexChoice::Vr => {
            let spec = match a.bipartite_split {
                Some(k) => DistanceSpec::split_at(k, cloud.len()),
                None => DistanceSpec::Euclidean,
            };
            build_vr(&pairwise_distances(&cloud, &spec)?, 2, f64::INFINITY)?
        }
        ComplexChoice::Alpha => {
            if a.bipartite_split.is_some() {
                return Err(PslError::InvalidConfig(
                    "--bipartite-split applies to Rips complexes only".into(),
                ));
            }
            build_alpha(&cloud)?
        }
    };
    if let Some(p) = &a.dump_complex {
        io::write_text(p, &fc.dump())?;
    }
    let tol = cfg.tolerance();
    let points = psl_over_filtration(&fc, &cloud, &w, &grid, delta, q, tol)?;
    let sweep = SpectraSweep::new(q, delta, &points);
    let out = SpectraOutput {
        sweep: &sweep,
        complex: fc.kind().label(),
        value_convention: match fc.kind() {
            ComplexKind::VietorisRips => "diameter",
            ComplexKind::Alpha => "radius",
        },
        f_kind: f_kind.label(),
        charges,
        zero_tolerance: tol,
    };
    let text = serde_json::to_string(&out).expect("sweep serializes") + "\n";
    emit(a.output.as_deref().or(cfg.output.as_deref()), &text, stdout)
}

fn feature_config(a: &FeaturizeArgs, cfg: &RunConfig) -> Result<FeatureConfig> {
    let d = FeatureConfig::default();
    let c = FeatureConfig {
        cutoff: a.cutoff.or(cfg.cutoff).unwrap_or(d.cutoff),
        grid: match (&a.grid, &cfg.grid) {
            (Some(s), _) => parse_grid(s)?,
            (None, Some(g)) => g.clone(),
            (None, None) => d.grid,
        },
        elements: cfg
            .elements
            .as_ref()
            .map(|e| e.iter().map(|s| s.to_ascii_uppercase()).collect())
            .unwrap_or(d.elements),
        delta: a.delta.or(cfg.delta).unwrap_or(d.delta),
        zero_tolerance: cfg.tolerance(),
        jitter_seed: a.jitter_seed.or(cfg.jitter_seed),
    };
    c.validate()?;
    Ok(c)
}

struct BatchEntry {
    line: usize,
    wt: PathBuf,
    mt: PathBuf,
    mutation: String,
}

fn read_manifest(path: &Path, wt: Option<&Path>, mt: Option<&Path>) -> Result<Vec<BatchEntry>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::new();
    for (i, raw) in io::read_text(path)?.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let entry = match (fields.as_slice(), wt, mt) {
            ([m], Some(wt), Some(mt)) => BatchEntry {
                line: i + 1,
                wt: wt.to_path_buf(),
                mt: mt.to_path_buf(),
                mutation: m.to_string(),
            },
            ([w, m_path, m], _, _) => BatchEntry {
                line: i + 1,
                wt: base.join(w),
                mt: base.join(m_path),
                mutation: m.to_string(),
            },
            _ => {
                return Err(PslError::MalformedRecord {
                    line: i + 1,
                    reason: "expected `MUTATION` (with --wt/--mt) or `WT MT MUTATION`".into(),
                })
            }
        };
        out.push(entry);
    }
    Ok(out)
}

fn featurize_one(wt: &Path, mt: &Path, mutation: &str, config: &FeatureConfig) -> Result<crate::protein::SiteFeatureVector> {
    let spec: MutationSpec = mutation.parse()?;
    let wt_atoms = read_pqr(wt)?;
    let mt_atoms = read_pqr(mt)?;
    featurize_site(&wt_atoms, &mt_atoms, &spec, config)
}

pub fn cmd_featurize(
    a: &FeaturizeArgs,
    cfg: &RunConfig,
    stdout: &mut (dyn Write + Send),
    stderr: &mut (dyn Write + Send),
) -> Result<i32> {
    let config = feature_config(a, cfg)?;
    let format = a.format.or(cfg.format).unwrap_or(OutputFormat::Csv);
    let entries = match (&a.batch, &a.mutation, &a.wt, &a.mt) {
        (Some(m), _, _, _) => read_manifest(m, a.wt.as_deref(), a.mt.as_deref())?,
        (None, Some(m), Some(wt), Some(mt)) => vec![BatchEntry {
            line: 0,
            wt: wt.clone(),
            mt: mt.clone(),
            mutation: m.clone(),
        }],
        _ => {
            return Err(PslError::InvalidConfig(
                "featurize needs --wt, --mt and --mutation, or --batch".into(),
            ))
        }
    };

    let mut text = match format {
        OutputFormat::Csv => io::feature_csv_header(&config.layout().field_names()),
        OutputFormat::Json => String::new(),
    };
    let mut failures = Vec::new();
    for e in &entries {
        match featurize_one(&e.wt, &e.mt, &e.mutation, &config) {
            Ok(v) => {
                for w in &v.warnings {
                    let _ = writeln!(stderr, "warning: {}: {w}", e.mutation);
                }
                match format {
                    OutputFormat::Csv => text.push_str(&io::feature_csv_row(&e.mutation, &v)),
                    OutputFormat::Json => {
                        text.push_str(&io::feature_json(&e.mutation, &config, &v));
                        text.push('\n');
                    }
                }
            }
            Err(err) if a.batch.is_some() && a.keep_going => failures.push((e, err)),
            Err(err) => return Err(err),
        }
    }
    emit(a.output.as_deref().or(cfg.output.as_deref()), &text, stdout)?;
    if a.batch.is_some() {
        let _ = writeln!(
            stderr,
            "batch: {} succeeded, {} failed",
            entries.len() - failures.len(),
            failures.len()
        );
        for (e, err) in &failures {
            let _ = writeln!(stderr, "  line {} ({}): {err}", e.line, e.mutation);
        }
    }
    Ok(0)
}

pub fn cmd_demo(a: &DemoArgs, cfg: &RunConfig, stdout: &mut (dyn Write + Send)) -> Result<()> {
    let charges = match &a.charges {
        Some(s) => parse_charge_pair(s)?,
        None => DEFAULT_CHARGES,
    };
    let delta = a.delta.or(cfg.delta).unwrap_or(0.0);
    let run = run_demo(charges, delta, cfg.tolerance())?;
    std::fs::create_dir_all(&a.out_dir).map_err(|source| PslError::Io {
        path: a.out_dir.display().to_string(),
        source,
    })?;
    for (name, pts) in [("demo_q0.csv", &run.q0), ("demo_q1.csv", &run.q1)] {
        let path = a.out_dir.join(name);
        io::write_text(&path, &io::sweep_csv(pts))?;
        let _ = writeln!(stdout, "{}", path.display());
    }
    Ok(())
}

pub fn cmd_verify(
    a: &VerifyArgs,
    cfg: &RunConfig,
    stdout: &mut (dyn Write + Send),
    stderr: &mut (dyn Write + Send),
) -> Result<i32> {
    let opts = VerifyOptions {
        trials: a.trials.or(cfg.trials).unwrap_or(VerifyOptions::default().trials),
        seed: a.seed.or(cfg.seed).unwrap_or(VerifyOptions::default().seed),
        inject_fault: a.inject_fault,
    };
    let reports = run_verify(&opts)?;
    let mut text = String::new();
    for r in &reports {
        text.push_str(&serde_json::to_string(r).expect("report serializes"));
        text.push('\n');
    }
    emit(a.output.as_deref().or(cfg.output.as_deref()), &text, stdout)?;
    let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
    let _ = writeln!(
        stderr,
        "verify: {} reports, {} failed",
        reports.len(),
        failed.len()
    );
    for r in failed.iter().take(10) {
        let _ = writeln!(stderr, "  FAIL {} (max rel err {:e})", r.instance, r.max_rel_err);
    }
    Ok(if failed.is_empty() { 0 } else { EXIT_VERIFY_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("3:9:1").unwrap(), vec![3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        assert_eq!(parse_grid("0:1:0.25").unwrap().len(), 5);
        assert_eq!(parse_grid("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_grid("2,1").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(RunConfig::parse("cutoff = 12.0\ngrid = [3.0, 4.0]\n").is_ok());
        assert!(matches!(
            RunConfig::parse("cutof = 12.0\n"),
            Err(PslError::InvalidConfig(_))
        ));
    }
}
