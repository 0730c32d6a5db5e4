use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use warped_steklov::direct_oracle::{self, revolution_spectrum};
use warped_steklov::experiments::acceptance;
use warped_steklov::experiments::config::ConfigError;
use warped_steklov::experiments::kokarev::{kokarev_check, kokarev_csv, kokarev_sweep};
use warped_steklov::experiments::quasi_iso::{quasi_iso_check, quasi_iso_csv, random_pair};
use warped_steklov::experiments::volume::normalize_volume;
use warped_steklov::experiments::{run_sweep, sweep_csv, ExperimentConfig, ExperimentKind};
use warped_steklov::spectrum::fmt_float;
use warped_steklov::warped_assembler::{first_eigenvalues, steklov_spectrum_warped};
use warped_steklov::{MeshSpec, SpectrumWithProvenance};

const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser)]
#[command(version, about = "Steklov spectra of warped products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assembled spectrum as CSV.
    Spectrum(Common),
    /// Grid-solver spectrum of a surface of revolution as CSV.
    Oracle(Common),
    /// σ₁ over a list of ε.
    Sweep(Common),
    /// Run the acceptance suite.
    Verify(Common),
    /// Check σ₁·L(∂M) ≤ 8π(γ+1).
    Kokarev(Common),
    /// Eigenvalue ratios of random quasi-isometric pairs.
    QuasiIso(Common),
    /// Solve for the conformal factor that hits a target volume.
    NormalizeVolume(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config; the shipped default for the subcommand when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (stdout when neither this nor the config sets one).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base mesh elements (or axial nodes for `oracle`).
    #[arg(long)]
    mesh: Option<usize>,
    #[arg(long)]
    top: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Config(String),
    Verification(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<warped_steklov::Error> for Failure {
    fn from(e: warped_steklov::Error) -> Self {
        Failure::Verification(e.to_string())
    }
}

fn default_config(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Spectrum => include_str!("../../configs/cylinder_spectrum.toml"),
        ExperimentKind::Oracle => include_str!("../../configs/oracle_bump.toml"),
        ExperimentKind::Sweep => include_str!("../../configs/sweep_default.toml"),
        ExperimentKind::Verify => include_str!("../../configs/verify.toml"),
        ExperimentKind::Kokarev => include_str!("../../configs/kokarev_2d.toml"),
        ExperimentKind::QuasiIso => include_str!("../../configs/quasi_iso.toml"),
        ExperimentKind::NormalizeVolume => include_str!("../../configs/normalize_volume.toml"),
    }
}

fn load(kind: ExperimentKind, args: &Common) -> Result<ExperimentConfig, Failure> {
    let cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::parse(default_config(kind))?,
    };
    if cfg.kind != kind {
        return Err(Failure::Config(format!(
            "kind: config is for `{}`, not `{}`",
            cfg.kind.as_str(),
            kind.as_str()
        )));
    }
    Ok(cfg)
}

fn emit(cfg: &ExperimentConfig, args: &Common, text: &str) -> Result<(), Failure> {
    match args.out.as_ref().or(cfg.out.as_ref()) {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Config(format!("out: cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn mesh(cfg: &ExperimentConfig, args: &Common, default: MeshSpec) -> MeshSpec {
    let mut m = cfg.mesh_or(default);
    if let Some(n) = args.mesh {
        m.elements = n;
    }
    m
}

fn spectrum(args: &Common) -> Result<(), Failure> {
    let cfg = load(ExperimentKind::Spectrum, args)?;
    let spec = cfg.metric()?.build()?;
    let mesh = mesh(&cfg, args, MeshSpec::default());
    let section = cfg.spectrum.clone().unwrap_or_default();
    let top = args.top.or(section.top);
    let count = args.count.or(section.count);
    let result = match (top, count) {
        (Some(top), _) => steklov_spectrum_warped(&spec, top, &mesh)?,
        (None, Some(count)) => {
            // first `count` values, with provenance
            let values = first_eigenvalues(&spec, count, &mesh)?;
            let top = values.last().copied().unwrap_or(0.0);
            let full = steklov_spectrum_warped(&spec, top.max(1e-12) * (1.0 + 1e-9), &mesh)?;
            truncate_entries(full, count)
        }
        (None, None) => {
            return Err(Failure::Config("spectrum.top: one of top or count is required".into()))
        }
    };
    emit(&cfg, args, &result.to_csv())
}

fn truncate_entries(s: SpectrumWithProvenance, count: usize) -> SpectrumWithProvenance {
    let mut kept = Vec::new();
    let mut total = 0;
    for e in s.entries() {
        if total >= count {
            break;
        }
        total += e.multiplicity;
        kept.extend(e.sources.iter().copied());
    }
    SpectrumWithProvenance::from_sources(kept)
}

fn oracle(args: &Common) -> Result<(), Failure> {
    let cfg = load(ExperimentKind::Oracle, args)?;
    let mut grid = cfg.oracle_grid()?;
    if let Some(n) = args.mesh {
        grid.n_t = n;
    }
    let section = cfg.oracle.clone().expect("validated");
    let top = args.top.or(section.top);
    let count = args.count.or(section.count);
    let values = revolution_spectrum(&grid)?;
    let selected: Vec<f64> = match (top, count) {
        (Some(top), _) => values.iter().copied().filter(|v| *v <= top).collect(),
        (None, Some(c)) => values.iter().copied().take(c).collect(),
        (None, None) => values.clone(),
    };
    let mut out = String::from("value,multiplicity,lambda_fiber,mu_mode,branch\n");
    for v in &selected {
        let _ = writeln!(out, "{},1,,,", fmt_float(*v));
    }
    emit(&cfg, args, &out)?;
    if section.compare {
        let top = top.expect("validated");
        let r = direct_oracle::compare_with_assembler(&grid, top, section.tolerance)?;
        eprintln!(
            "oracle vs assembler up to {top}: {} vs {} eigenvalues, max rel dev {:.3e} (tol {:.1e})",
            r.oracle_count, r.assembler_count, r.max_relative_deviation, r.tolerance
        );
        if !r.passed {
            let first = r.first_unmatched.map(|v| format!(", first unmatched {v}")).unwrap_or_default();
            return Err(Failure::Verification(format!("comparison failed{first}")));
        }
    }
    Ok(())
}

fn sweep(args: &Common) -> Result<(), Failure> {
    let cfg = load(ExperimentKind::Sweep, args)?;
    let mut params = cfg.sweep_params()?;
    if let Some(n) = args.mesh {
        params.mesh.elements = n;
    }
    let rows = run_sweep(&params)?;
    emit(&cfg, args, &sweep_csv(&rows))
}

fn verify(args: &Common) -> Result<(), Failure> {
    let cfg = load(ExperimentKind::Verify, args)?;
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let mut report = String::new();
    let mut failed = 0;
    for (id, name, check) in acceptance::criteria() {
        let outcome = acceptance::run_one(id, name, check, seed);
        eprintln!("{outcome}");
        let _ = writeln!(report, "{outcome}");
        if !outcome.passed {
            failed += 1;
        }
    }
    if args.out.is_some() || cfg.out.is_some() {
        emit(&cfg, args, &report)?;
    }
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} of 10 criteria failed")));
    }
    Ok(())
}

fn kokarev(args: &Common) -> Result<(), Failure> {
    let cfg = load(ExperimentKind::Kokarev, args)?;
    let section = cfg.kokarev.clone().unwrap_or_default();
    let rows = match (section.sigma1, section.boundary_length) {
        (Some(s), Some(l)) => vec![(None, kokarev_check(s, l, section.genus))],
        _ => {
            let mut params = cfg.sweep_params()?;
            if let Some(n) = args.mesh {
                params.mesh.elements = n;
            }
            kokarev_sweep(&params, section.genus)?
                .into_iter()
                .map(|(row, r)| (Some(row.epsilon), r))
                .collect()
        }
    };
    emit(&cfg, args, &kokarev_csv(&rows))?;
    if rows.iter().any(|(_, r)| !r.passed) {
        return Err(Failure::Verification("bound violated".into()));
    }
    Ok(())
}

fn quasi_iso(args: &Common) -> Result<(), Failure> {
    let cfg = load(ExperimentKind::QuasiIso, args)?;
    let q = cfg.quasi_iso()?;
    let template = cfg.metric()?.build()?;
    let mesh = mesh(&cfg, args, MeshSpec::new(400));
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = q.m.unwrap_or(template.dimension());
    let k_max = args.count.unwrap_or(q.k_max);
    let mut reports = Vec::with_capacity(q.pairs);
    for _ in 0..q.pairs {
        let (a, b) = random_pair(&mut rng, &template, q.amplitude)?;
        reports.push(quasi_iso_check(&a, &b, m, k_max, &mesh)?);
    }
    emit(&cfg, args, &quasi_iso_csv(&reports))?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} pairs violate the ratio bound")));
    }
    Ok(())
}

fn normalize(args: &Common) -> Result<(), Failure> {
    let cfg = load(ExperimentKind::NormalizeVolume, args)?;
    let v = cfg.normalize_volume.clone().expect("validated");
    let integrand = v.integrand.clone().unwrap_or_else(|| vec![1.0; v.phi.len()]);
    let r = normalize_volume(&integrand, &v.weights, &v.phi, v.dimension, v.target)?;
    let text = format!(
        "c,volume,target,residual\n{},{},{},{}\n",
        fmt_float(r.c),
        fmt_float(r.volume),
        fmt_float(v.target),
        fmt_float(r.residual)
    );
    emit(&cfg, args, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(a) => spectrum(a),
        Command::Oracle(a) => oracle(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::Kokarev(a) => kokarev(a),
        Command::QuasiIso(a) => quasi_iso(a),
        Command::NormalizeVolume(a) => normalize(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
    }
}
