use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chiral_wgm::config::{load_config, LoadedConfig};
use chiral_wgm::cqed::HilbertSpace;
use chiral_wgm::error::{Error, Result};
use chiral_wgm::model::{hz_from_angular, Direction};
use chiral_wgm::output::{render, write_text, Format};
use chiral_wgm::report::{chirality_report, compare_report, render_chirality, render_compare, Tolerances};
use chiral_wgm::sweep::{run_directions, run_sweep, Method, Spectrum};

/// Transmission spectra of a ring resonator with a chirally coupled emitter.
#[derive(Parser, Debug)]
#[command(name = "chiral-wgm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep the detuning and write the spectrum.
    Spectrum(SweepArgs),
    /// Sweep several methods and report their pairwise differences.
    Compare(SweepArgs),
    /// Sweep forward and backward and report the contrast.
    Chirality(SweepArgs),
    /// Check a configuration file and print the derived parameters.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Comma-separated subset of tm, spt, cqed-semiclassical, cqed-master.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// forward, backward or both.
    #[arg(long)]
    direction: Option<String>,
    #[arg(long)]
    points: Option<usize>,
    /// Detuning range `min:max` in units of kappa_tot.
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Fock levels kept per resonator mode in the master equation.
    #[arg(long)]
    n_max: Option<usize>,
    /// Solve the master equation at every n-th grid point.
    #[arg(long)]
    stride: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { config } => validate(&config),
        Command::Spectrum(args) => spectrum(&args),
        Command::Compare(args) => compare(&args),
        Command::Chirality(args) => chirality(&args),
    }
}

fn parse_directions(s: &str) -> Result<Vec<Direction>> {
    match s {
        "both" => Ok(vec![Direction::Forward, Direction::Backward]),
        other => other
            .parse::<Direction>()
            .map(|d| vec![d])
            .map_err(|_| Error::Config {
                path: "--direction".into(),
                message: format!("expected forward, backward or both, got {other:?}"),
            }),
    }
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Config {
        path: "--range".into(),
        message: format!("expected min:max, got {s:?}"),
    };
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn load(args: &SweepArgs) -> Result<LoadedConfig> {
    let mut c = load_config(&args.config)?;
    if let Some(m) = &args.methods {
        c.sweep.methods = m.clone();
    }
    if let Some(d) = &args.direction {
        c.sweep.directions = parse_directions(d)?;
    }
    if let Some(p) = args.points {
        c.sweep.points = p;
    }
    if let Some(r) = &args.range {
        (c.sweep.min_over_kappa_tot, c.sweep.max_over_kappa_tot) = parse_range(r)?;
    }
    if let Some(s) = args.stride {
        c.sweep.master_stride = s;
    }
    if let Some(n) = args.n_max {
        c.master.space = HilbertSpace::new(n, n).map_err(|e| Error::Config {
            path: "--n-max".into(),
            message: e.to_string(),
        })?;
    }
    c.sweep.validate().map_err(|e| Error::Config {
        path: "sweep".into(),
        message: e.to_string(),
    })?;
    Ok(c)
}

fn with_echo(mut spectra: Vec<Spectrum>, c: &LoadedConfig) -> Vec<Spectrum> {
    for s in &mut spectra {
        s.metadata.input = Some(c.raw.clone());
    }
    spectra
}

/// `out.csv` becomes `out_forward.csv`.
fn suffixed(path: &Path, direction: Direction) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{}.{}", direction.as_str(), ext.to_string_lossy()),
        None => format!("{stem}_{}", direction.as_str()),
    };
    path.with_file_name(name)
}

fn write_spectra(spectra: &[Spectrum], out: Option<&Path>, format: Format) -> Result<()> {
    let many = spectra.len() > 1;
    for s in spectra {
        let text = render(s, format)?;
        match out {
            Some(p) if many => write_text(&suffixed(p, s.direction), &text)?,
            Some(p) => write_text(p, &text)?,
            None => {
                if many {
                    println!("# {}", s.direction.as_str());
                }
                print!("{text}");
            }
        }
    }
    Ok(())
}

fn spectrum(args: &SweepArgs) -> Result<()> {
    let c = load(args)?;
    let spectra = with_echo(run_directions(&c.system, &c.sweep, &c.master)?, &c);
    for s in &spectra {
        for p in &s.metadata.pairwise {
            log::info!("{} {} vs {}: max |dT| = {:.3e}", s.direction.as_str(), p.first, p.second, p.max_abs_diff);
        }
    }
    write_spectra(&spectra, args.out.as_deref(), args.format)
}

fn compare(args: &SweepArgs) -> Result<()> {
    let c = load(args)?;
    let spectra = with_echo(run_directions(&c.system, &c.sweep, &c.master)?, &c);
    let mut reports = Vec::new();
    for s in &spectra {
        let r = compare_report(std::slice::from_ref(s), &Tolerances::default())?;
        print!("{}", render_compare(&r));
        reports.push(r);
    }
    if let Some(p) = &args.out {
        let text = match args.format {
            Format::Json => serde_json::to_string_pretty(&reports)?,
            Format::Csv => reports.iter().map(render_compare).collect::<Vec<_>>().join("\n"),
        };
        write_text(p, &text)?;
    }
    Ok(())
}

fn chirality(args: &SweepArgs) -> Result<()> {
    let c = load(args)?;
    let forward = run_sweep(&c.system.with_direction(Direction::Forward), &c.sweep, &c.master)?;
    let backward = run_sweep(&c.system.with_direction(Direction::Backward), &c.sweep, &c.master)?;
    let report = chirality_report(&forward, &backward)?;
    print!("{}", render_chirality(&report));
    if let Some(p) = &args.out {
        write_spectra(&with_echo(vec![forward, backward], &c), Some(p), args.format)?;
    }
    Ok(())
}

fn validate(path: &Path) -> Result<()> {
    let c = load_config(path)?;
    let s = &c.system;
    let r = &s.rates;
    println!("configuration OK");
    println!("  modal number m      = {}", s.geometry.modal_number());
    println!("  kappa_tot/2pi       = {:.6e} Hz", hz_from_angular(r.kappa_tot()));
    println!("  g/2pi               = {:.6e} Hz (g/kappa_tot = {:.6})", hz_from_angular(r.g), r.g / r.kappa_tot());
    println!("  Gamma/2pi           = {:.6e} Hz", hz_from_angular(r.emitter_decay));
    println!("  h/2pi               = {:.6e} Hz (h/kappa_tot = {:.6})", hz_from_angular(r.h), r.h / r.kappa_tot());
    println!("  epsilon             = {:.6e}", r.epsilon);
    println!("  coupler t, alpha    = {:.12}, {:.12}", s.coupler.t(), s.coupler.alpha());
    println!("  alpha_in, sigma_z   = {}, {}", s.drive_amplitude, s.sigma_z);
    let dirs: Vec<&str> = c.sweep.directions.iter().map(|d| d.as_str()).collect();
    println!(
        "  sweep               = [{}, {}] x {} points, methods {:?}, directions {:?}",
        c.sweep.min_over_kappa_tot,
        c.sweep.max_over_kappa_tot,
        c.sweep.points,
        c.sweep.methods.iter().map(|m| m.as_str()).collect::<Vec<_>>(),
        dirs
    );
    Ok(())
}
