//! Command-line front end: runs transfer, sweep and capacitor scenarios
//! from flags or a flat JSON config and emits CSV/JSON artifacts.
//!
//! Exit codes: 0 on success, 1 when a physical precondition is violated
//! (domain error), 2 on usage or config-parse errors.

mod config;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::thread;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use boxspring::{
    audit_ledger, capacitor_energy_breakdown, convergence_sweep, electrical_to_mechanical,
    energy_breakdown, mechanical_to_electrical, photon_drop_mass, rc_total_dissipation,
    rc_transient_numeric, simulate_transfer, sweep_row, validate_sweep_counts, write_records_csv,
    write_series_csv, write_sweep_csv, AnalogyMap, AuditReport, CapacitorCircuit, EnergyBreakdown,
    SpringBoxParams, TransferPlan, TransferSummary, SWEEP_CSV_HEADER,
};

pub use config::{load_config, ScenarioConfig};

const SYNOPSIS: &str =
    "usage: boxspring <analytic|transfer|sweep|capacitor|map> [options]  (--help for details)";

#[derive(Debug)]
pub enum CliError {
    /// Wrong invocation or unparseable config; exit code 2.
    Usage(String),
    /// Violated physical precondition or failed run; exit code 1.
    Domain(String),
}

impl From<boxspring::Error> for CliError {
    fn from(err: boxspring::Error) -> Self {
        CliError::Domain(err.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    fn wants_csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    fn wants_json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

#[derive(Parser)]
#[command(
    name = "boxspring",
    version,
    about = "Energy ledger for two spring-suspended boxes trading liquid drops, \
             and the matching two-capacitor circuit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the closed-form energy breakdown of the box pair.
    Analytic(AnalyticArgs),
    /// Simulate the drop-by-drop transfer, audit the ledger, write artifacts.
    Transfer(TransferArgs),
    /// Tabulate the first-order approximation error across drop counts.
    Sweep(SweepArgs),
    /// Two-capacitor energies, with the RC transient when a resistance is given.
    Capacitor(CapacitorArgs),
    /// Map parameters between the mechanical and electrical descriptions.
    Map(MapArgs),
}

#[derive(Args)]
struct MechanicalFlags {
    /// Total liquid mass M (kg).
    #[arg(long)]
    mass: Option<f64>,
    /// Spring stiffness k (N/m).
    #[arg(long)]
    stiffness: Option<f64>,
    /// Gravitational acceleration g (m/s²).
    #[arg(long)]
    gravity: Option<f64>,
}

#[derive(Args)]
struct AnalyticArgs {
    #[command(flatten)]
    mechanical: MechanicalFlags,
    /// Drop count N (even); with --photon-energy it fixes M = N·E/c².
    #[arg(long)]
    drops: Option<u64>,
    /// Photon energy E (J); each drop carries E/c² of mass.
    #[arg(long)]
    photon_energy: Option<f64>,
    /// Flat JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TransferArgs {
    #[command(flatten)]
    mechanical: MechanicalFlags,
    /// Drop count N (even).
    #[arg(long)]
    drops: Option<u64>,
    /// Photon energy E (J); each drop carries E/c² of mass.
    #[arg(long)]
    photon_energy: Option<f64>,
    /// Output directory for ledger.csv / summary.json / audit.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Which artifacts to write.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Exit nonzero if any ledger audit check fails.
    #[arg(long)]
    check: bool,
    /// Flat JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    mechanical: MechanicalFlags,
    /// Comma-separated drop counts, e.g. 10,100,1000 (even, increasing).
    #[arg(long, value_delimiter = ',')]
    drops: Vec<u64>,
    /// Worker threads for independent drop counts.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory for sweep.csv (table always prints to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Which artifacts to write.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Flat JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CapacitorArgs {
    /// Capacitance C of each capacitor (F).
    #[arg(long)]
    capacitance: Option<f64>,
    /// Initial charge Q0 on the first capacitor (C).
    #[arg(long)]
    charge: Option<f64>,
    /// Series resistance R (Ω); omit or 0 for the ideal circuit.
    #[arg(long)]
    resistance: Option<f64>,
    /// Integration step as a fraction of τ: step = τ/step-fraction (≥ 50).
    #[arg(long)]
    step_fraction: Option<f64>,
    /// Integration horizon in units of τ (≥ 10).
    #[arg(long)]
    horizon_multiplier: Option<f64>,
    /// Output directory for capacitor.json / transient.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Which artifacts to write.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Flat JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct MapArgs {
    #[command(flatten)]
    mechanical: MechanicalFlags,
    /// Initial charge Q0 (C) for the electrical → mechanical direction.
    #[arg(long)]
    charge: Option<f64>,
    /// Capacitance C (F) for the electrical → mechanical direction.
    #[arg(long)]
    capacitance: Option<f64>,
    /// Flat JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Entry point used by the binary and by tests; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("{SYNOPSIS}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analytic(args) => cmd_analytic(args),
        Command::Transfer(args) => cmd_transfer(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Capacitor(args) => cmd_capacitor(args),
        Command::Map(args) => cmd_map(args),
    }
}

fn load_optional_config(path: &Option<PathBuf>) -> Result<ScenarioConfig, CliError> {
    match path {
        Some(p) => load_config(p),
        None => Ok(ScenarioConfig::default()),
    }
}

fn require<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| {
        CliError::Domain(format!(
            "missing required value \"{name}\" (flag --{flag} or config field \"{name}\")",
            flag = name.replace('_', "-")
        ))
    })
}

/// Mechanical inputs after merging flags over the config file.
struct MechanicalInputs {
    mass: Option<f64>,
    stiffness: Option<f64>,
    gravity: Option<f64>,
    drops: Option<u64>,
    photon_energy: Option<f64>,
}

impl MechanicalInputs {
    fn merge(
        flags: &MechanicalFlags,
        drops: Option<u64>,
        photon_energy: Option<f64>,
        cfg: &ScenarioConfig,
    ) -> Self {
        Self {
            mass: flags.mass.or(cfg.mass),
            stiffness: flags.stiffness.or(cfg.stiffness),
            gravity: flags.gravity.or(cfg.gravity),
            drops: drops.or(cfg.drops),
            photon_energy: photon_energy.or(cfg.photon_energy),
        }
    }

    /// Build params from mass, or from N photons of the given energy; both
    /// together must agree to 1e-12 relative.
    fn resolve_params(&self) -> Result<SpringBoxParams, CliError> {
        let stiffness = require(self.stiffness, "stiffness")?;
        let gravity = require(self.gravity, "gravity")?;
        let mass = match (self.mass, self.photon_energy) {
            (Some(mass), None) => mass,
            (None, Some(energy)) => {
                let drops = require(self.drops, "drops")?;
                photon_drop_mass(energy)? * drops as f64
            }
            (Some(mass), Some(energy)) => {
                let drops = require(self.drops, "drops")?;
                let implied = photon_drop_mass(energy)? * drops as f64;
                if (implied - mass).abs() > 1e-12 * mass.abs().max(implied.abs()) {
                    return Err(CliError::Domain(format!(
                        "mass {mass} kg conflicts with photon_energy: {drops} photons of \
                         E/c² add up to {implied} kg"
                    )));
                }
                mass
            }
            (None, None) => return Err(require::<f64>(None, "mass").unwrap_err()),
        };
        Ok(SpringBoxParams::new(mass, stiffness, gravity)?)
    }

    fn resolve_plan(&self, params: &SpringBoxParams) -> Result<TransferPlan, CliError> {
        let drops = require(self.drops, "drops")?;
        let plan = match self.photon_energy {
            Some(energy) => TransferPlan::photon(params, drops, energy)?,
            None => TransferPlan::liquid(params, drops)?,
        };
        Ok(plan)
    }
}

fn print_breakdown(breakdown: &EnergyBreakdown) {
    println!("initial_box1: {} J", breakdown.initial_box1);
    println!("initial_total: {} J", breakdown.initial_total);
    println!("final_per_box: {} J", breakdown.final_per_box);
    println!("final_total: {} J", breakdown.final_total);
    println!("delta_total: {} J", breakdown.delta_total);
}

fn cmd_analytic(args: AnalyticArgs) -> Result<(), CliError> {
    let cfg = load_optional_config(&args.config)?;
    let inputs = MechanicalInputs::merge(&args.mechanical, args.drops, args.photon_energy, &cfg);
    let params = inputs.resolve_params()?;
    print_breakdown(&energy_breakdown(&params));
    Ok(())
}

fn create_output(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    let path = dir.join(name);
    let file = File::create(&path)
        .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut out = create_output(dir, name)?;
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|e| CliError::Domain(format!("cannot serialize {name}: {e}")))?;
    out.write_all(b"\n")
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Domain(format!("cannot write {name}: {e}")))?;
    println!("wrote {}", dir.join(name).display());
    Ok(())
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Domain(format!("cannot create {}: {e}", dir.display())))
}

fn print_transfer(summary: &TransferSummary, params: &SpringBoxParams, plan: &TransferPlan) {
    let e_in = energy_breakdown(params).initial_total;
    println!(
        "transfer of {} drops (N = {}, m = {} kg, q = {} m)",
        plan.drop_count() / 2,
        plan.drop_count(),
        plan.drop_mass(),
        plan.step()
    );
    println!("delta1_exact: {} J", summary.delta1_exact);
    println!("delta2_exact: {} J", summary.delta2_exact);
    println!(
        "delta_total_exact: {} J (E_in = {} J, ratio {})",
        summary.delta_total_exact,
        e_in,
        summary.delta_total_exact / e_in
    );
    println!("delta1_paper: {} J", summary.delta1_paper);
    println!("delta2_paper: {} J", summary.delta2_paper);
    println!("gravity_work_total: {} J", summary.gravity_work_total);
    println!("dissipation_total: {} J", summary.dissipation_total);
    println!(
        "final elastic energy per box: {} J",
        summary.final_elastic_box1
    );
}

fn print_audit(report: &AuditReport) {
    let passed = report.checks.iter().filter(|c| c.passed).count();
    println!("audit: {passed}/{} checks passed", report.checks.len());
    for check in report.checks.iter().filter(|c| !c.passed) {
        println!(
            "  FAILED {}: residual {} (scale {})",
            check.name, check.residual, check.scale
        );
    }
}

fn cmd_transfer(args: TransferArgs) -> Result<(), CliError> {
    let cfg = load_optional_config(&args.config)?;
    let inputs = MechanicalInputs::merge(&args.mechanical, args.drops, args.photon_energy, &cfg);
    let params = inputs.resolve_params()?;
    let plan = inputs.resolve_plan(&params)?;

    let summary = simulate_transfer(&params, &plan)?;
    let report = audit_ledger(&summary, &params, &plan);

    let out_dir = args.out.or(cfg.out).unwrap_or_else(|| PathBuf::from("."));
    let format = args.format.or(cfg.format).unwrap_or(OutputFormat::Both);
    ensure_out_dir(&out_dir)?;

    print_transfer(&summary, &params, &plan);
    print_audit(&report);

    if format.wants_csv() {
        let mut out = create_output(&out_dir, "ledger.csv")?;
        write_records_csv(&summary.records, &mut out)
            .map_err(|e| CliError::Domain(format!("cannot write ledger.csv: {e}")))?;
        println!("wrote {}", out_dir.join("ledger.csv").display());
    }
    if format.wants_json() {
        write_json(&out_dir, "summary.json", &summary)?;
        write_json(&out_dir, "audit.json", &report)?;
    }

    if args.check && !report.passed {
        return Err(CliError::Domain(format!(
            "ledger audit failed: {}",
            report.failures().join(", ")
        )));
    }
    Ok(())
}

fn parallel_sweep(
    params: &SpringBoxParams,
    counts: &[u64],
    jobs: usize,
) -> Result<Vec<boxspring::SweepRow>, CliError> {
    validate_sweep_counts(counts)?;
    let slots: Mutex<Vec<Option<boxspring::Result<boxspring::SweepRow>>>> =
        Mutex::new(vec![None; counts.len()]);
    thread::scope(|scope| {
        for worker in 0..jobs.min(counts.len()) {
            let slots = &slots;
            scope.spawn(move || {
                for (index, &n) in counts.iter().enumerate().skip(worker).step_by(jobs) {
                    let row = sweep_row(params, n);
                    slots.lock().unwrap()[index] = Some(row);
                }
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| {
            slot.expect("worker filled every slot")
                .map_err(CliError::from)
        })
        .collect()
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let cfg = load_optional_config(&args.config)?;
    let inputs = MechanicalInputs::merge(&args.mechanical, None, None, &cfg);
    let params = inputs.resolve_params()?;

    let counts: Vec<u64> = if args.drops.is_empty() {
        require(cfg.sweep.clone(), "sweep")?
    } else {
        args.drops.clone()
    };
    let jobs = args.jobs.or(cfg.jobs).unwrap_or(1).max(1);

    let rows = if jobs == 1 {
        convergence_sweep(&params, &counts)?
    } else {
        parallel_sweep(&params, &counts, jobs)?
    };

    println!("{SWEEP_CSV_HEADER}");
    for row in &rows {
        println!(
            "{},{},{},{}",
            row.drop_count,
            row.relative_error_delta1,
            row.relative_error_delta2,
            row.relative_error_total
        );
    }

    if let Some(out_dir) = args.out.or(cfg.out) {
        let format = args.format.or(cfg.format).unwrap_or(OutputFormat::Both);
        ensure_out_dir(&out_dir)?;
        if format.wants_csv() {
            let mut out = create_output(&out_dir, "sweep.csv")?;
            write_sweep_csv(&rows, &mut out)
                .map_err(|e| CliError::Domain(format!("cannot write sweep.csv: {e}")))?;
            println!("wrote {}", out_dir.join("sweep.csv").display());
        }
        if format.wants_json() {
            write_json(&out_dir, "sweep.json", &rows)?;
        }
    }
    Ok(())
}

fn cmd_capacitor(args: CapacitorArgs) -> Result<(), CliError> {
    let cfg = load_optional_config(&args.config)?;
    let capacitance = require(args.capacitance.or(cfg.capacitance), "capacitance")?;
    let charge = require(args.charge.or(cfg.charge), "charge")?;
    let resistance = args.resistance.or(cfg.resistance).unwrap_or(0.0);
    let circuit = CapacitorCircuit::new(capacitance, charge, resistance)?;

    let breakdown = capacitor_energy_breakdown(&circuit);
    print_breakdown(&breakdown);

    let out_dir = args.out.or(cfg.out);
    let format = args.format.or(cfg.format).unwrap_or(OutputFormat::Both);
    if let Some(dir) = &out_dir {
        ensure_out_dir(dir)?;
        if format.wants_json() {
            write_json(dir, "capacitor.json", &breakdown)?;
        }
    }

    if resistance > 0.0 {
        let tau = circuit.time_constant()?;
        let step_fraction = args.step_fraction.or(cfg.step_fraction).unwrap_or(100.0);
        let horizon_multiplier = args
            .horizon_multiplier
            .or(cfg.horizon_multiplier)
            .unwrap_or(20.0);
        let series = rc_transient_numeric(&circuit, tau / step_fraction, horizon_multiplier * tau)?;
        let dissipated = series.last().map_or(f64::NAN, |s| s.cumulative_dissipated);
        println!(
            "transient: tau = {tau} s, {} samples, dissipated {} J (analytic Q0²/4C = {} J)",
            series.len(),
            dissipated,
            rc_total_dissipation(&circuit)
        );
        if let Some(dir) = &out_dir {
            if format.wants_csv() {
                let mut out = create_output(dir, "transient.csv")?;
                write_series_csv(&series, &mut out)
                    .map_err(|e| CliError::Domain(format!("cannot write transient.csv: {e}")))?;
                println!("wrote {}", dir.join("transient.csv").display());
            }
        }
    }
    Ok(())
}

fn cmd_map(args: MapArgs) -> Result<(), CliError> {
    let cfg = load_optional_config(&args.config)?;
    let charge = args.charge.or(cfg.charge);
    let capacitance = args.capacitance.or(cfg.capacitance);
    let mechanical = MechanicalInputs::merge(&args.mechanical, None, None, &cfg);

    let electrical_given = charge.is_some() || capacitance.is_some();
    let mechanical_given = args.mechanical.mass.is_some() || args.mechanical.stiffness.is_some();
    if electrical_given && mechanical_given {
        return Err(CliError::Usage(
            "give either mechanical inputs (--mass --stiffness --gravity) or electrical ones \
             (--charge --capacitance --gravity), not both"
                .into(),
        ));
    }

    if electrical_given {
        let circuit = CapacitorCircuit::ideal(
            require(capacitance, "capacitance")?,
            require(charge, "charge")?,
        )?;
        let gravity = require(mechanical.gravity, "gravity")?;
        let params = electrical_to_mechanical(&circuit, gravity)?;
        println!("total_mass: {} kg", params.total_mass());
        println!("stiffness: {} N/m", params.stiffness());
        println!("gravity: {} m/s²", params.gravity());
        println!(
            "stored energy (both sides): {} J",
            energy_breakdown(&params).initial_total
        );
    } else {
        let params = mechanical.resolve_params()?;
        let circuit = mechanical_to_electrical(&params);
        let map = AnalogyMap::between(&params, &circuit);
        println!("initial_charge: {} C", circuit.initial_charge());
        println!("capacitance: {} F", circuit.capacitance());
        println!(
            "stored energy (both sides): {} J",
            capacitor_energy_breakdown(&circuit).initial_total
        );
        println!(
            "map ratios: charge/weight = {}, capacitance/stiffness = {}, voltage/displacement = {}",
            map.charge_per_weight, map.capacitance_per_stiffness, map.voltage_per_displacement
        );
    }
    Ok(())
}
