//! `xducer`: command-line pipeline over the transducer design-evaluation
//! toolkit. Every subcommand reads the sectioned config format, writes CSV
//! (and SVG where useful) into the output directory, and records a run
//! manifest with input/output digests.

mod material;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use xducer_core::config::{Config, EtaPeMode, PulseMode};
use xducer_core::dynamics::swap_efficiency;
use xducer_core::fields::{
    om_coupling_moving_boundary, om_coupling_photoelastic, parse_surface_file, parse_volume_file,
    piezo_coupling, region_counts, total_om_coupling, Region,
};
use xducer_core::hybridization::{mechanical_loss_budget, sweep_anticrossing};
use xducer_core::readout::{
    added_noise, efficiency_budget, evaluate_pulse, optimize_pulse_traced, BudgetReport,
    PulseBounds, ReadoutResult,
};
use xducer_core::svg::ScatterPlot;

#[derive(Parser)]
#[command(name = "xducer", version, about = "Transducer design-evaluation pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file; built-in reference values are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Print the fully resolved config and exit.
    #[arg(long, global = true)]
    dump_config: bool,

    /// Reserved for multi-start optimizer ordering; never changes results.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the resonant qubit-phonon swap and report eta_pe.
    Swap,
    /// Sweep the readout pulse grid (n_o, tau) and plot the noise tradeoff.
    Readout,
    /// Produce the end-to-end efficiency and count-rate budget.
    Budget,
    /// Sweep the piezo mode across the OMC comb and tabulate hybrid modes.
    Hybridize,
    /// Compute coupling rates from exported field datasets.
    Couple(CoupleArgs),
    /// Optimize the readout pulse under the noise budget.
    Optimize,
}

#[derive(Args)]
struct CoupleArgs {
    /// Volume samples (piezo and/or photoelastic field groups).
    #[arg(long)]
    volume: Option<PathBuf>,
    /// Surface samples for the moving-boundary contribution.
    #[arg(long)]
    surface: Option<PathBuf>,
    /// Material constants and normalization energies.
    #[arg(long)]
    material: PathBuf,
    /// Optional refined volume dataset for a convergence estimate.
    #[arg(long)]
    refined_volume: Option<PathBuf>,
}

struct Manifest {
    subcommand: String,
    config_path: Option<PathBuf>,
    inputs: Vec<(PathBuf, String)>,
    outputs: Vec<(PathBuf, String)>,
    started: Instant,
}

impl Manifest {
    fn new(subcommand: &str, config_path: Option<&PathBuf>) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            config_path: config_path.cloned(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
        }
    }

    fn record_input(&mut self, path: &Path) -> Result<(), String> {
        let digest = sha256_file(path)?;
        self.inputs.push((path.to_path_buf(), digest));
        Ok(())
    }

    fn write_output(&mut self, dir: &Path, name: &str, content: &str) -> Result<(), String> {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        let mut hasher = Sha256::new();
        hasher.update(content.as_bytes());
        self.outputs.push((path, hex(&hasher.finalize())));
        Ok(())
    }

    fn finish(&self, dir: &Path) -> Result<(), String> {
        let mut text = String::new();
        let _ = writeln!(text, "subcommand: {}", self.subcommand);
        let _ = writeln!(text, "version: {}", env!("CARGO_PKG_VERSION"));
        match &self.config_path {
            Some(p) => {
                let _ = writeln!(text, "config: {}", p.display());
            }
            None => {
                let _ = writeln!(text, "config: <built-in defaults>");
            }
        }
        for (path, digest) in &self.inputs {
            let _ = writeln!(text, "input: {} sha256={digest}", path.display());
        }
        for (path, digest) in &self.outputs {
            let _ = writeln!(text, "output: {} sha256={digest}", path.display());
        }
        let _ = writeln!(
            text,
            "wall_time_ms: {}",
            self.started.elapsed().as_millis()
        );
        let path = dir.join("manifest.txt");
        std::fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn sha256_file(path: &Path) -> Result<String, String> {
    let data =
        std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut hasher = Sha256::new();
    hasher.update(&data);
    Ok(hex(&hasher.finalize()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    let config = match &cli.config {
        Some(path) => Config::load(path).map_err(|e| e.to_string())?,
        None => Config::default(),
    };
    if cli.dump_config {
        print!("{}", config.dump());
        return Ok(());
    }
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| format!("cannot create {}: {e}", cli.out.display()))?;

    let name = match &cli.command {
        Command::Swap => "swap",
        Command::Readout => "readout",
        Command::Budget => "budget",
        Command::Hybridize => "hybridize",
        Command::Couple(_) => "couple",
        Command::Optimize => "optimize",
    };
    let mut manifest = Manifest::new(name, cli.config.as_ref());
    if let Some(path) = &cli.config {
        manifest.record_input(path)?;
    }

    match &cli.command {
        Command::Swap => cmd_swap(&config, &cli.out, &mut manifest)?,
        Command::Readout => cmd_readout(&config, &cli.out, &mut manifest)?,
        Command::Budget => cmd_budget(&config, &cli.out, &mut manifest)?,
        Command::Hybridize => cmd_hybridize(&config, &cli.out, &mut manifest)?,
        Command::Couple(args) => cmd_couple(&config, args, &cli.out, &mut manifest)?,
        Command::Optimize => cmd_optimize(&config, &cli.out, &mut manifest)?,
    }
    manifest.finish(&cli.out)
}

fn cmd_swap(config: &Config, out: &Path, manifest: &mut Manifest) -> Result<(), String> {
    let result =
        swap_efficiency(&config.rates, &config.sim, 200).map_err(|e| e.to_string())?;
    let mut csv = String::from("t_s,pop_qubit,pop_phonon,trace\n");
    for p in &result.trace {
        let _ = writeln!(csv, "{},{},{},{}", p.t, p.pop_qubit, p.pop_phonon, p.trace);
    }
    manifest.write_output(out, "swap.csv", &csv)?;
    println!(
        "swap: eta_pe = {:.6} at t_swap = {:.4e} s",
        result.eta_pe, result.t_swap
    );
    Ok(())
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn cmd_readout(config: &Config, out: &Path, manifest: &mut Manifest) -> Result<(), String> {
    let bounds = PulseBounds::default();
    let n_os = log_grid(bounds.n_o.0, bounds.n_o.1, 41);
    let taus = log_grid(bounds.tau.0, bounds.tau.1, 41);

    let mut csv = String::from("n_o,tau_s,gamma_om_hz,eta_om,n_added\n");
    let mut plot = ScatterPlot::new(
        "Readout efficiency over the pulse grid",
        "log10(n_o)",
        "log10(tau [s])",
        "eta_om",
    );
    for &n_o in &n_os {
        for &tau in &taus {
            let r = evaluate_pulse(&config.rates, &config.heating, n_o, tau)
                .map_err(|e| e.to_string())?;
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                n_o, tau, r.gamma_om, r.eta_om, r.n_added
            );
            plot.points.push((n_o.log10(), tau.log10(), r.eta_om));
        }
    }

    // feasibility boundary: for each n_o, the tau where the added noise hits
    // the budget (noise is monotone increasing in tau)
    let n_max = config.budget.noise_budget;
    for &n_o in &n_os {
        if added_noise(&config.heating, n_o, bounds.tau.1) <= n_max {
            continue;
        }
        if added_noise(&config.heating, n_o, bounds.tau.0) > n_max {
            continue;
        }
        let (mut a, mut b) = (bounds.tau.0, bounds.tau.1);
        for _ in 0..60 {
            let mid = (a * b).sqrt();
            if added_noise(&config.heating, n_o, mid) > n_max {
                b = mid;
            } else {
                a = mid;
            }
        }
        plot.boundary.push((n_o.log10(), a.log10()));
    }

    manifest.write_output(out, "readout.csv", &csv)?;
    manifest.write_output(out, "readout.svg", &plot.render())?;
    let at = evaluate_pulse(
        &config.rates,
        &config.heating,
        config.pulse.n_o,
        config.pulse.tau,
    )
    .map_err(|e| e.to_string())?;
    println!(
        "readout: at (n_o = {}, tau = {:.3e} s): gamma_om = {:.4e} Hz, eta_om = {:.4}, n_added = {:.4}",
        config.pulse.n_o, config.pulse.tau, at.gamma_om, at.eta_om, at.n_added
    );
    Ok(())
}

fn budget_pipeline(config: &Config) -> Result<(BudgetReport, f64, f64, &'static str, &'static str), String> {
    let eta_pe = match config.budget.eta_pe_mode {
        EtaPeMode::Fixed => config.budget.eta_pe_fixed,
        EtaPeMode::Computed => {
            swap_efficiency(&config.rates, &config.sim, 64)
                .map_err(|e| e.to_string())?
                .eta_pe
        }
    };
    let eta_pe_prov = match config.budget.eta_pe_mode {
        EtaPeMode::Fixed => "fixed",
        EtaPeMode::Computed => "computed",
    };
    let (pulse, readout): (_, ReadoutResult) = match config.budget.pulse_mode {
        PulseMode::Fixed => {
            let r = evaluate_pulse(
                &config.rates,
                &config.heating,
                config.pulse.n_o,
                config.pulse.tau,
            )
            .map_err(|e| e.to_string())?;
            (config.pulse.clone(), r)
        }
        PulseMode::Optimized => {
            let (p, r, _) = optimize_pulse_traced(
                &config.rates,
                &config.heating,
                config.budget.noise_budget,
                PulseBounds::default(),
                config.pulse.rep_rate,
            )
            .map_err(|e| e.to_string())?;
            (p, r)
        }
    };
    let pulse_prov = match config.budget.pulse_mode {
        PulseMode::Fixed => "fixed",
        PulseMode::Optimized => "optimized",
    };
    let report = efficiency_budget(
        eta_pe,
        &readout,
        &config.rates,
        &config.budget.ext,
        pulse.rep_rate,
    );
    Ok((report, pulse.n_o, pulse.tau, eta_pe_prov, pulse_prov))
}

fn cmd_budget(config: &Config, out: &Path, manifest: &mut Manifest) -> Result<(), String> {
    let (report, n_o, tau, eta_pe_prov, pulse_prov) = budget_pipeline(config)?;

    let prov = |section: &str, key: &str| config.provenance(section, key).as_str();
    let eta_pe_provenance = match (config.budget.eta_pe_mode, eta_pe_prov) {
        (EtaPeMode::Computed, _) => "computed",
        (EtaPeMode::Fixed, _) => prov("budget", "eta_pe_fixed"),
    };
    let pulse_provenance = match config.budget.pulse_mode {
        PulseMode::Optimized => "computed",
        PulseMode::Fixed => prov("pulse", "n_o"),
    };

    let mut csv = String::from("quantity,value,unit,provenance\n");
    let mut row = |q: &str, v: f64, unit: &str, p: &str| {
        let _ = writeln!(csv, "{q},{v},{unit},{p}");
    };
    row("eta_pe", report.eta_pe, "1", eta_pe_provenance);
    row("eta_om", report.eta_om, "1", "computed");
    row("eta_i", report.eta_i, "1", "computed");
    row("eta_k", report.eta_k, "1", "computed");
    row("eta_fiber", config.budget.ext.fiber, "1", prov("budget", "eta_fiber"));
    row("eta_filter", config.budget.ext.filter, "1", prov("budget", "eta_filter"));
    row("eta_detector", config.budget.ext.detector, "1", prov("budget", "eta_detector"));
    row("eta_ext", report.eta_ext, "1", "computed");
    row("eta_total", report.eta_total, "1", "computed");
    row("single_rate", report.single_rate, "Hz", "computed");
    row("coincidence_rate", report.coincidence_rate, "Hz", "computed");
    row("n_added", report.n_added, "quanta", "computed");
    row("n_o", n_o, "photons", pulse_provenance);
    row("tau", tau, "s", pulse_provenance);
    row("rep_rate", config.pulse.rep_rate, "Hz", prov("pulse", "rep_rate"));
    manifest.write_output(out, "budget.csv", &csv)?;

    let mut text = String::new();
    let _ = writeln!(text, "efficiency and count-rate budget");
    let _ = writeln!(text, "  eta_pe       = {:.4}  ({eta_pe_prov})", report.eta_pe);
    let _ = writeln!(
        text,
        "  eta_om       = {:.4}  (pulse {pulse_prov}: n_o = {:.1}, tau = {:.3e} s)",
        report.eta_om, n_o, tau
    );
    let _ = writeln!(text, "  eta_i        = {:.4}", report.eta_i);
    let _ = writeln!(text, "  eta_k        = {:.4}", report.eta_k);
    let _ = writeln!(
        text,
        "  eta_ext      = {:.4}  (fiber {} x filter {} x detector {})",
        report.eta_ext, config.budget.ext.fiber, config.budget.ext.filter, config.budget.ext.detector
    );
    let _ = writeln!(text, "  eta_total    = {:.4}", report.eta_total);
    let _ = writeln!(text, "  single rate  = {:.1} Hz", report.single_rate);
    let _ = writeln!(text, "  coincidence  = {:.2} Hz", report.coincidence_rate);
    let _ = writeln!(text, "  added noise  = {:.3} quanta", report.n_added);
    manifest.write_output(out, "budget.txt", &text)?;
    print!("{text}");
    Ok(())
}

fn cmd_hybridize(config: &Config, out: &Path, manifest: &mut Manifest) -> Result<(), String> {
    let hy = &config.hybridization;
    let sweep =
        sweep_anticrossing(hy, &hy.sweep_freqs()).map_err(|e| e.to_string())?;

    let mut csv =
        String::from("piezo_freq_hz,mode_index,freq_hz,g_pe_hz,g_om_hz,zeta_m,kappa_m_hz\n");
    let mut plot_om = ScatterPlot::new(
        "Hybrid modes across the anticrossing",
        "piezo frequency [GHz]",
        "hybrid frequency [GHz]",
        "|g_om| [Hz]",
    );
    let mut plot_pe = ScatterPlot::new(
        "Hybrid modes across the anticrossing",
        "piezo frequency [GHz]",
        "hybrid frequency [GHz]",
        "|g_pe| [Hz]",
    );
    for point in &sweep {
        for (index, mode) in point.modes.iter().enumerate() {
            let kappa_m =
                mechanical_loss_budget(mode.zeta_m, hy.kappa_ln, hy.kappa_si, mode.kappa_rad);
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                point.piezo_freq, index, mode.freq, mode.g_pe, mode.g_om, mode.zeta_m, kappa_m
            );
            let (x, y) = (point.piezo_freq / 1e9, mode.freq / 1e9);
            plot_om.points.push((x, y, mode.g_om.abs()));
            plot_pe.points.push((x, y, mode.g_pe.abs()));
        }
    }
    manifest.write_output(out, "hybridize.csv", &csv)?;
    manifest.write_output(out, "hybridize_g_om.svg", &plot_om.render())?;
    manifest.write_output(out, "hybridize_g_pe.svg", &plot_pe.render())?;

    let usable = sweep.iter().filter(|p| p.best.is_some()).count();
    println!(
        "hybridize: {} sweep points, {} with a mode above the g_pe threshold",
        sweep.len(),
        usable
    );
    Ok(())
}

fn cmd_couple(
    config: &Config,
    args: &CoupleArgs,
    out: &Path,
    manifest: &mut Manifest,
) -> Result<(), String> {
    if args.volume.is_none() && args.surface.is_none() {
        return Err("couple needs at least one of --volume or --surface".to_string());
    }
    manifest.record_input(&args.material)?;
    let mat = material::load(&args.material)?;

    let mut text = String::new();
    let mut g_pe: Option<f64> = None;
    let mut g_om_pe: Option<f64> = None;
    let mut g_om_mb: Option<f64> = None;

    if let Some(path) = &args.volume {
        manifest.record_input(path)?;
        let volume = parse_volume_file(path).map_err(|e| e.to_string())?;
        let counts = region_counts(&volume);
        let ln = counts.get(&Region::LN).copied().unwrap_or(0);
        let si = counts.get(&Region::Si).copied().unwrap_or(0);
        let _ = writeln!(
            text,
            "volume: {} samples (LN {ln}, Si {si}, other {})",
            volume.len(),
            volume.len() - ln - si
        );
        if volume.iter().any(|s| s.d_m.is_some()) {
            let g = piezo_coupling(&volume, &mat.energies, config.rates.omega_m)
                .map_err(|e| e.to_string())?;
            let _ = writeln!(text, "g_pe = {g:.6e} Hz");
            g_pe = Some(g);
        }
        if volume.iter().any(|s| s.strain.is_some()) {
            let g = om_coupling_photoelastic(
                &volume,
                &mat.constants,
                &mat.energies,
                config.rates.omega_o,
            )
            .map_err(|e| e.to_string())?;
            let _ = writeln!(text, "g_om_PE = {g:.6e} Hz");
            g_om_pe = Some(g);
        }

        if let Some(refined) = &args.refined_volume {
            manifest.record_input(refined)?;
            let fine = parse_volume_file(refined).map_err(|e| e.to_string())?;
            if let Some(coarse) = g_pe {
                let g = piezo_coupling(&fine, &mat.energies, config.rates.omega_m)
                    .map_err(|e| e.to_string())?;
                let _ = writeln!(
                    text,
                    "g_pe refined = {g:.6e} Hz (change {:.2e}, Richardson limit {:.6e} Hz)",
                    (g - coarse).abs(),
                    g + (g - coarse) / 3.0
                );
            }
        }
    }

    if let Some(path) = &args.surface {
        manifest.record_input(path)?;
        let surface = parse_surface_file(path).map_err(|e| e.to_string())?;
        let _ = writeln!(text, "surface: {} samples", surface.len());
        let g = om_coupling_moving_boundary(
            &surface,
            &mat.constants,
            mat.energies.denom,
            config.rates.omega_o,
        )
        .map_err(|e| e.to_string())?;
        let _ = writeln!(text, "g_om_MB = {g:.6e} Hz");
        g_om_mb = Some(g);
    }

    if g_om_pe.is_some() || g_om_mb.is_some() {
        let total = total_om_coupling(g_om_pe.unwrap_or(0.0), g_om_mb.unwrap_or(0.0));
        let _ = writeln!(text, "g_om = {total:.6e} Hz");
    }

    manifest.write_output(out, "couple.txt", &text)?;
    print!("{text}");
    Ok(())
}

fn cmd_optimize(config: &Config, out: &Path, manifest: &mut Manifest) -> Result<(), String> {
    let (pulse, readout, trace) = optimize_pulse_traced(
        &config.rates,
        &config.heating,
        config.budget.noise_budget,
        PulseBounds::default(),
        config.pulse.rep_rate,
    )
    .map_err(|e| e.to_string())?;

    let mut csv = String::from("iter,cost_best,x_1,x_2\n");
    for p in &trace {
        let _ = writeln!(csv, "{},{},{},{}", p.iter, p.cost_best, p.x[0], p.x[1]);
    }
    manifest.write_output(out, "optimize_trace.csv", &csv)?;

    let mut summary = String::from("quantity,value,unit,provenance\n");
    let _ = writeln!(summary, "n_o,{},photons,computed", pulse.n_o);
    let _ = writeln!(summary, "tau,{},s,computed", pulse.tau);
    let _ = writeln!(summary, "gamma_om,{},Hz,computed", readout.gamma_om);
    let _ = writeln!(summary, "eta_om,{},1,computed", readout.eta_om);
    let _ = writeln!(summary, "n_added,{},quanta,computed", readout.n_added);
    let _ = writeln!(
        summary,
        "noise_budget,{},quanta,{}",
        config.budget.noise_budget,
        config.provenance("budget", "noise_budget").as_str()
    );
    manifest.write_output(out, "optimize.csv", &summary)?;

    println!(
        "optimize: n_o = {:.2}, tau = {:.4e} s -> eta_om = {:.4} with n_added = {:.4} (budget {})",
        pulse.n_o, pulse.tau, readout.eta_om, readout.n_added, config.budget.noise_budget
    );
    Ok(())
}
