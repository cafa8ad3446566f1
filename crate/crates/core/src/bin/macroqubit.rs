use clap::{Args, Parser, Subcommand, ValueEnum};
use macroqubit::config::{exit_code, Format, ScenarioConfig};
use macroqubit::device::{self, JunctionParams};
use macroqubit::dynamics::{uniform_grid, Simulator};
use macroqubit::fit::{fit_envelope, fit_modified_tunneling};
use macroqubit::output::{self, correlation_csv, plot_csv, scan_csv, series_csv, sidecar_path, write_json, write_text};
use macroqubit::scan::{nonadditivity_scan, MeasureSpec};
use macroqubit::stationary::{ReservoirShifts, StationaryPT};
use macroqubit::{Error, Result};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Macroscopic-qubit tunneling with two bosonic reservoirs.
#[derive(Parser, Debug)]
#[command(name = "macroqubit", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file (TOML). Defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path; overrides `output.path`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; overrides `output.format`.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Quadrature tolerance; overrides `tolerance`.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Also write a long (x, y, series) table next to the output.
    #[arg(long, global = true)]
    emit_plot_data: bool,
    /// Worker threads for grid evaluation.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// P_R(t) on the configured grid.
    Simulate,
    /// Level shifts and decay rates per reservoir.
    Shifts,
    /// Two-time environmental correlation C(t, t*).
    Correlate,
    /// Sweep the type-parameter difference z.
    Scan,
    /// Flux-qubit estimates of h and the tunneling strength.
    Estimate(EstimateArgs),
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Inductance ratio, 0 < gamma < 1.
    #[arg(long)]
    gamma: f64,
    /// Junction quantum scale.
    #[arg(long, conflicts_with_all = ["capacitance", "critical_current"])]
    h0: Option<f64>,
    /// Junction capacitance in farads.
    #[arg(long, requires = "critical_current")]
    capacitance: Option<f64>,
    /// Critical current in amperes.
    #[arg(long, requires = "capacitance")]
    critical_current: Option<f64>,
    /// Well frequency in units of 1/T0.
    #[arg(long, default_value_t = 8f64.sqrt())]
    omega: f64,
}

fn main() -> ExitCode {
    env_logger_lite();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let path = e.field_path().unwrap_or("-");
            eprintln!("error[{}] {}: {}", e.kind(), path, e);
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

/// Routes `log` warnings to stderr without extra dependencies.
fn env_logger_lite() {
    struct Stderr;
    impl log::Log for Stderr {
        fn enabled(&self, m: &log::Metadata) -> bool {
            m.level() <= log::Level::Warn
        }
        fn log(&self, r: &log::Record) {
            if self.enabled(r.metadata()) {
                eprintln!("warning: {}", r.args());
            }
        }
        fn flush(&self) {}
    }
    static LOGGER: Stderr = Stderr;
    let _ = log::set_logger(&LOGGER).map(|_| log::set_max_level(log::LevelFilter::Warn));
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.common.threads {
        if n == 0 {
            return Err(Error::config("--threads", "must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::config("--threads", e.to_string()))?;
    }
    if let Command::Estimate(a) = &cli.cmd {
        return estimate(a, &cli.common);
    }
    let cfg = load_config(&cli.common)?;
    match cli.cmd {
        Command::Simulate => simulate(&cfg, &cli.common),
        Command::Shifts => shifts(&cfg, &cli.common),
        Command::Correlate => correlate(&cfg, &cli.common),
        Command::Scan => scan(&cfg, &cli.common),
        Command::Estimate(_) => unreachable!(),
    }
}

fn load_config(c: &Common) -> Result<ScenarioConfig> {
    let mut cfg = match &c.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(p) = &c.out {
        cfg.output.path = p.to_string_lossy().into_owned();
    }
    if let Some(f) = c.format {
        cfg.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if let Some(t) = c.tolerance {
        cfg.tolerance = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Main output file: the configured path, with an extension matching the
/// format when none is given.
fn main_path(cfg: &ScenarioConfig) -> PathBuf {
    let p = PathBuf::from(&cfg.output.path);
    if p.extension().is_some() {
        return p;
    }
    p.with_extension(match cfg.output.format {
        Format::Csv => "csv",
        Format::Json => "json",
    })
}

fn plot_path(main: &Path) -> PathBuf {
    let stem = main.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    main.with_file_name(format!("{stem}.plot.csv"))
}

fn metadata(cfg: &ScenarioConfig, command: &str) -> serde_json::Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "config_toml": cfg.to_toml(),
    })
}

/// Writes `csv` plus a JSON sidecar, or a single JSON document.
fn persist(cfg: &ScenarioConfig, csv: &str, mut meta: serde_json::Value, data: serde_json::Value) -> Result<PathBuf> {
    let main = main_path(cfg);
    match cfg.output.format {
        Format::Csv => {
            write_text(&main, csv)?;
            write_json(&sidecar_path(&main), &meta)?;
        }
        Format::Json => {
            meta["data"] = data;
            write_json(&main, &meta)?;
        }
    }
    Ok(main)
}

fn time_grid(cfg: &ScenarioConfig, sim: &Simulator) -> Vec<f64> {
    let t_max = cfg.time.t_max.unwrap_or_else(|| {
        let g = sim.pt.total().gamma2;
        if g > 0.0 {
            3.0 / g
        } else {
            20.0 * std::f64::consts::PI / sim.sys.delta
        }
    });
    uniform_grid(t_max, cfg.time.n_points)
}

fn simulator(cfg: &ScenarioConfig) -> Result<Simulator> {
    let (ra, rb) = cfg.reservoirs()?;
    Simulator::new(cfg.system()?, ra, rb, cfg.dynamics_options())
}

fn simulate(cfg: &ScenarioConfig, c: &Common) -> Result<()> {
    let sim = simulator(cfg)?;
    let grid = time_grid(cfg, &sim);
    let ts = sim.series(cfg.mode, &grid)?;
    let fit = match fit_modified_tunneling(&ts) {
        Ok(f) => json!(f),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let mut meta = metadata(cfg, "simulate");
    meta["fit"] = fit;
    meta["validity_window"] = json!(sim.validity_window());
    let main = persist(cfg, &series_csv(&ts), meta, json!(ts))?;
    if c.emit_plot_data {
        let pts = |f: fn(&macroqubit::dynamics::PRecord) -> f64| ts.records.iter().map(|r| (r.t, f(r))).collect();
        let series = [
            ("p_right", pts(|r| r.p_right)),
            ("vac_term", pts(|r| r.vac_term)),
            ("single_term", pts(|r| r.single_term)),
            ("double_term", pts(|r| r.double_term)),
            ("cross_term", pts(|r| r.cross_term)),
        ];
        write_text(&plot_path(&main), &plot_csv(&series))?;
    }
    Ok(())
}

fn shifts(cfg: &ScenarioConfig, c: &Common) -> Result<()> {
    let sys = cfg.system()?;
    let (ra, rb) = cfg.reservoirs()?;
    let pt = StationaryPT::new(&sys, &ra, &rb)?;
    let tot = pt.total();
    let rows: [(&str, &ReservoirShifts); 3] = [("A", &pt.a), ("B", &pt.b), ("total", &tot)];
    let mut csv = String::from("reservoir,de_first,de1,de2,gamma2\n");
    for (name, r) in rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            name,
            output::fmt12(r.de1_first),
            output::fmt12(r.de1),
            output::fmt12(r.de2),
            output::fmt12(r.gamma2)
        ));
    }
    match cfg.output.format {
        Format::Csv => print!("{csv}"),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "a": pt.a, "b": pt.b, "total": tot })).expect("serializable")
        ),
    }
    if c.out.is_some() {
        let mut meta = metadata(cfg, "shifts");
        meta["shifts"] = json!({ "a": pt.a, "b": pt.b, "total": tot });
        persist(cfg, &csv, meta.clone(), meta["shifts"].clone())?;
    }
    Ok(())
}

fn correlate(cfg: &ScenarioConfig, c: &Common) -> Result<()> {
    let cc = cfg
        .correlation
        .as_ref()
        .ok_or_else(|| Error::config("correlation", "a [correlation] block is required"))?;
    let sim = simulator(cfg)?;
    let grid: Vec<f64> = uniform_grid(cc.t_max - cc.t_star, cc.n_points).into_iter().map(|x| x + cc.t_star).collect();
    let rows = sim.correlation_series(cc.t_star, &grid)?;
    let taus: Vec<f64> = rows.iter().map(|(t, _)| t - cc.t_star).collect();
    let mags: Vec<f64> = rows.iter().map(|(_, v)| v.norm()).collect();
    let env = fit_envelope(&taus, &mags)?;
    let mut meta = metadata(cfg, "correlate");
    meta["envelope"] = json!(env);
    meta["measure"] = json!(env.oscillation_energy);
    let data = json!(rows.iter().map(|(t, v)| [*t, v.re, v.im, v.norm()]).collect::<Vec<_>>());
    let main = persist(cfg, &correlation_csv(&rows), meta, data)?;
    if c.emit_plot_data {
        let series = [
            ("abs_c", rows.iter().map(|(t, v)| (*t, v.norm())).collect()),
            ("re_c", rows.iter().map(|(t, v)| (*t, v.re)).collect()),
            ("im_c", rows.iter().map(|(t, v)| (*t, v.im)).collect()),
            (
                "envelope",
                taus.iter().map(|&u| (u + cc.t_star, env.a * (-env.kappa * u).exp() + env.c)).collect(),
            ),
        ];
        write_text(&plot_path(&main), &plot_csv(&series))?;
    }
    Ok(())
}

fn scan(cfg: &ScenarioConfig, c: &Common) -> Result<()> {
    let sc = cfg.scan.as_ref().ok_or_else(|| Error::config("scan", "a [scan] block is required"))?;
    let sys = cfg.system()?;
    let (base, _) = cfg.reservoirs()?;
    let probe = Simulator::new(sys, base, base, cfg.dynamics_options())?;
    let times = time_grid(cfg, &probe);
    let measure = match &cfg.correlation {
        Some(cc) => MeasureSpec {
            t_star: cc.t_star,
            grid: uniform_grid(cc.t_max - cc.t_star, cc.n_points).into_iter().map(|x| x + cc.t_star).collect(),
        },
        None => MeasureSpec::default_for(&probe, *times.last().unwrap_or(&0.0), 200),
    };
    let g = nonadditivity_scan(sys, base, sc.z_min, sc.z_max, sc.n_z, &times, &measure, cfg.dynamics_options())?;
    let mut meta = metadata(cfg, "scan");
    meta["measure_spec"] = json!({ "t_star": measure.t_star, "n_points": measure.grid.len() });
    meta["measure"] = json!(g.z.iter().zip(&g.measure).map(|(z, m)| json!({ "z": z, "measure": m })).collect::<Vec<_>>());
    meta["envelopes"] = json!(g.envelopes);
    let main = persist(cfg, &scan_csv(&g), meta, json!(g))?;
    if c.emit_plot_data {
        let mut series: Vec<(String, Vec<(f64, f64)>)> = g
            .z
            .iter()
            .zip(&g.p_right)
            .map(|(z, p)| (format!("p_right_z{z}"), g.times.iter().copied().zip(p.iter().copied()).collect()))
            .collect();
        series.push(("measure".into(), g.z.iter().copied().zip(g.measure.iter().copied()).collect()));
        let refs: Vec<(&str, Vec<(f64, f64)>)> = series.iter().map(|(l, p)| (l.as_str(), p.clone())).collect();
        write_text(&plot_path(&main), &plot_csv(&refs))?;
    }
    Ok(())
}

fn estimate(a: &EstimateArgs, c: &Common) -> Result<()> {
    let j = match (a.h0, a.capacitance, a.critical_current) {
        (Some(h0), _, _) => JunctionParams::new(a.gamma, h0)?,
        (None, Some(cap), Some(ic)) => JunctionParams::from_si(a.gamma, cap, ic)?,
        _ => return Err(Error::config("h0", "give --h0 or both --capacitance and --critical-current")),
    };
    let r = device::estimate(&j, a.omega)?;
    println!("gamma      {}", output::fmt12(r.gamma));
    println!("h0         {}", output::fmt12(r.h0));
    println!("theta0     {}", output::fmt12(r.theta0));
    println!("U0         {}", output::fmt12(r.u0));
    println!("h          {}", output::fmt12(r.h));
    println!("h_identity {}", output::fmt12(r.h_identity));
    println!("delta      {}", output::fmt12(r.instanton_delta));
    println!("note: {}", r.caveat);
    if let Some(out) = &c.out {
        write_json(&out.with_extension("json"), &r)?;
    }
    Ok(())
}
