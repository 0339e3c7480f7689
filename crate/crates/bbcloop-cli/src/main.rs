//! Scenario-driven front end: builds the requested converter/controller
//! system and runs models, step responses, bode sweeps, pole-zero maps,
//! nonlinear simulations, or the full reference-reproduction report.
//!
//! Exit codes: 2 configuration problem, 3 numeric failure, 4 tolerance
//! failure under `report --strict`.

mod config;
mod emit;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bbcloop::analysis::{
    frequency_response, log_grid, pole_zero_report, stability_margins, step_metrics,
    step_response,
};
use bbcloop::controller::pidn_transfer;
use bbcloop::lti::{
    dc_gain, ss_to_tf, tf_feedback, tf_series, tf_to_zpk, tustin_discretize, TransferFunction,
};
use bbcloop::plant::state_space;
use bbcloop::reference::ControllerChoice;
use bbcloop::simloop::{simulate_closed_loop, SimTrace};

use config::{load_config_file, print_config, resolve, DomainChoice, FlagOverrides, Scenario};

#[derive(Parser)]
#[command(
    name = "bbcloop",
    about = "Control-loop characterization toolkit for a bidirectional buck-boost converter",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ScenarioArgs {
    /// Operating mode: boost | buck
    #[arg(long)]
    mode: Option<String>,
    /// Analysis domain: analog | digital
    #[arg(long)]
    domain: Option<String>,
    /// Compensator: none | pid | pidn
    #[arg(long)]
    controller: Option<String>,
    /// Sample time for the digital domain (seconds)
    #[arg(long)]
    ts: Option<f64>,
    /// Loop-closure gain override
    #[arg(long)]
    feedback_gain: Option<f64>,
    /// Scenario config file (TOML; unknown keys rejected)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for emitted files
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Print the fully resolved configuration and exit
    #[arg(long)]
    print_config: bool,
    /// With --print-config: annotate every default with its origin
    #[arg(long)]
    provenance: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print plant, compensator, and closed-loop transfer functions
    Model(ScenarioArgs),
    /// Unit-step response: CSV plus transient metrics
    Step(ScenarioArgs),
    /// Frequency sweep: CSV, SVG, and the margin report
    Bode(ScenarioArgs),
    /// Pole-zero map: CSV, SVG, and the stability classification
    Pzmap(ScenarioArgs),
    /// Stability margins of the scenario system
    Margins(ScenarioArgs),
    /// Nonlinear averaged-model closed-loop simulation trace
    Simulate(ScenarioArgs),
    /// Reproduce the full reference characterization with deltas
    Report {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Exit nonzero if any reference check misses its tolerance
        #[arg(long)]
        strict: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, strict) = match &cli.command {
        Command::Model(a)
        | Command::Step(a)
        | Command::Bode(a)
        | Command::Pzmap(a)
        | Command::Margins(a)
        | Command::Simulate(a) => (a.clone(), false),
        Command::Report { scenario, strict } => (scenario.clone(), *strict),
    };

    let scenario = match build_scenario(&args) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if args.print_config {
        print!("{}", print_config(&scenario, args.provenance));
        return ExitCode::SUCCESS;
    }

    let outcome = match &cli.command {
        Command::Model(_) => cmd_model(&scenario),
        Command::Step(_) => cmd_step(&scenario, &args.out),
        Command::Bode(_) => cmd_bode(&scenario, &args.out),
        Command::Pzmap(_) => cmd_pzmap(&scenario, &args.out),
        Command::Margins(_) => cmd_margins(&scenario),
        Command::Simulate(_) => cmd_simulate(&scenario, &args.out),
        Command::Report { .. } => {
            return match report::run_report(&args.out, true) {
                Ok(0) => ExitCode::SUCCESS,
                Ok(n) => {
                    println!("{n} reference checks missed tolerance");
                    if strict {
                        ExitCode::from(4)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => {
                    eprintln!("numeric error: {e:#}");
                    ExitCode::from(3)
                }
            };
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("numeric error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn build_scenario(args: &ScenarioArgs) -> anyhow::Result<Scenario> {
    let file = match &args.config {
        Some(p) => Some(load_config_file(p)?),
        None => None,
    };
    let flags = FlagOverrides {
        mode: args.mode.clone(),
        domain: args.domain.clone(),
        controller: args.controller.clone(),
        ts: args.ts,
        feedback_gain: args.feedback_gain,
    };
    resolve(file.as_ref(), &flags)
}

/// The scenario's plant in the scenario's domain.
fn scenario_plant(s: &Scenario) -> anyhow::Result<TransferFunction> {
    let tf = ss_to_tf(&state_space(&s.converter, s.mode)?, 0, 0)?;
    Ok(match s.domain {
        DomainChoice::Analog => tf,
        DomainChoice::Digital => tustin_discretize(&tf, s.sample_time)?,
    })
}

fn scenario_controller(s: &Scenario) -> anyhow::Result<Option<TransferFunction>> {
    match (s.controller, &s.gains) {
        (ControllerChoice::None, _) => Ok(None),
        (_, Some(g)) => {
            let c = pidn_transfer(g);
            Ok(Some(match s.domain {
                DomainChoice::Analog => c,
                DomainChoice::Digital => tustin_discretize(&c, s.sample_time)?,
            }))
        }
        (_, None) => unreachable!("resolve() guarantees gains for a controller"),
    }
}

/// Open loop (controller series plant) and, with a controller, the closed
/// loop under the scenario feedback gain; without one, the bare plant.
fn scenario_system(s: &Scenario) -> anyhow::Result<TransferFunction> {
    let plant = scenario_plant(s)?;
    Ok(match scenario_controller(s)? {
        None => plant,
        Some(c) => tf_feedback(&tf_series(&c, &plant)?, s.feedback_gain)?,
    })
}

fn scenario_name(s: &Scenario) -> String {
    format!(
        "{}_{}_{}",
        s.mode,
        match s.domain {
            DomainChoice::Analog => "analog",
            DomainChoice::Digital => "digital",
        },
        match s.controller {
            ControllerChoice::None => "open",
            ControllerChoice::Pid => "pid",
            ControllerChoice::Pidn => "pidn",
        }
    )
}

fn cmd_model(s: &Scenario) -> anyhow::Result<()> {
    let plant = scenario_plant(s)?;
    println!("plant:       {plant}");
    println!("             zpk: {}", tf_to_zpk(&plant)?.factored());
    if let Some(c) = scenario_controller(s)? {
        println!("controller:  {c}");
        println!("             zpk: {}", tf_to_zpk(&c)?.factored());
        let closed = scenario_system(s)?;
        println!("closed loop (feedback gain {}):", s.feedback_gain);
        println!("             {closed}");
        println!("             zpk: {}", tf_to_zpk(&closed)?.factored());
        match dc_gain(&closed) {
            Ok(g) => println!("dc gain:     {g}"),
            Err(e) => println!("dc gain:     {e}"),
        }
    } else {
        match dc_gain(&plant) {
            Ok(g) => println!("dc gain:     {g}"),
            Err(e) => println!("dc gain:     {e}"),
        }
    }
    Ok(())
}

fn cmd_step(s: &Scenario, out: &PathBuf) -> anyhow::Result<()> {
    let system = scenario_system(s)?;
    let series = step_response(&system, s.step_horizon)?;
    emit::ensure_dir(out)?;
    let path = emit::emit_step_csv(out, &format!("step_{}", scenario_name(s)), &series)?;
    println!("series: {}", path.display());
    match step_metrics(&series) {
        Ok(m) => {
            println!("final value:   {:.6}", m.final_value);
            println!("peak:          {:.6}", m.peak_amplitude);
            println!("overshoot:     {:.4}%", m.overshoot_pct);
            match m.rise_time {
                Some(r) => println!("rise (10-90%): {r:.6e} s"),
                None => println!("rise (10-90%): undefined"),
            }
            match m.settling_time {
                Some(t) => println!("settle (2%):   {t:.6e} s"),
                None => println!("settle (2%):   not settled"),
            }
        }
        Err(e) => println!("metrics unavailable: {e}"),
    }
    Ok(())
}

fn bode_grid(s: &Scenario) -> Vec<f64> {
    let lo = 10f64.powf(s.freq_decades.0);
    let mut hi = 10f64.powf(s.freq_decades.1);
    if s.domain == DomainChoice::Digital {
        hi = hi.min(0.999 * std::f64::consts::PI / s.sample_time);
    }
    log_grid(lo, hi, 400)
}

fn cmd_bode(s: &Scenario, out: &PathBuf) -> anyhow::Result<()> {
    let system = scenario_system(s)?;
    let sweep = frequency_response(&system, &bode_grid(s))?;
    emit::ensure_dir(out)?;
    let name = format!("bode_{}", scenario_name(s));
    let csv = emit::emit_bode_csv(out, &name, &sweep)?;
    let svg = emit::emit_bode_svg(out, &name, &sweep)?;
    println!("sweep: {}  plot: {}", csv.display(), svg.display());
    print_margins(&system)?;
    Ok(())
}

fn cmd_margins(s: &Scenario) -> anyhow::Result<()> {
    let system = scenario_system(s)?;
    print_margins(&system)
}

fn print_margins(system: &TransferFunction) -> anyhow::Result<()> {
    let r = stability_margins(system)?;
    let discrete = system.domain.sample_time().is_some();
    if r.phase_margins.is_empty() {
        println!("phase margin:  inf (no unity-gain crossing)");
    }
    for p in &r.phase_margins {
        println!(
            "phase margin:  {:.4} deg at {:.6} rad/s  (delay margin {:.4e} {})",
            p.pm_deg,
            p.omega,
            p.delay_margin,
            if discrete { "samples" } else { "s" }
        );
    }
    if r.gain_margins.is_empty() {
        println!("gain margin:   inf (no -180 deg crossing)");
    }
    for g in &r.gain_margins {
        println!("gain margin:   {:.4} dB at {:.6} rad/s", g.gm_db, g.omega);
    }
    println!(
        "verdict:       {}",
        if r.stable_verdict { "stable" } else { "not stable" }
    );
    Ok(())
}

fn cmd_pzmap(s: &Scenario, out: &PathBuf) -> anyhow::Result<()> {
    let system = scenario_system(s)?;
    let rep = pole_zero_report(&system)?;
    emit::ensure_dir(out)?;
    let name = format!("pzmap_{}", scenario_name(s));
    let csv = emit::emit_pzmap_csv(out, &name, &rep.poles, &rep.zeros)?;
    let svg = emit::emit_pzmap_svg(out, &name, &rep.poles, &rep.zeros, system.domain)?;
    println!("map: {}  plot: {}", csv.display(), svg.display());
    println!("classification: {}", report::classification_str(rep.classification));
    for o in &rep.offenders {
        println!(
            "offender: {} {} ({})",
            match o.kind {
                bbcloop::analysis::RootKind::Pole => "pole",
                bbcloop::analysis::RootKind::Zero => "zero",
            },
            o.value,
            if o.on_boundary { "on boundary" } else { "outside" }
        );
    }
    Ok(())
}

fn cmd_simulate(s: &Scenario, out: &PathBuf) -> anyhow::Result<()> {
    // gains from the config when given; otherwise the duty-loop presets
    // sized for simulation (the analog boost tuning is unstable against the
    // duty channel's right-half-plane zero)
    let gains = match (&s.gains, s.controller) {
        (Some(g), _) if s.controller != ControllerChoice::None => *g,
        _ => match s.mode {
            bbcloop::plant::OperatingMode::Boost => bbcloop::simloop::boost_sim_gains(),
            bbcloop::plant::OperatingMode::Buck => bbcloop::simloop::buck_sim_gains(),
        },
    };
    // a scenario that selects the analog presets still simulates with the
    // sim presets unless the config supplied explicit gains
    let gains = if s.gains == bbcloop::reference::gains_for(s.mode, s.controller) {
        match s.mode {
            bbcloop::plant::OperatingMode::Boost => bbcloop::simloop::boost_sim_gains(),
            bbcloop::plant::OperatingMode::Buck => bbcloop::simloop::buck_sim_gains(),
        }
    } else {
        gains
    };
    let trace = simulate_closed_loop(&s.converter, &gains, &s.sim)?;
    emit::ensure_dir(out)?;
    let path = emit::emit_trace_csv(out, &format!("trace_{}", scenario_name(s)), &trace)?;
    println!("trace: {}", path.display());
    let v = SimTrace::tail_mean(&trace.v_c, 0.05);
    let d = SimTrace::tail_mean(&trace.duty, 0.05);
    let i = SimTrace::tail_mean(&trace.i_l, 0.05);
    println!("steady state: v_C = {v:.4} V, duty = {d:.4}, i_L = {i:.4} A");
    Ok(())
}
