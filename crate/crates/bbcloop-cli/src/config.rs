//! Scenario configuration: file schema, flag overrides, defaults, and the
//! provenance annotations behind every default.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};
use serde::Deserialize;

use bbcloop::controller::PidGains;
use bbcloop::plant::{ConverterParams, OperatingMode};
use bbcloop::reference::{reproducing_sample_time, script_feedback_gain, ControllerChoice};
use bbcloop::simloop::{Disturbance, DisturbanceTarget, ModePolicy, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainChoice {
    Analog,
    Digital,
}

/// Fully resolved scenario: every field concrete.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub converter: ConverterParams,
    pub mode: OperatingMode,
    pub domain: DomainChoice,
    pub controller: ControllerChoice,
    pub gains: Option<PidGains>,
    pub sample_time: f64,
    pub feedback_gain: f64,
    pub step_horizon: f64,
    pub freq_decades: (f64, f64),
    pub sim: SimConfig,
}

// ---------------------------------------------------------------------------
// file schema (all fields optional; unknown keys rejected)
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub converter: Option<ConverterFile>,
    pub mode: Option<String>,
    pub domain: Option<String>,
    pub controller: Option<String>,
    pub gains: Option<GainsFile>,
    pub sample_time: Option<f64>,
    pub feedback_gain: Option<f64>,
    pub step_horizon: Option<f64>,
    pub freq_decades: Option<[f64; 2]>,
    pub sim: Option<SimFile>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConverterFile {
    pub v_bus: Option<f64>,
    pub i_bus: Option<f64>,
    pub v_batt: Option<f64>,
    pub f_sw: Option<f64>,
    pub v_o: Option<f64>,
    pub i_o: Option<f64>,
    pub duty: Option<f64>,
    #[serde(rename = "L")]
    pub inductance: Option<f64>,
    #[serde(rename = "C_bus")]
    pub c_bus: Option<f64>,
    #[serde(rename = "R_load")]
    pub r_load: Option<f64>,
    #[serde(rename = "C_o")]
    pub c_o: Option<f64>,
    #[serde(rename = "R_batt")]
    pub r_batt: Option<f64>,
    #[serde(rename = "Ns")]
    pub ns: Option<u32>,
    #[serde(rename = "Np")]
    pub np: Option<u32>,
    #[serde(rename = "R_inter")]
    pub r_inter: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsFile {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub n: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimFile {
    pub sample_time: Option<f64>,
    pub ode_step: Option<f64>,
    pub horizon: Option<f64>,
    pub setpoint_bus: Option<f64>,
    pub setpoint_batt: Option<f64>,
    pub duty_min: Option<f64>,
    pub duty_max: Option<f64>,
    pub mode_policy: Option<ModePolicyFile>,
    pub initial_state: Option<[f64; 2]>,
    pub disturbances: Option<Vec<DisturbanceFile>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModePolicyFile {
    pub fixed: Option<String>,
    pub auto_hysteresis_volts: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceFile {
    pub time: f64,
    pub parameter: String,
    pub value: f64,
}

// ---------------------------------------------------------------------------
// flag overrides
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Clone)]
pub struct FlagOverrides {
    pub mode: Option<String>,
    pub domain: Option<String>,
    pub controller: Option<String>,
    pub ts: Option<f64>,
    pub feedback_gain: Option<f64>,
}

fn parse_mode(s: &str) -> anyhow::Result<OperatingMode> {
    match s.to_ascii_lowercase().as_str() {
        "boost" => Ok(OperatingMode::Boost),
        "buck" => Ok(OperatingMode::Buck),
        other => bail!("unknown mode '{other}' (expected boost|buck)"),
    }
}

fn parse_domain(s: &str) -> anyhow::Result<DomainChoice> {
    match s.to_ascii_lowercase().as_str() {
        "analog" => Ok(DomainChoice::Analog),
        "digital" => Ok(DomainChoice::Digital),
        other => bail!("unknown domain '{other}' (expected analog|digital)"),
    }
}

fn parse_controller(s: &str) -> anyhow::Result<ControllerChoice> {
    match s.to_ascii_lowercase().as_str() {
        "none" => Ok(ControllerChoice::None),
        "pid" => Ok(ControllerChoice::Pid),
        "pidn" => Ok(ControllerChoice::Pidn),
        other => bail!("unknown controller '{other}' (expected none|pid|pidn)"),
    }
}

fn parse_disturbance_target(s: &str) -> anyhow::Result<DisturbanceTarget> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "v_batt" => DisturbanceTarget::VBatt,
        "v_bus" => DisturbanceTarget::VBus,
        "r_load" => DisturbanceTarget::RLoad,
        "setpoint_bus" => DisturbanceTarget::SetpointBus,
        "setpoint_batt" => DisturbanceTarget::SetpointBatt,
        other => bail!(
            "unknown disturbance parameter '{other}' \
             (expected v_batt|v_bus|r_load|setpoint_bus|setpoint_batt)"
        ),
    })
}

pub fn load_config_file(path: &Path) -> anyhow::Result<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let cfg: ConfigFile =
        toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
    Ok(cfg)
}

/// Merge defaults <- config file <- command-line flags into a full scenario.
pub fn resolve(file: Option<&ConfigFile>, flags: &FlagOverrides) -> anyhow::Result<Scenario> {
    let empty = ConfigFile::default();
    let file = file.unwrap_or(&empty);

    let mode = match flags.mode.as_deref().or(file.mode.as_deref()) {
        Some(s) => parse_mode(s)?,
        None => OperatingMode::Boost,
    };
    let domain = match flags.domain.as_deref().or(file.domain.as_deref()) {
        Some(s) => parse_domain(s)?,
        None => DomainChoice::Analog,
    };
    let controller = match flags.controller.as_deref().or(file.controller.as_deref()) {
        Some(s) => parse_controller(s)?,
        None => ControllerChoice::Pidn,
    };

    let mut converter = ConverterParams::default();
    if let Some(c) = &file.converter {
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = c.$field {
                    converter.$field = v;
                }
            };
        }
        take!(v_bus);
        take!(i_bus);
        take!(v_batt);
        take!(f_sw);
        take!(v_o);
        take!(i_o);
        take!(duty);
        take!(inductance);
        take!(c_bus);
        take!(r_load);
        take!(c_o);
        take!(r_inter);
        if let Some(v) = c.ns {
            converter.cells_series = v;
        }
        if let Some(v) = c.np {
            converter.cells_parallel = v;
        }
        if let Some(rb) = c.r_batt {
            let derived = converter.r_batt();
            if (rb - derived).abs() > 1e-12 * derived.abs().max(1.0) {
                bail!(
                    "R_batt = {rb} contradicts (Ns/Np)*R_inter = {derived}; \
                     drop R_batt or fix the cell parameters"
                );
            }
        }
    }
    converter
        .validate()
        .map_err(|e| anyhow::anyhow!("converter parameters: {e}"))?;

    let gains = match &file.gains {
        Some(g) => Some(
            PidGains::new(g.kp, g.ki, g.kd, g.n).map_err(|e| anyhow::anyhow!("gains: {e}"))?,
        ),
        None => bbcloop::reference::gains_for(mode, controller),
    };
    if controller != ControllerChoice::None && gains.is_none() {
        bail!("a controller was requested but no gain set is available");
    }

    let sample_time = flags
        .ts
        .or(file.sample_time)
        .unwrap_or_else(|| reproducing_sample_time(mode));
    if sample_time <= 0.0 {
        bail!("sample_time must be > 0, got {sample_time}");
    }
    let feedback_gain = flags
        .feedback_gain
        .or(file.feedback_gain)
        .unwrap_or_else(|| script_feedback_gain(mode, controller, domain == DomainChoice::Digital));

    let step_horizon = file.step_horizon.unwrap_or(match domain {
        DomainChoice::Analog => 0.06,
        DomainChoice::Digital => (600.0 * sample_time).max(0.06),
    });
    if step_horizon <= 0.0 {
        bail!("step_horizon must be > 0");
    }
    let freq_decades = match file.freq_decades {
        Some([lo, hi]) if lo < hi => (lo, hi),
        Some([lo, hi]) => bail!("freq_decades must be ascending, got [{lo}, {hi}]"),
        None => (0.0, 5.0),
    };

    let mut sim = SimConfig {
        mode_policy: ModePolicy::Fixed(mode),
        ..SimConfig::default()
    };
    if let Some(s) = &file.sim {
        if let Some(v) = s.sample_time {
            sim.sample_time = v;
        }
        if let Some(v) = s.ode_step {
            sim.ode_step = v;
        }
        if let Some(v) = s.horizon {
            sim.horizon = v;
        }
        if let Some(v) = s.setpoint_bus {
            sim.setpoint_bus = v;
        }
        if let Some(v) = s.setpoint_batt {
            sim.setpoint_batt = v;
        }
        if let Some(v) = s.duty_min {
            sim.duty_min = v;
        }
        if let Some(v) = s.duty_max {
            sim.duty_max = v;
        }
        if let Some(mp) = &s.mode_policy {
            sim.mode_policy = match (&mp.fixed, mp.auto_hysteresis_volts) {
                (Some(m), None) => ModePolicy::Fixed(parse_mode(m)?),
                (None, Some(h)) => ModePolicy::Auto {
                    hysteresis_volts: h,
                },
                _ => bail!("mode_policy needs exactly one of `fixed` or `auto_hysteresis_volts`"),
            };
        }
        if let Some(v) = s.initial_state {
            sim.initial_state = (v[0], v[1]);
        }
        if let Some(list) = &s.disturbances {
            sim.disturbances = list
                .iter()
                .map(|d| {
                    Ok(Disturbance {
                        time: d.time,
                        target: parse_disturbance_target(&d.parameter)?,
                        value: d.value,
                    })
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
        }
    }
    sim.validate(&converter)
        .map_err(|e| anyhow::anyhow!("sim config: {e}"))?;

    Ok(Scenario {
        converter,
        mode,
        domain,
        controller,
        gains,
        sample_time,
        feedback_gain,
        step_horizon,
        freq_decades,
        sim,
    })
}

fn controller_name(c: ControllerChoice) -> &'static str {
    match c {
        ControllerChoice::None => "none",
        ControllerChoice::Pid => "pid",
        ControllerChoice::Pidn => "pidn",
    }
}

/// Render the resolved scenario as a config file, optionally annotated with
/// the origin of each default.
pub fn print_config(s: &Scenario, provenance: bool) -> String {
    fn push_line(out: &mut String, provenance: bool, text: &str, why: &str) {
        out.push_str(text);
        if provenance && !why.is_empty() {
            let pad = 44usize.saturating_sub(text.len());
            let _ = write!(out, "{:pad$}# {}", "", why, pad = pad);
        }
        out.push('\n');
    }
    let mut out = String::new();
    macro_rules! line {
        ($text:expr, $why:expr $(,)?) => {
            push_line(&mut out, provenance, &$text, $why)
        };
    }
    let c = &s.converter;
    line!(
        &format!("mode = \"{}\"", s.mode),
        "default operating mode",
    );
    line!(
        &format!(
            "domain = \"{}\"",
            if s.domain == DomainChoice::Analog { "analog" } else { "digital" }
        ),
        "default analysis domain",
    );
    line!(
        &format!("controller = \"{}\"", controller_name(s.controller)),
        "filtered-derivative compensator is the headline design",
    );
    line!(
        &format!("sample_time = {:e}", s.sample_time),
        "reproduces the published discretizations for this mode",
    );
    line!(
        &format!("feedback_gain = {}", s.feedback_gain),
        "loop-closure gain the characterization scripts use for this scenario",
    );
    line!(
        &format!("step_horizon = {}", s.step_horizon),
        "slowest reference transient settles well inside this window",
    );
    line!(
        &format!("freq_decades = [{}, {}]", s.freq_decades.0, s.freq_decades.1),
        "two decades around every reference crossover",
    );
    out.push('\n');
    line!("[converter]", "reference design electrical ratings");
    line!(&format!("v_bus = {}", c.v_bus), "24 V dc bus");
    line!(&format!("i_bus = {}", c.i_bus), "bus current rating");
    line!(&format!("v_batt = {}", c.v_batt), "12 V battery bank");
    line!(&format!("f_sw = {}", c.f_sw), "20 kHz switching rate");
    line!(&format!("v_o = {}", c.v_o), "load voltage rating");
    line!(&format!("i_o = {}", c.i_o), "load current rating");
    line!(&format!("duty = {}", c.duty), "nominal operating point");
    line!(&format!("L = {:e}", c.inductance), "power inductor");
    line!(&format!("C_bus = {:e}", c.c_bus), "bus capacitor");
    line!(&format!("R_load = {}", c.r_load), "resistive load");
    line!(&format!("C_o = {:e}", c.c_o), "battery-side capacitor");
    line!(
        &format!("Ns = {}", c.cells_series),
        "battery cells in series",
    );
    line!(
        &format!("Np = {}", c.cells_parallel),
        "parallel battery strings",
    );
    line!(
        &format!("R_inter = {:e}", c.r_inter),
        "per-cell internal resistance; R_batt = (Ns/Np) * R_inter",
    );
    out.push('\n');
    line!("[sim]", "nonlinear averaged-model simulation");
    line!(
        &format!("sample_time = {:e}", s.sim.sample_time),
        "controller runs at the switching rate",
    );
    line!(
        &format!("ode_step = {:e}", s.sim.ode_step),
        "keeps step * fastest-pole below 0.1 in either mode",
    );
    line!(&format!("horizon = {}", s.sim.horizon), "covers startup and settling");
    line!(
        &format!("setpoint_bus = {}", s.sim.setpoint_bus),
        "regulated bus voltage",
    );
    line!(
        &format!("setpoint_batt = {}", s.sim.setpoint_batt),
        "battery charge voltage",
    );
    line!(
        &format!("duty_min = {}", s.sim.duty_min),
        "clamp away from the averaged-model singularity at d = 1",
    );
    line!(&format!("duty_max = {}", s.sim.duty_max), "");
    match s.sim.mode_policy {
        ModePolicy::Fixed(m) => line!(
            &format!("mode_policy = {{ fixed = \"{m}\" }}"),
            "single-mode run",
        ),
        ModePolicy::Auto { hysteresis_volts } => line!(
            &format!("mode_policy = {{ auto_hysteresis_volts = {hysteresis_volts} }}"),
            "threshold switching band on the bus measurement",
        ),
    }
    line!(
        &format!(
            "initial_state = [{}, {}]",
            s.sim.initial_state.0, s.sim.initial_state.1
        ),
        "cold start",
    );
    if provenance {
        if let Some(g) = &s.gains {
            out.push('\n');
            line!("[gains]", "autotuned constants from the characterization scripts, full precision");
            line!(&format!("kp = {}", g.kp), "");
            line!(&format!("ki = {}", g.ki), "");
            line!(&format!("kd = {}", g.kd), "");
            line!(&format!("n = {}", g.n), "");
        }
    }
    out
}
