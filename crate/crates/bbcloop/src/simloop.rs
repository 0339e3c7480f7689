//! Nonlinear averaged closed-loop simulation.
//!
//! The plant runs the averaged large-signal equations under classical
//! fixed-step RK4; a discrete compensator realized as a difference equation
//! updates the duty cycle at a fixed sample rate, with saturation and
//! conditional-integration anti-windup. This is the independent check on the
//! linear analysis and the software counterpart of the DSP demonstrator.

use crate::controller::{pidn_transfer, PidGains};
use crate::error::{Error, Result};
use crate::lti::{ss_to_tf, tf_feedback, tf_series, tustin_discretize, StateSpaceModel, TransferFunction};
use crate::plant::{
    duty_sensitivity_fd, nonlinear_derivatives, state_jacobian_fd, ConverterParams, OperatingMode,
};

/// Direct-realizable form of a proper discrete transfer function
/// (transposed direct form II).
#[derive(Debug, Clone)]
pub struct DifferenceEquation {
    /// Feedforward taps, b[0] paired with the current input; length n+1.
    b: Vec<f64>,
    /// Monic feedback taps a[1..=n].
    a: Vec<f64>,
    /// Delay-line registers, length n.
    w: Vec<f64>,
}

impl DifferenceEquation {
    /// Output for the current input without committing state.
    pub fn output(&self, u: f64) -> f64 {
        self.b[0] * u + self.w.first().copied().unwrap_or(0.0)
    }

    /// Commit the state update for input `u` and emitted output `y`.
    pub fn advance(&mut self, u: f64, y: f64) {
        let n = self.w.len();
        for i in 0..n {
            let next = if i + 1 < n { self.w[i + 1] } else { 0.0 };
            let bi = self.b.get(i + 1).copied().unwrap_or(0.0);
            let ai = self.a.get(i).copied().unwrap_or(0.0);
            self.w[i] = bi * u + next - ai * y;
        }
    }

    pub fn step(&mut self, u: f64) -> f64 {
        let y = self.output(u);
        self.advance(u, y);
        y
    }

    pub fn reset(&mut self) {
        self.w.iter_mut().for_each(|x| *x = 0.0);
    }

    pub fn order(&self) -> usize {
        self.w.len()
    }
}

/// Realize a proper discrete transfer function as a difference equation.
pub fn realize_difference_equation(g: &TransferFunction) -> Result<DifferenceEquation> {
    if g.domain.sample_time().is_none() {
        return Err(Error::DomainMismatch("difference equation needs a discrete system".into()));
    }
    if !g.is_proper() {
        return Err(Error::ImproperTransferFunction);
    }
    let gm = g.den_monic();
    let n = gm.den.degree();
    let mut b = vec![0.0; n + 1];
    let nc = gm.num.coeffs();
    let offset = n + 1 - nc.len();
    b[offset..].copy_from_slice(nc);
    let a = gm.den.coeffs()[1..].to_vec();
    Ok(DifferenceEquation {
        b,
        a,
        w: vec![0.0; n],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModePolicy {
    Fixed(OperatingMode),
    /// Threshold switching on the bus measurement with a symmetric
    /// hysteresis band in volts.
    Auto { hysteresis_volts: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DisturbanceTarget {
    VBatt,
    VBus,
    RLoad,
    SetpointBus,
    SetpointBatt,
}

#[derive(Debug, Clone, Copy)]
pub struct Disturbance {
    pub time: f64,
    pub target: DisturbanceTarget,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Controller sample time. Default 5e-5 s: the 20 kHz switching rate.
    pub sample_time: f64,
    pub ode_step: f64,
    pub horizon: f64,
    pub setpoint_bus: f64,
    pub setpoint_batt: f64,
    pub duty_min: f64,
    pub duty_max: f64,
    pub mode_policy: ModePolicy,
    pub initial_state: (f64, f64),
    pub disturbances: Vec<Disturbance>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            sample_time: 5e-5,
            ode_step: 2e-6,
            horizon: 0.5,
            setpoint_bus: 24.0,
            setpoint_batt: 12.0,
            duty_min: 0.05,
            duty_max: 0.95,
            mode_policy: ModePolicy::Fixed(OperatingMode::Boost),
            initial_state: (0.0, 0.0),
            disturbances: Vec::new(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self, p: &ConverterParams) -> Result<()> {
        if !(self.duty_min >= 0.0 && self.duty_min < self.duty_max && self.duty_max <= 1.0) {
            return Err(Error::InvalidParameter("need 0 <= duty_min < duty_max <= 1".into()));
        }
        if self.ode_step > self.sample_time {
            return Err(Error::InvalidParameter("ode_step must not exceed sample_time".into()));
        }
        if !(self.horizon > 0.0 && self.sample_time > 0.0 && self.ode_step > 0.0) {
            return Err(Error::InvalidParameter("times must be positive".into()));
        }
        // fastest pole over both modes bounds the explicit step
        let fastest = (1.0 / (p.r_batt() * p.c_o)).max(1.0 / (p.r_load * p.c_bus)).max(
            ((1.0 - p.duty) / p.inductance).max(1.0 / p.inductance),
        );
        if self.ode_step * fastest > 0.1 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "ode_step {} too coarse for plant pole scale {fastest:.3e}",
                self.ode_step
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SimTrace {
    pub dt: f64,
    pub i_l: Vec<f64>,
    pub v_c: Vec<f64>,
    pub duty: Vec<f64>,
    pub mode: Vec<OperatingMode>,
    pub v_error: Vec<f64>,
    pub v_ea: Vec<f64>,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.v_c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v_c.is_empty()
    }

    pub fn time_at(&self, idx: usize) -> f64 {
        idx as f64 * self.dt
    }

    /// Mean of a column over the final fraction of the trace.
    pub fn tail_mean(values: &[f64], fraction: f64) -> f64 {
        let n = values.len();
        let k = ((n as f64 * fraction) as usize).clamp(1, n);
        values[n - k..].iter().sum::<f64>() / k as f64
    }
}

/// Duty-channel gain presets for simulation.
///
/// The boost duty-to-voltage channel carries a right-half-plane zero near
/// 2.5 krad/s, so the analog tuning is scaled three decades down and the
/// derivative path is disabled; the integral term then crosses over near
/// 50 rad/s, well below the zero. The buck duty channel has no such zero and
/// runs the tuned analog gain set as-is.
pub fn boost_sim_gains() -> PidGains {
    let g = crate::controller::boost_pidn_gains();
    PidGains::new(g.kp * 1e-3, g.ki * 1e-3, 0.0, g.n).unwrap()
}

pub fn buck_sim_gains() -> PidGains {
    crate::controller::buck_pidn_gains()
}

struct LiveParams {
    p: ConverterParams,
    setpoint_bus: f64,
    setpoint_batt: f64,
}

/// Simulate the closed voltage loop: discrete compensator commanding the
/// duty cycle of the averaged converter model.
pub fn simulate_closed_loop(
    p: &ConverterParams,
    gains: &PidGains,
    cfg: &SimConfig,
) -> Result<SimTrace> {
    p.validate()?;
    cfg.validate(p)?;
    let controller_tf = tustin_discretize(&pidn_transfer(gains), cfg.sample_time)?;
    let mut ctrl = realize_difference_equation(&controller_tf)?;

    let mut live = LiveParams {
        p: *p,
        setpoint_bus: cfg.setpoint_bus,
        setpoint_batt: cfg.setpoint_batt,
    };
    let mut disturbances = cfg.disturbances.clone();
    disturbances.sort_by(|a, b| a.time.partial_cmp(&b.time).unwrap());
    let mut next_disturbance = 0;

    let mut mode = match cfg.mode_policy {
        ModePolicy::Fixed(m) => m,
        ModePolicy::Auto { .. } => OperatingMode::Boost,
    };
    let mut i_l = cfg.initial_state.0;
    // both capacitor voltages persist; the active one integrates
    let mut v_bus_cap = match mode {
        OperatingMode::Boost => cfg.initial_state.1,
        OperatingMode::Buck => 0.0,
    };
    let mut v_batt_cap = match mode {
        OperatingMode::Buck => cfg.initial_state.1,
        OperatingMode::Boost => 0.0,
    };

    let n_samples = (cfg.horizon / cfg.sample_time).round() as usize;
    let n_sub = (cfg.sample_time / cfg.ode_step).round().max(1.0) as usize;
    let h = cfg.sample_time / n_sub as f64;

    let mut trace = SimTrace {
        dt: cfg.sample_time,
        i_l: Vec::with_capacity(n_samples),
        v_c: Vec::with_capacity(n_samples),
        duty: Vec::with_capacity(n_samples),
        mode: Vec::with_capacity(n_samples),
        v_error: Vec::with_capacity(n_samples),
        v_ea: Vec::with_capacity(n_samples),
    };

    for k in 0..n_samples {
        let t = k as f64 * cfg.sample_time;
        while next_disturbance < disturbances.len() && disturbances[next_disturbance].time <= t {
            let d = disturbances[next_disturbance];
            match d.target {
                DisturbanceTarget::VBatt => live.p.v_batt = d.value,
                DisturbanceTarget::VBus => live.p.v_bus = d.value,
                DisturbanceTarget::RLoad => live.p.r_load = d.value,
                DisturbanceTarget::SetpointBus => live.setpoint_bus = d.value,
                DisturbanceTarget::SetpointBatt => live.setpoint_batt = d.value,
            }
            next_disturbance += 1;
        }
        if let ModePolicy::Auto { hysteresis_volts } = cfg.mode_policy {
            let bus_measurement = match mode {
                OperatingMode::Boost => v_bus_cap,
                OperatingMode::Buck => live.p.v_bus,
            };
            let wanted = if bus_measurement < live.setpoint_bus - hysteresis_volts {
                Some(OperatingMode::Boost)
            } else if bus_measurement > live.setpoint_bus + hysteresis_volts {
                Some(OperatingMode::Buck)
            } else {
                None
            };
            if let Some(m) = wanted {
                if m != mode {
                    mode = m;
                    ctrl.reset();
                }
            }
        }
        let (setpoint, v_c) = match mode {
            OperatingMode::Boost => (live.setpoint_bus, v_bus_cap),
            OperatingMode::Buck => (live.setpoint_batt, v_batt_cap),
        };
        let error = setpoint - v_c;
        let raw = ctrl.output(error);
        let duty = raw.clamp(cfg.duty_min, cfg.duty_max);
        let saturated_high = raw > cfg.duty_max;
        let saturated_low = raw < cfg.duty_min;
        // conditional integration: hold the registers only while the error
        // keeps pushing further into the active limit
        let hold = (saturated_high && error > 0.0) || (saturated_low && error < 0.0);
        if !hold {
            ctrl.advance(error, raw);
        }

        trace.i_l.push(i_l);
        trace.v_c.push(v_c);
        trace.duty.push(duty);
        trace.mode.push(mode);
        trace.v_error.push(error);
        trace.v_ea.push(raw);

        for _ in 0..n_sub {
            let state = |il: f64, vc: f64| (il, vc);
            let vc_active = match mode {
                OperatingMode::Boost => v_bus_cap,
                OperatingMode::Buck => v_batt_cap,
            };
            let f = |il: f64, vc: f64| nonlinear_derivatives(&live.p, mode, state(il, vc), duty);
            let (k1i, k1v) = f(i_l, vc_active);
            let (k2i, k2v) = f(i_l + 0.5 * h * k1i, vc_active + 0.5 * h * k1v);
            let (k3i, k3v) = f(i_l + 0.5 * h * k2i, vc_active + 0.5 * h * k2v);
            let (k4i, k4v) = f(i_l + h * k3i, vc_active + h * k3v);
            i_l += h / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i);
            let v_new = vc_active + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            match mode {
                OperatingMode::Boost => v_bus_cap = v_new,
                OperatingMode::Buck => v_batt_cap = v_new,
            }
            if !(i_l.is_finite() && v_new.is_finite()) || i_l.abs() > 1e9 || v_new.abs() > 1e9 {
                return Err(Error::NonFiniteState(t));
            }
        }
    }
    Ok(trace)
}

/// Fixed-duty open-loop integration of the averaged model; the equilibrium
/// cross-check for the closed-loop machinery.
pub fn simulate_open_loop(
    p: &ConverterParams,
    mode: OperatingMode,
    duty: f64,
    cfg: &SimConfig,
) -> Result<SimTrace> {
    p.validate()?;
    cfg.validate(p)?;
    let n_samples = (cfg.horizon / cfg.sample_time).round() as usize;
    let n_sub = (cfg.sample_time / cfg.ode_step).round().max(1.0) as usize;
    let h = cfg.sample_time / n_sub as f64;
    let (mut i_l, mut v_c) = cfg.initial_state;
    let mut trace = SimTrace {
        dt: cfg.sample_time,
        i_l: Vec::with_capacity(n_samples),
        v_c: Vec::with_capacity(n_samples),
        duty: vec![duty; n_samples],
        mode: vec![mode; n_samples],
        v_error: vec![0.0; n_samples],
        v_ea: vec![duty; n_samples],
    };
    for k in 0..n_samples {
        trace.i_l.push(i_l);
        trace.v_c.push(v_c);
        for _ in 0..n_sub {
            let f = |il: f64, vc: f64| nonlinear_derivatives(p, mode, (il, vc), duty);
            let (k1i, k1v) = f(i_l, v_c);
            let (k2i, k2v) = f(i_l + 0.5 * h * k1i, v_c + 0.5 * h * k1v);
            let (k3i, k3v) = f(i_l + 0.5 * h * k2i, v_c + 0.5 * h * k2v);
            let (k4i, k4v) = f(i_l + h * k3i, v_c + h * k3v);
            i_l += h / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i);
            v_c += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            if !(i_l.is_finite() && v_c.is_finite()) {
                return Err(Error::NonFiniteState(k as f64 * cfg.sample_time));
            }
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy)]
pub struct SmallSignalReport {
    pub perturbation: f64,
    /// max |nonlinear - scaled linear| / |perturbation| over the window.
    pub max_relative_deviation: f64,
    /// Steady operating point the loop had reached before the step.
    pub operating_voltage: f64,
    pub operating_duty: f64,
}

/// Compare the nonlinear loop's response to a setpoint step against the
/// linearized closed loop scaled by the same step. The linear model comes
/// from finite-difference linearization at the reached operating point, so
/// it shares no code path with the nonlinear integrator.
pub fn small_signal_consistency(
    p: &ConverterParams,
    gains: &PidGains,
    cfg: &SimConfig,
    perturbation: f64,
) -> Result<SmallSignalReport> {
    let mode = match cfg.mode_policy {
        ModePolicy::Fixed(m) => m,
        ModePolicy::Auto { .. } => {
            return Err(Error::InvalidParameter(
                "small-signal comparison needs a fixed mode".into(),
            ))
        }
    };
    let t_step = 0.5 * cfg.horizon;
    let (sp_target, base_sp) = match mode {
        OperatingMode::Boost => (DisturbanceTarget::SetpointBus, cfg.setpoint_bus),
        OperatingMode::Buck => (DisturbanceTarget::SetpointBatt, cfg.setpoint_batt),
    };
    let mut stepped_cfg = cfg.clone();
    stepped_cfg.disturbances.push(Disturbance {
        time: t_step,
        target: sp_target,
        value: base_sp + perturbation,
    });
    let trace = simulate_closed_loop(p, gains, &stepped_cfg)?;

    let k_step = (t_step / cfg.sample_time).round() as usize;
    let pre = &trace.v_c[k_step.saturating_sub(200).max(1)..k_step];
    let v_ss = pre.iter().sum::<f64>() / pre.len() as f64;
    let duty_ss = trace.duty[k_step - 1];
    if perturbation == 0.0 {
        let dev = trace.v_c[k_step..]
            .iter()
            .map(|v| (v - v_ss).abs())
            .fold(0.0f64, f64::max);
        return Ok(SmallSignalReport {
            perturbation,
            max_relative_deviation: dev,
            operating_voltage: v_ss,
            operating_duty: duty_ss,
        });
    }

    // linear reference: FD-linearized duty channel closed through the same
    // compensator structure in continuous time
    let x_op = (trace.i_l[k_step - 1], v_ss);
    let a = state_jacobian_fd(p, mode, x_op, duty_ss);
    let b = duty_sensitivity_fd(p, mode, x_op, duty_ss);
    let ss = StateSpaceModel::new(
        vec![a[0].to_vec(), a[1].to_vec()],
        vec![vec![b.0], vec![b.1]],
        vec![vec![0.0, 1.0]],
        vec![vec![0.0]],
    )?;
    let g_vd = ss_to_tf(&ss, 0, 0)?;
    let closed = tf_feedback(&tf_series(&pidn_transfer(gains), &g_vd)?, 1.0)?;
    let window = cfg.horizon - t_step;
    let lin = crate::analysis::step_response(&closed, window)?;

    let mut max_dev = 0.0f64;
    for k in k_step..trace.len() {
        let tau = (k - k_step) as f64 * cfg.sample_time;
        let idx = tau / lin.dt;
        let i0 = (idx.floor() as usize).min(lin.values.len() - 1);
        let i1 = (i0 + 1).min(lin.values.len() - 1);
        let frac = idx - i0 as f64;
        let lin_v = lin.values[i0] * (1.0 - frac) + lin.values[i1] * frac;
        let nl = trace.v_c[k] - v_ss;
        max_dev = max_dev.max((nl - perturbation * lin_v).abs());
    }
    Ok(SmallSignalReport {
        perturbation,
        max_relative_deviation: max_dev / perturbation.abs(),
        operating_voltage: v_ss,
        operating_duty: duty_ss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1.0)
    }

    /// Impulse response by long division of num/den in powers of 1/z.
    fn long_division_impulse(g: &TransferFunction, n: usize) -> Vec<f64> {
        let gm = g.den_monic();
        let nc = gm.num.coeffs();
        let ac = gm.den.coeffs();
        let pad = ac.len() - nc.len();
        let b: Vec<f64> = std::iter::repeat(0.0).take(pad).chain(nc.iter().copied()).collect();
        let mut h = vec![0.0; n];
        for k in 0..n {
            let mut v = if k < b.len() { b[k] } else { 0.0 };
            for j in 1..ac.len().min(k + 1) {
                v -= ac[j] * h[k - j];
            }
            h[k] = v;
        }
        h
    }

    #[test]
    fn unity_and_delay_realizations() {
        let one = TransferFunction::discrete(&[1.0], &[1.0], 0.1).unwrap();
        let mut de = realize_difference_equation(&one).unwrap();
        for u in [1.0, -2.0, 0.5] {
            assert_eq!(de.step(u), u);
        }
        let delay = TransferFunction::discrete(&[1.0], &[1.0, 0.0], 0.1).unwrap();
        let mut de = realize_difference_equation(&delay).unwrap();
        assert_eq!(de.step(3.0), 0.0);
        assert_eq!(de.step(0.0), 3.0);
    }

    #[test]
    fn realization_matches_long_division() {
        let g = TransferFunction::discrete(
            &[49.1193965, 89.8097123, 40.6903158],
            &[1.0, -0.0501066392, -0.9498933608],
            0.1,
        )
        .unwrap();
        let h = long_division_impulse(&g, 200);
        let mut de = realize_difference_equation(&g).unwrap();
        let mut max_err = 0.0f64;
        for (k, hk) in h.iter().enumerate() {
            let u = if k == 0 { 1.0 } else { 0.0 };
            let y = de.step(u);
            max_err = max_err.max((y - hk).abs());
        }
        assert!(max_err <= 1e-10, "max err {max_err}");
    }

    #[test]
    fn step_drive_matches_step_response() {
        let g = TransferFunction::discrete(
            &[49.1193965, 89.8097123, 40.6903158],
            &[1.0, -0.0501066392, -0.9498933608],
            0.1,
        )
        .unwrap();
        let ts = crate::analysis::step_response(&g, 5.0).unwrap();
        let mut de = realize_difference_equation(&g).unwrap();
        for v in ts.values.iter() {
            let y = de.step(1.0);
            assert!((y - v).abs() <= 1e-9 * v.abs().max(1.0));
        }
    }

    #[test]
    fn improper_realization_rejected() {
        let g = TransferFunction::discrete(&[1.0, 0.0, 0.0], &[1.0, 0.5], 0.1).unwrap();
        assert!(matches!(
            realize_difference_equation(&g),
            Err(Error::ImproperTransferFunction)
        ));
    }

    #[test]
    fn boost_reaches_bus_setpoint() {
        let p = ConverterParams::default();
        let cfg = SimConfig::default();
        let trace = simulate_closed_loop(&p, &boost_sim_gains(), &cfg).unwrap();
        let v = SimTrace::tail_mean(&trace.v_c, 0.05);
        let d = SimTrace::tail_mean(&trace.duty, 0.05);
        let i = SimTrace::tail_mean(&trace.i_l, 0.05);
        assert!(close(v, 24.0, 0.02), "v_C settled at {v}");
        assert!((d - 0.5).abs() <= 0.02, "duty settled at {d}");
        // load draws v/R = 2.4 A at 24 V
        assert!(close(v / p.r_load, 2.4, 0.02));
        // lossless power balance
        let ratio = p.v_batt * i / (v * v / p.r_load);
        assert!(close(ratio, 1.0, 0.02), "power ratio {ratio}");
    }

    #[test]
    fn buck_reaches_battery_setpoint() {
        let p = ConverterParams::default();
        let cfg = SimConfig {
            mode_policy: ModePolicy::Fixed(OperatingMode::Buck),
            horizon: 0.3,
            ..Default::default()
        };
        let trace = simulate_closed_loop(&p, &buck_sim_gains(), &cfg).unwrap();
        let v = SimTrace::tail_mean(&trace.v_c, 0.05);
        let d = SimTrace::tail_mean(&trace.duty, 0.05);
        assert!(close(v, 12.0, 0.02), "v_C settled at {v}");
        assert!((d - 0.5).abs() <= 0.02, "duty settled at {d}");
    }

    #[test]
    fn duty_always_within_limits() {
        let p = ConverterParams::default();
        let cfg = SimConfig::default();
        let trace = simulate_closed_loop(&p, &boost_sim_gains(), &cfg).unwrap();
        assert!(trace
            .duty
            .iter()
            .all(|&d| (cfg.duty_min..=cfg.duty_max).contains(&d)));
    }

    #[test]
    fn deterministic_replay() {
        let p = ConverterParams::default();
        let cfg = SimConfig {
            horizon: 0.1,
            ..Default::default()
        };
        let a = simulate_closed_loop(&p, &boost_sim_gains(), &cfg).unwrap();
        let b = simulate_closed_loop(&p, &boost_sim_gains(), &cfg).unwrap();
        assert_eq!(a.v_c, b.v_c);
        assert_eq!(a.duty, b.duty);
    }

    #[test]
    fn halving_ode_step_barely_moves_the_tail() {
        let p = ConverterParams::default();
        let cfg = SimConfig {
            horizon: 0.2,
            ..Default::default()
        };
        let fine = SimConfig {
            ode_step: cfg.ode_step / 2.0,
            ..cfg.clone()
        };
        let a = simulate_closed_loop(&p, &boost_sim_gains(), &cfg).unwrap();
        let b = simulate_closed_loop(&p, &boost_sim_gains(), &fine).unwrap();
        let n = a.v_c.len();
        for k in (n * 9 / 10)..n {
            let rel = (a.v_c[k] - b.v_c[k]).abs() / b.v_c[k].abs().max(1.0);
            assert!(rel < 1e-3, "tail deviation {rel} at sample {k}");
        }
    }

    #[test]
    fn open_loop_equilibrium_matches_analytic() {
        let p = ConverterParams::default();
        let cfg = SimConfig {
            horizon: 0.8,
            ..Default::default()
        };
        let trace = simulate_open_loop(&p, OperatingMode::Boost, 0.5, &cfg).unwrap();
        let v = SimTrace::tail_mean(&trace.v_c, 0.02);
        let i = SimTrace::tail_mean(&trace.i_l, 0.02);
        let (i_eq, v_eq) = crate::plant::equilibrium(&p, OperatingMode::Boost, 0.5);
        assert!(close(v, v_eq, 1e-3));
        assert!(close(i, i_eq, 1e-3));
    }

    #[test]
    fn mode_switching_on_bus_collapse() {
        let p = ConverterParams::default();
        let cfg = SimConfig {
            horizon: 0.4,
            mode_policy: ModePolicy::Auto {
                hysteresis_volts: 0.5,
            },
            // bus source present at start, collapses mid-run
            disturbances: vec![Disturbance {
                time: 0.2,
                target: DisturbanceTarget::VBus,
                value: 20.0,
            }],
            initial_state: (0.0, 0.0),
            ..Default::default()
        };
        // starts in boost (bus cap at 0 V < setpoint - hysteresis)
        let trace = simulate_closed_loop(&p, &boost_sim_gains(), &cfg).unwrap();
        assert_eq!(trace.mode[0], OperatingMode::Boost);
        assert!(trace.mode.iter().all(|&m| m == OperatingMode::Boost));
        // a healthy bus at start flips the policy to buck immediately
        let cfg2 = SimConfig {
            initial_state: (0.0, 26.0),
            ..cfg
        };
        let trace2 = simulate_closed_loop(&p, &buck_sim_gains(), &cfg2).unwrap();
        assert_eq!(trace2.mode[0], OperatingMode::Buck);
    }

    #[test]
    fn small_signal_matches_linear_closed_loop() {
        let p = ConverterParams::default();
        let cfg = SimConfig {
            horizon: 0.9,
            ..Default::default()
        };
        let r = small_signal_consistency(&p, &boost_sim_gains(), &cfg, 0.25).unwrap();
        assert!(
            r.max_relative_deviation <= 0.05,
            "deviation {}",
            r.max_relative_deviation
        );
        assert!(close(r.operating_voltage, 24.0, 0.02));

        let z = small_signal_consistency(&p, &boost_sim_gains(), &cfg, 0.0).unwrap();
        assert!(z.max_relative_deviation <= 1e-6);
    }

    #[test]
    fn large_signal_departs_from_linear() {
        let p = ConverterParams::default();
        let cfg = SimConfig {
            horizon: 1.6,
            ..Default::default()
        };
        let r = small_signal_consistency(&p, &boost_sim_gains(), &cfg, 12.0).unwrap();
        assert!(
            r.max_relative_deviation > 0.05,
            "large-signal deviation only {}",
            r.max_relative_deviation
        );
    }
}
