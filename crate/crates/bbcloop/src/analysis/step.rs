//! Unit-step time responses and the transient metrics extracted from them.
//!
//! Continuous systems are discretized exactly (zero-order hold through the
//! matrix exponential of the augmented state matrix), so stiff pole spreads
//! cost nothing in accuracy. Discrete systems run their native recursion.

use crate::analysis::expm::{expm, SmallMatrix};
use crate::error::{Error, Result};
use crate::lti::{Domain, TransferFunction};

/// Uniformly sampled signal starting at t = 0.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub dt: f64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn time_at(&self, idx: usize) -> f64 {
        idx as f64 * self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepMetrics {
    /// Signed sample of largest magnitude.
    pub peak_amplitude: f64,
    /// Percent overshoot beyond the final value (>= 0).
    pub overshoot_pct: f64,
    /// 10% -> 90% crossing interval, when both crossings exist.
    pub rise_time: Option<f64>,
    /// Last exit from the settling band, 0 when never outside.
    pub settling_time: Option<f64>,
    pub final_value: f64,
}

/// Thresholds for metric extraction. The reference characterization uses the
/// conventional 2% band and 10-90% rise.
#[derive(Debug, Clone, Copy)]
pub struct MetricsConfig {
    pub settle_band: f64,
    pub rise_low: f64,
    pub rise_high: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            settle_band: 0.02,
            rise_low: 0.1,
            rise_high: 0.9,
        }
    }
}

/// Unit-step response over `[0, horizon]`.
pub fn step_response(g: &TransferFunction, horizon: f64) -> Result<TimeSeries> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidParameter("horizon must be > 0".into()));
    }
    if !g.is_proper() {
        return Err(Error::ImproperTransferFunction);
    }
    match g.domain {
        Domain::Continuous => step_continuous(g, horizon),
        Domain::Discrete { sample_time } => step_discrete(g, horizon, sample_time),
    }
}

fn step_continuous(g: &TransferFunction, horizon: f64) -> Result<TimeSeries> {
    let gm = g.den_monic();
    let n = gm.den.degree();
    if n == 0 {
        // static gain
        let k = gm.num.leading();
        let dt = horizon / 2000.0;
        let len = 2001;
        return Ok(TimeSeries {
            dt,
            values: vec![k; len],
        });
    }
    // split off the direct feedthrough when the numerator is biproper
    let (d_term, num_strict) = if gm.num.degree() == n {
        let d = gm.num.leading();
        (d, gm.num.add(&gm.den.scale(-d)))
    } else {
        (0.0, gm.num.clone())
    };
    let fastest = gm
        .den
        .roots()?
        .iter()
        .map(|p| p.norm())
        .fold(0.0f64, f64::max);
    let mut h = horizon / 2000.0;
    if fastest > 0.0 {
        h = h.min(0.1 / fastest);
    }
    let steps = (horizon / h).ceil() as usize;
    // controllable canonical realization, then exact ZOH via the augmented
    // exponential exp([[A, B], [0, 0]] h) = [[Ad, Bd], [0, I]]
    let mut m = SmallMatrix::zeros(n + 1);
    for i in 0..n - 1 {
        m.set(i, i + 1, h);
    }
    let a_coeffs = gm.den.coeffs(); // [1, a1, ..., an]
    for j in 0..n {
        m.set(n - 1, j, -a_coeffs[n - j] * h);
    }
    m.set(n - 1, n, h); // B = [0, ..., 0, 1]^T
    let e = expm(&m);
    // C row from the strictly-proper numerator, padded to length n
    let mut c_row = vec![0.0; n];
    let nc = num_strict.coeffs();
    for (i, &b) in nc.iter().rev().enumerate() {
        if i < n {
            c_row[i] = b;
        }
    }
    let mut x = vec![0.0; n];
    let mut values = Vec::with_capacity(steps + 1);
    for _ in 0..=steps {
        let y: f64 = c_row.iter().zip(&x).map(|(c, xi)| c * xi).sum::<f64>() + d_term;
        values.push(y);
        let mut xn = vec![0.0; n];
        for (i, xni) in xn.iter_mut().enumerate() {
            let mut acc = e.at(i, n); // Bd * u, u = 1
            for (j, xj) in x.iter().enumerate() {
                acc += e.at(i, j) * xj;
            }
            *xni = acc;
        }
        x = xn;
    }
    Ok(TimeSeries { dt: h, values })
}

fn step_discrete(g: &TransferFunction, horizon: f64, ts: f64) -> Result<TimeSeries> {
    let gm = g.den_monic();
    let b = gm.num.coeffs();
    let a = gm.den.coeffs();
    let steps = (horizon / ts).floor() as usize;
    let shift = a.len() - b.len(); // delay of the numerator taps
    let mut y_hist: Vec<f64> = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let mut acc = 0.0;
        for (i, &bi) in b.iter().enumerate() {
            // u[k - shift - i], unit step: 1 when index >= 0
            if k >= shift + i {
                acc += bi;
            }
        }
        for (i, &ai) in a.iter().enumerate().skip(1) {
            if k >= i {
                acc -= ai * y_hist[k - i];
            }
        }
        y_hist.push(acc);
        values.push(acc);
    }
    Ok(TimeSeries { dt: ts, values })
}

/// Extract transient metrics from a settled unit-step series.
pub fn step_metrics(ts: &TimeSeries) -> Result<StepMetrics> {
    step_metrics_with(ts, &MetricsConfig::default())
}

pub fn step_metrics_with(ts: &TimeSeries, cfg: &MetricsConfig) -> Result<StepMetrics> {
    let y = &ts.values;
    if y.len() < 50 {
        return Err(Error::EmptyData("series too short for metrics".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonSettling);
    }
    let n = y.len();
    let tail2 = &y[n - (n / 50).max(2)..];
    let final_value = tail2.iter().sum::<f64>() / tail2.len() as f64;
    if final_value.abs() < 1e-12 {
        return Err(Error::NonSettling);
    }
    let tail10 = &y[n - (n / 10).max(2)..];
    let (lo, hi) = tail10
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    let variation_pct = 100.0 * (hi - lo) / final_value.abs();
    if variation_pct >= 0.1 {
        return Err(Error::HorizonTooShort(variation_pct));
    }

    let peak_amplitude = y
        .iter()
        .copied()
        .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
        .unwrap();
    let sign = final_value.signum();
    let deviation_max = y
        .iter()
        .map(|&v| (v - final_value) * sign)
        .fold(f64::NEG_INFINITY, f64::max);
    let overshoot_pct = (100.0 * deviation_max / final_value.abs()).max(0.0);

    let cross = |level: f64| -> Option<f64> {
        for i in 1..n {
            let prev = (y[i - 1] - level) * sign;
            let cur = (y[i] - level) * sign;
            if prev < 0.0 && cur >= 0.0 {
                let f = if cur == prev { 0.0 } else { -prev / (cur - prev) };
                return Some(ts.dt * (i as f64 - 1.0 + f));
            }
        }
        None
    };
    let t_lo = cross(cfg.rise_low * final_value);
    let t_hi = cross(cfg.rise_high * final_value);
    let rise_time = match (t_lo, t_hi) {
        (Some(a), Some(b)) if b >= a => Some(b - a),
        _ => None,
    };

    let band = cfg.settle_band * final_value.abs();
    let mut settling_time = Some(0.0);
    for i in (0..n).rev() {
        if (y[i] - final_value).abs() > band {
            if i + 1 < n {
                let a = (y[i] - final_value).abs() - band;
                let b = (y[i + 1] - final_value).abs() - band;
                let f = if a == b { 0.0 } else { a / (a - b) };
                settling_time = Some(ts.dt * (i as f64 + f));
            } else {
                settling_time = None; // still outside at the end
            }
            break;
        }
    }
    if let (Some(r), Some(s)) = (rise_time, settling_time) {
        debug_assert!(r <= s + ts.dt, "rise {r} exceeds settle {s}");
    }
    Ok(StepMetrics {
        peak_amplitude,
        overshoot_pct,
        rise_time,
        settling_time,
        final_value,
    })
}

/// Closed-form percent overshoot of a canonical all-pole second-order system.
pub fn underdamped_overshoot_pct(zeta: f64) -> f64 {
    if zeta >= 1.0 {
        return 0.0;
    }
    100.0 * (-std::f64::consts::PI * zeta / (1.0 - zeta * zeta).sqrt()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::dc_gain;

    fn boost_plant() -> TransferFunction {
        TransferFunction::continuous(&[2e6], &[1.0, 400.0, 1e6]).unwrap()
    }

    #[test]
    fn static_gain_is_flat() {
        let g = TransferFunction::continuous(&[2.0], &[1.0]).unwrap();
        let ts = step_response(&g, 1.0).unwrap();
        assert!(ts.values.iter().all(|&v| v == 2.0));
    }

    #[test]
    fn open_loop_boost_metrics() {
        let ts = step_response(&boost_plant(), 0.06).unwrap();
        let m = step_metrics(&ts).unwrap();
        assert!((m.final_value - 2.0).abs() < 2e-3);
        assert!((m.peak_amplitude - 3.05).abs() < 0.01);
        assert!((m.overshoot_pct - 52.66).abs() < 0.2);
        let rise = m.rise_time.unwrap();
        assert!((rise - 1.2034e-3).abs() < 2e-5);
        let settle = m.settling_time.unwrap();
        assert!((settle - 1.96e-2).abs() < 2e-4);
        // first peak near pi / damped frequency
        let peak_t = std::f64::consts::PI / 979.795897;
        let idx = (peak_t / ts.dt).round() as usize;
        let local = ts.values[idx];
        assert!((local - m.peak_amplitude).abs() < 1e-3);
    }

    #[test]
    fn closed_form_overshoot_oracle() {
        // any all-pole second-order: overshoot matches the zeta formula
        for (zeta, wn) in [(0.2, 1000.0), (0.5, 300.0), (0.7, 50.0)] {
            let den = [1.0, 2.0 * zeta * wn, wn * wn];
            let g = TransferFunction::continuous(&[wn * wn], &den).unwrap();
            let horizon = 60.0 / (zeta * wn);
            let ts = step_response(&g, horizon).unwrap();
            let m = step_metrics(&ts).unwrap();
            let expect = underdamped_overshoot_pct(zeta);
            assert!(
                (m.overshoot_pct - expect).abs() <= 0.5,
                "zeta {zeta}: {} vs {expect}",
                m.overshoot_pct
            );
        }
    }

    #[test]
    fn final_value_matches_dc_gain() {
        let ts = step_response(&boost_plant(), 0.06).unwrap();
        let m = step_metrics(&ts).unwrap();
        let dc = dc_gain(&boost_plant()).unwrap();
        assert!((m.final_value - dc).abs() <= 0.002 * dc.abs());
    }

    #[test]
    fn discrete_step_settles_at_dc_gain() {
        let g = crate::lti::tustin_discretize(&boost_plant(), 1e-5).unwrap();
        let ts = step_response(&g, 0.06).unwrap();
        let m = step_metrics(&ts).unwrap();
        assert!((m.final_value - 2.0).abs() < 2e-3);
    }

    #[test]
    fn improper_rejected_and_horizon_too_short() {
        let improper = TransferFunction::continuous(&[1.0, 0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(matches!(
            step_response(&improper, 1.0),
            Err(Error::ImproperTransferFunction)
        ));
        let ts = step_response(&boost_plant(), 0.004).unwrap();
        assert!(matches!(step_metrics(&ts), Err(Error::HorizonTooShort(_))));
    }

    #[test]
    fn unstable_response_flagged_by_metrics() {
        let g = TransferFunction::continuous(&[1.0], &[1.0, -1.0]).unwrap();
        let ts = step_response(&g, 60.0).unwrap();
        assert!(step_metrics(&ts).is_err());
    }

    #[test]
    fn negative_dipping_response_rise_uses_upward_crossings() {
        // response dips below zero before rising to its final value; the 10%
        // and 90% crossings must be taken on the recovery
        let mut values = vec![0.0; 20000];
        for (i, v) in values.iter_mut().enumerate() {
            let t = i as f64 * 1e-3;
            let dip = if t < 0.2 { -0.9 * (1.0 - t / 0.2) } else { 0.0 };
            *v = 1.0 - (-3.0 * t).exp() + dip;
        }
        let ts = TimeSeries { dt: 1e-3, values };
        let m = step_metrics(&ts).unwrap();
        assert!((m.peak_amplitude - 1.0).abs() < 0.01);
        let rise = m.rise_time.unwrap();
        assert!(rise > 0.0);
        assert!(m.settling_time.unwrap() >= rise);
    }
}
