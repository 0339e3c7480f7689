//! Linear time-invariant system representations and interconnection.
//!
//! Transfer functions carry their domain (continuous, or discrete with an
//! explicit sample time). Composition never cancels pole-zero pairs; factored
//! forms keep near-cancelling factors visible.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Relative tolerance for treating two sample times as identical.
const TS_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Continuous,
    Discrete { sample_time: f64 },
}

impl Domain {
    pub fn compatible(&self, other: &Domain) -> bool {
        match (self, other) {
            (Domain::Continuous, Domain::Continuous) => true,
            (Domain::Discrete { sample_time: a }, Domain::Discrete { sample_time: b }) => {
                (a - b).abs() <= TS_REL_TOL * a.abs().max(b.abs())
            }
            _ => false,
        }
    }

    pub fn sample_time(&self) -> Option<f64> {
        match self {
            Domain::Continuous => None,
            Domain::Discrete { sample_time } => Some(*sample_time),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransferFunction {
    pub num: Polynomial,
    pub den: Polynomial,
    pub domain: Domain,
}

#[derive(Debug, Clone)]
pub struct StateSpaceModel {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
}

impl StateSpaceModel {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, c: Vec<Vec<f64>>, d: Vec<Vec<f64>>) -> Result<Self> {
        let n = a.len();
        if n == 0 || a.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidParameter("A must be square, n >= 1".into()));
        }
        if b.len() != n {
            return Err(Error::InvalidParameter("B row count must match A".into()));
        }
        let m = b[0].len();
        if b.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidParameter("ragged B".into()));
        }
        let p = c.len();
        if c.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidParameter("C column count must match A".into()));
        }
        if d.len() != p || d.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidParameter("D must be p x m".into()));
        }
        Ok(StateSpaceModel { a, b, c, d })
    }

    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn inputs(&self) -> usize {
        self.b[0].len()
    }

    pub fn outputs(&self) -> usize {
        self.c.len()
    }
}

impl TransferFunction {
    pub fn new(num: Polynomial, den: Polynomial, domain: Domain) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Ok(TransferFunction { num, den, domain })
    }

    pub fn continuous(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(Polynomial::new(num), Polynomial::new(den), Domain::Continuous)
    }

    pub fn discrete(num: &[f64], den: &[f64], sample_time: f64) -> Result<Self> {
        if sample_time <= 0.0 {
            return Err(Error::InvalidParameter("sample_time must be > 0".into()));
        }
        Self::new(
            Polynomial::new(num),
            Polynomial::new(den),
            Domain::Discrete { sample_time },
        )
    }

    pub fn constant_gain(k: f64, domain: Domain) -> Self {
        TransferFunction {
            num: Polynomial::constant(k),
            den: Polynomial::constant(1.0),
            domain,
        }
    }

    pub fn is_proper(&self) -> bool {
        self.num.degree() <= self.den.degree()
    }

    /// Evaluate the frequency response at angular frequency `omega` (rad/s):
    /// s = j omega for continuous systems, z = exp(j omega Ts) for discrete.
    pub fn eval_at_omega(&self, omega: f64) -> Complex64 {
        let x = match self.domain {
            Domain::Continuous => Complex64::new(0.0, omega),
            Domain::Discrete { sample_time } => Complex64::from_polar(1.0, omega * sample_time),
        };
        self.num.eval(x) / self.den.eval(x)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.num.eval(x) / self.den.eval(x)
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        if self.den.degree() == 0 {
            return Ok(Vec::new());
        }
        self.den.roots()
    }

    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        if self.num.degree() == 0 || self.num.is_zero() {
            return Ok(Vec::new());
        }
        self.num.roots()
    }

    /// Normalize so the denominator is monic. Gain moves into the numerator.
    pub fn den_monic(&self) -> TransferFunction {
        let lead = self.den.leading();
        TransferFunction {
            num: self.num.scale(1.0 / lead),
            den: self.den.scale(1.0 / lead),
            domain: self.domain,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZpkForm {
    pub zeros: Vec<Complex64>,
    pub poles: Vec<Complex64>,
    pub gain: f64,
    pub domain: Domain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DampingClass {
    Underdamped,
    CriticallyDamped,
    Overdamped,
}

#[derive(Debug, Clone, Copy)]
pub struct SecondOrderCharacter {
    pub zeta: f64,
    pub omega_n: f64,
    pub class: DampingClass,
}

/// Transfer function of one input/output channel of a state-space model,
/// via the Leverrier-Faddeev resolvent expansion. The denominator is the
/// characteristic polynomial of A.
pub fn ss_to_tf(ss: &StateSpaceModel, input: usize, output: usize) -> Result<TransferFunction> {
    let n = ss.order();
    if input >= ss.inputs() {
        return Err(Error::IndexOutOfRange(format!("input {input}")));
    }
    if output >= ss.outputs() {
        return Err(Error::IndexOutOfRange(format!("output {output}")));
    }
    // M_0 = I, c_0 = 1; M_k = A M_{k-1} + c_k I with c_k = -tr(A M_{k-1})/k.
    let mut m = identity(n);
    let mut char_poly = vec![1.0];
    let mut num_coeffs: Vec<f64> = Vec::with_capacity(n);
    num_coeffs.push(cmb(&ss.c[output], &m, &column(&ss.b, input)));
    for k in 1..=n {
        let am = matmul(&ss.a, &m);
        let ck = -trace(&am) / k as f64;
        char_poly.push(ck);
        m = mat_add_diag(&am, ck);
        if k < n {
            num_coeffs.push(cmb(&ss.c[output], &m, &column(&ss.b, input)));
        }
    }
    let den = Polynomial::new(&char_poly);
    let mut num = Polynomial::new(&num_coeffs);
    let dij = ss.d[output][input];
    if dij != 0.0 {
        num = num.add(&den.scale(dij));
    }
    TransferFunction::new(num, den, Domain::Continuous)
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn trace(a: &[Vec<f64>]) -> f64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

fn mat_add_diag(a: &[Vec<f64>], c: f64) -> Vec<Vec<f64>> {
    let mut out = a.to_vec();
    for i in 0..a.len() {
        out[i][i] += c;
    }
    out
}

fn column(b: &[Vec<f64>], j: usize) -> Vec<f64> {
    b.iter().map(|row| row[j]).collect()
}

/// c^T M b
fn cmb(c: &[f64], m: &[Vec<f64>], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, &ci) in c.iter().enumerate() {
        if ci == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            acc += ci * m[i][j] * bj;
        }
    }
    acc
}

/// Series interconnection g2(g1(u)). No pole-zero cancellation.
pub fn tf_series(g1: &TransferFunction, g2: &TransferFunction) -> Result<TransferFunction> {
    if !g1.domain.compatible(&g2.domain) {
        return Err(Error::DomainMismatch(format!(
            "{:?} vs {:?}",
            g1.domain, g2.domain
        )));
    }
    TransferFunction::new(g1.num.mul(&g2.num), g1.den.mul(&g2.den), g1.domain)
}

/// Closed loop M = g / (1 + h g) for a scalar feedback gain h.
pub fn tf_feedback(g: &TransferFunction, h: f64) -> Result<TransferFunction> {
    if !h.is_finite() {
        return Err(Error::InvalidParameter("feedback gain must be finite".into()));
    }
    let den = g.den.add(&g.num.scale(h));
    if den.is_zero() {
        return Err(Error::DegenerateFeedback);
    }
    TransferFunction::new(g.num.clone(), den, g.domain)
}

/// Loop transfer controller * plant * sensor_gain * pwm_gain.
pub fn loop_gain(
    controller: &TransferFunction,
    plant: &TransferFunction,
    sensor_gain: f64,
    pwm_gain: f64,
) -> Result<TransferFunction> {
    let series = tf_series(controller, plant)?;
    TransferFunction::new(
        series.num.scale(sensor_gain * pwm_gain),
        series.den,
        series.domain,
    )
}

/// Bilinear (trapezoidal) discretization s -> (2/Ts)(z-1)/(z+1), no prewarp.
/// The result is normalized to a monic denominator; dc gain is preserved
/// exactly because z = 1 maps to s = 0.
pub fn tustin_discretize(g: &TransferFunction, sample_time: f64) -> Result<TransferFunction> {
    if g.domain != Domain::Continuous {
        return Err(Error::DomainMismatch("tustin needs a continuous system".into()));
    }
    if sample_time <= 0.0 {
        return Err(Error::InvalidParameter("sample_time must be > 0".into()));
    }
    let k = 2.0 / sample_time;
    let n = g.num.degree().max(g.den.degree());
    let sub = |p: &Polynomial| -> Polynomial {
        let deg = p.degree();
        let mut out = Polynomial::zero();
        for (i, &c) in p.coeffs().iter().enumerate() {
            let pw = deg - i;
            let mut term = Polynomial::constant(c * k.powi(pw as i32));
            for _ in 0..pw {
                term = term.mul(&Polynomial::new(&[1.0, -1.0]));
            }
            for _ in 0..(n - pw) {
                term = term.mul(&Polynomial::new(&[1.0, 1.0]));
            }
            out = out.add(&term);
        }
        out
    };
    let num_d = sub(&g.num);
    let den_d = sub(&g.den);
    let lead = den_d.leading();
    TransferFunction::new(
        num_d.scale(1.0 / lead),
        den_d.scale(1.0 / lead),
        Domain::Discrete { sample_time },
    )
}

/// Factored zero/pole/gain form. Gain is the ratio of leading coefficients.
pub fn tf_to_zpk(g: &TransferFunction) -> Result<ZpkForm> {
    Ok(ZpkForm {
        zeros: g.zeros()?,
        poles: g.poles()?,
        gain: g.num.leading() / g.den.leading(),
        domain: g.domain,
    })
}

pub fn zpk_to_tf(z: &ZpkForm) -> Result<TransferFunction> {
    let num = Polynomial::from_roots(&z.zeros, z.gain)?;
    let den = Polynomial::from_roots(&z.poles, 1.0)?;
    TransferFunction::new(num, den, z.domain)
}

/// Steady-state gain: the response value at s = 0 (continuous) or z = 1
/// (discrete). A vanishing denominator with nonzero numerator reports as
/// +/- infinity; 0/0 is an error.
pub fn dc_gain(g: &TransferFunction) -> Result<f64> {
    let x = match g.domain {
        Domain::Continuous => 0.0,
        Domain::Discrete { .. } => 1.0,
    };
    let n = g.num.eval_real(x);
    let d = g.den.eval_real(x);
    if d == 0.0 {
        if n == 0.0 {
            return Err(Error::IndeterminateDcGain);
        }
        return Ok(if n > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        });
    }
    Ok(n / d)
}

/// true when the numerator degree does not exceed the denominator degree.
pub fn properness_check(g: &TransferFunction) -> bool {
    g.is_proper()
}

/// Dominant second-order character. The slowest complex-conjugate pole pair
/// supplies the canonical quadratic factor directly; with only real poles the
/// two slowest combine as omega_n = sqrt(p1 p2), zeta = (p1+p2)/(2 omega_n).
pub fn second_order_character(g: &TransferFunction) -> Result<SecondOrderCharacter> {
    if g.domain != Domain::Continuous {
        return Err(Error::DomainMismatch(
            "second-order character is defined for continuous systems".into(),
        ));
    }
    let mut poles = g.poles()?;
    if poles.len() < 2 {
        return Err(Error::TooFewPoles(poles.len()));
    }
    poles.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    let (zeta, omega_n) = match poles.iter().find(|p| p.im != 0.0) {
        Some(p) => {
            let wn = p.norm();
            (-p.re / wn, wn)
        }
        None => {
            let p1 = -poles[0].re;
            let p2 = -poles[1].re;
            let prod = p1 * p2;
            if prod <= 0.0 {
                return Err(Error::InvalidParameter(
                    "dominant real pole pair spans the imaginary axis".into(),
                ));
            }
            let wn = prod.sqrt();
            ((p1 + p2) / (2.0 * wn), wn)
        }
    };
    let class = if (zeta - 1.0).abs() <= 1e-6 {
        DampingClass::CriticallyDamped
    } else if zeta < 1.0 {
        DampingClass::Underdamped
    } else {
        DampingClass::Overdamped
    };
    Ok(SecondOrderCharacter {
        zeta,
        omega_n,
        class,
    })
}

impl std::fmt::Display for TransferFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let var = match self.domain {
            Domain::Continuous => "s",
            Domain::Discrete { .. } => "z",
        };
        write!(
            f,
            "({}) / ({})",
            poly_str(&self.num, var),
            poly_str(&self.den, var)
        )?;
        if let Domain::Discrete { sample_time } = self.domain {
            write!(f, "   [Ts = {sample_time}]")?;
        }
        Ok(())
    }
}

fn poly_str(p: &Polynomial, var: &str) -> String {
    let n = p.degree();
    let mut parts: Vec<String> = Vec::new();
    for (i, &c) in p.coeffs().iter().enumerate() {
        if c == 0.0 && n > 0 {
            continue;
        }
        let pow = n - i;
        let mag = format_sig(c.abs(), 6);
        let term = match pow {
            0 => mag,
            1 => format!("{mag} {var}"),
            _ => format!("{mag} {var}^{pow}"),
        };
        if parts.is_empty() {
            parts.push(if c < 0.0 { format!("-{term}") } else { term });
        } else {
            parts.push(format!("{} {term}", if c < 0.0 { "-" } else { "+" }));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

/// Format with a fixed number of significant digits, trimming noise.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), v);
    // expand small exponents back to plain decimal for readability
    if let Some(epos) = s.find('e') {
        let exp: i32 = s[epos + 1..].parse().unwrap_or(0);
        if (-3..=6).contains(&exp) {
            let plain = format!("{:.*}", (digits as i32 - 1 - exp).max(0) as usize, v);
            return trim_trailing_zeros(&plain);
        }
    }
    s
}

fn trim_trailing_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

impl ZpkForm {
    /// Real-factored display: first-order factors for real roots, quadratic
    /// factors for conjugate pairs.
    pub fn factored(&self) -> String {
        let var = match self.domain {
            Domain::Continuous => "s",
            Domain::Discrete { .. } => "z",
        };
        let k = format_sig(self.gain, 6);
        let z = factors_str(&self.zeros, var);
        let p = factors_str(&self.poles, var);
        let zs = if z.is_empty() { "1".to_string() } else { z };
        format!("{k} * {zs} / {p}")
    }
}

fn factors_str(roots: &[Complex64], var: &str) -> String {
    let mut out = String::new();
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let r = roots[i];
        if r.im == 0.0 {
            if r.re == 0.0 {
                out.push_str(var);
            } else if r.re < 0.0 {
                out.push_str(&format!("({var} + {})", format_sig(-r.re, 6)));
            } else {
                out.push_str(&format!("({var} - {})", format_sig(r.re, 6)));
            }
            used[i] = true;
        } else {
            // find the conjugate partner
            let mut partner = None;
            for (j, u) in used.iter().enumerate().skip(i + 1) {
                if !u && roots[j].im != 0.0 && (roots[j] - r.conj()).norm() == 0.0 {
                    partner = Some(j);
                    break;
                }
            }
            let b = -2.0 * r.re;
            let c = r.norm_sqr();
            let bterm = if b == 0.0 {
                String::new()
            } else if b < 0.0 {
                format!(" - {} {var}", format_sig(-b, 6))
            } else {
                format!(" + {} {var}", format_sig(b, 6))
            };
            out.push_str(&format!("({var}^2{bterm} + {})", format_sig(c, 6)));
            used[i] = true;
            if let Some(j) = partner {
                used[j] = true;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * 1.0f64.max(b.abs())
    }

    fn boost_ss() -> StateSpaceModel {
        StateSpaceModel::new(
            vec![vec![0.0, -500.0], vec![2000.0, -400.0]],
            vec![vec![1000.0], vec![0.0]],
            vec![vec![0.0, 1.0]],
            vec![vec![0.0]],
        )
        .unwrap()
    }

    #[test]
    fn ss_to_tf_reproduces_boost_plant() {
        let tf = ss_to_tf(&boost_ss(), 0, 0).unwrap();
        assert_eq!(tf.den.coeffs(), &[1.0, 400.0, 1e6]);
        assert_eq!(tf.num.coeffs(), &[2e6]);
    }

    #[test]
    fn ss_to_tf_reproduces_buck_plant() {
        let ss = StateSpaceModel::new(
            vec![vec![0.0, -1000.0], vec![8000.0, -44444.444444444445]],
            vec![vec![500.0], vec![0.0]],
            vec![vec![0.0, 1.0]],
            vec![vec![0.0]],
        )
        .unwrap();
        let tf = ss_to_tf(&ss, 0, 0).unwrap();
        assert!(close(tf.den.coeffs()[1], 44444.444444444445, 1e-15));
        assert!(close(tf.den.coeffs()[2], 8e6, 1e-15));
        assert_eq!(tf.num.coeffs(), &[4e6]);
    }

    #[test]
    fn ss_to_tf_integrator() {
        let ss = StateSpaceModel::new(
            vec![vec![0.0]],
            vec![vec![1.0]],
            vec![vec![1.0]],
            vec![vec![0.0]],
        )
        .unwrap();
        let tf = ss_to_tf(&ss, 0, 0).unwrap();
        assert_eq!(tf.num.coeffs(), &[1.0]);
        assert_eq!(tf.den.coeffs(), &[1.0, 0.0]);
    }

    #[test]
    fn ss_to_tf_trace_det_cross_check() {
        let ss = boost_ss();
        let tf = ss_to_tf(&ss, 0, 0).unwrap();
        let tr = ss.a[0][0] + ss.a[1][1];
        let det = ss.a[0][0] * ss.a[1][1] - ss.a[0][1] * ss.a[1][0];
        assert!(close(-tf.den.coeffs()[1], tr, 1e-10));
        assert!(close(tf.den.coeffs()[2], det, 1e-10));
    }

    #[test]
    fn series_and_feedback_basics() {
        let g = TransferFunction::continuous(&[2e6], &[1.0, 400.0, 1e6]).unwrap();
        let one = TransferFunction::constant_gain(1.0, Domain::Continuous);
        let s = tf_series(&g, &one).unwrap();
        assert_eq!(s.num.coeffs(), g.num.coeffs());
        let half = TransferFunction::constant_gain(0.5, Domain::Continuous);
        let scaled = tf_series(&half, &g).unwrap();
        assert_eq!(scaled.num.coeffs(), &[1e6]);

        let open = tf_feedback(&g, 0.0).unwrap();
        assert_eq!(open.den.coeffs(), g.den.coeffs());

        let z = TransferFunction::discrete(&[1.0], &[1.0, 0.5], 0.1).unwrap();
        assert!(tf_series(&g, &z).is_err());
    }

    #[test]
    fn feedback_round_trip_recovers_plant() {
        let g = TransferFunction::continuous(&[74.0, 7.9e4, 1.7e7], &[1.0, 1.7e4, 0.0]).unwrap();
        let closed = tf_feedback(&g, 0.5).unwrap();
        let back = tf_feedback(&closed, -0.5).unwrap();
        for (a, b) in back.den.coeffs().iter().zip(g.den.coeffs()) {
            assert!(close(*a, *b, 1e-9));
        }
    }

    #[test]
    fn tustin_matches_reference_discretizations() {
        let g = TransferFunction::continuous(&[2e6], &[1.0, 400.0, 1e6]).unwrap();
        let gd = tustin_discretize(&g, 1e-5).unwrap();
        assert!(close(gd.num.coeffs()[0], 4.9898954616899935e-5, 1e-12));
        assert!(close(gd.den.coeffs()[1], -1.995908285721414, 1e-12));
        assert!(close(gd.den.coeffs()[2], 0.996008083630648, 1e-12));

        let buck = TransferFunction::continuous(&[4e6], &[1.0, 44444.444444444445, 8e6]).unwrap();
        let bd = tustin_discretize(&buck, 0.1).unwrap();
        assert!(close(bd.num.coeffs()[0], 0.4499797509111644, 1e-12));
        let mut poles = bd.poles().unwrap();
        poles.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!(close(poles[0].re, -0.999096733303, 1e-9));
        assert!(close(poles[1].re, -0.800732274392, 1e-9));
    }

    #[test]
    fn tustin_preserves_dc_gain_exactly() {
        let g = TransferFunction::continuous(&[2e6], &[1.0, 400.0, 1e6]).unwrap();
        for ts in [0.1, 1e-3, 1e-5] {
            let gd = tustin_discretize(&g, ts).unwrap();
            let a = dc_gain(&g).unwrap();
            let b = dc_gain(&gd).unwrap();
            assert!((a - b).abs() <= 1e-9 * a.abs());
        }
    }

    #[test]
    fn tustin_maps_stable_poles_inside_unit_circle() {
        let systems = [
            TransferFunction::continuous(&[2e6], &[1.0, 400.0, 1e6]).unwrap(),
            TransferFunction::continuous(&[4e6], &[1.0, 44444.444444444445, 8e6]).unwrap(),
        ];
        for g in &systems {
            let gd = tustin_discretize(g, 0.1).unwrap();
            for p in gd.poles().unwrap() {
                assert!(p.norm() < 1.0, "pole {p} escaped the unit circle");
            }
        }
    }

    #[test]
    fn dc_gain_cases() {
        let g = TransferFunction::continuous(&[2e6], &[1.0, 400.0, 1e6]).unwrap();
        assert_eq!(dc_gain(&g).unwrap(), 2.0);
        // rounded reference coefficients of the discretized buck plant
        let gd = TransferFunction::discrete(
            &[0.4501, 0.9002, 0.4501],
            &[1.0, 1.7998, 0.79990137],
            0.1,
        )
        .unwrap();
        assert!(close(dc_gain(&gd).unwrap(), 0.5001, 1e-3));
        let integ = TransferFunction::continuous(&[1.0], &[1.0, 0.0]).unwrap();
        assert_eq!(dc_gain(&integ).unwrap(), f64::INFINITY);
        let zz = TransferFunction::continuous(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(matches!(dc_gain(&zz), Err(Error::IndeterminateDcGain)));
    }

    #[test]
    fn properness() {
        let g = TransferFunction::discrete(&[1.0, 2.0, 1.0], &[1.0, -1.996, 0.996], 1e-5).unwrap();
        assert!(properness_check(&g));
        let improper = TransferFunction::continuous(&[1.0, 0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(!properness_check(&improper));
    }

    #[test]
    fn second_order_character_cases() {
        // open-loop boost: conjugate pair at -200 +/- 979.8j
        let g = TransferFunction::continuous(&[2e6], &[1.0, 400.0, 1e6]).unwrap();
        let soc = second_order_character(&g).unwrap();
        assert!(close(soc.zeta, 0.2, 1e-12));
        assert!(close(soc.omega_n, 1000.0, 1e-12));
        assert_eq!(soc.class, DampingClass::Underdamped);

        // open-loop buck: two real poles
        let g = TransferFunction::continuous(&[4e6], &[1.0, 44444.444444444445, 8e6]).unwrap();
        let soc = second_order_character(&g).unwrap();
        assert!(close(soc.zeta, 7.85674, 1e-5));
        assert!(close(soc.omega_n, 2828.427125, 1e-8));
        assert_eq!(soc.class, DampingClass::Overdamped);

        let first = TransferFunction::continuous(&[1.0], &[1.0, 1.0]).unwrap();
        assert!(matches!(
            second_order_character(&first),
            Err(Error::TooFewPoles(1))
        ));
    }

    #[test]
    fn zpk_round_trip() {
        let g = TransferFunction::continuous(&[2e6], &[1.0, 400.0, 1e6]).unwrap();
        let z = tf_to_zpk(&g).unwrap();
        assert!(z.zeros.is_empty());
        assert_eq!(z.gain, 2e6);
        let back = zpk_to_tf(&z).unwrap();
        for (a, b) in back.den.coeffs().iter().zip(g.den.coeffs()) {
            assert!(close(*a, *b, 1e-8));
        }
        let k = TransferFunction::continuous(&[3.0], &[1.0]).unwrap();
        let z = tf_to_zpk(&k).unwrap();
        assert!(z.zeros.is_empty() && z.poles.is_empty() && z.gain == 3.0);
    }

    #[test]
    fn loop_gain_scales_series() {
        let plant = TransferFunction::continuous(&[2e6], &[1.0, 400.0, 1e6]).unwrap();
        let unity = TransferFunction::constant_gain(1.0, Domain::Continuous);
        let l = loop_gain(&unity, &plant, 1.0, 1.0).unwrap();
        assert_eq!(l.num.coeffs(), plant.num.coeffs());
        let l = loop_gain(&unity, &plant, 0.5, 1.0).unwrap();
        assert_eq!(l.num.coeffs(), &[1e6]);
    }
}
