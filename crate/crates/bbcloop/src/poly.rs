//! Real-coefficient polynomial arithmetic and complex root finding.
//!
//! Coefficients are stored highest power first. The zero polynomial is the
//! single coefficient `[0.0]`. Roots come from the balanced companion matrix
//! via Francis double-shift QR iteration, followed by a Newton polish on the
//! original coefficients and exact conjugate pairing.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Leading/trailing coefficients at or below this magnitude are treated as
/// structural zeros. Near-cancellations (e.g. a 1e-9 coefficient next to 1e5
/// siblings) are kept: only exact cancellation of stored values produces
/// values this small.
const ZERO_COEFF: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Build from coefficients in descending degree order, trimming leading
    /// structural zeros.
    pub fn new(coeffs: &[f64]) -> Self {
        let mut c: Vec<f64> = coeffs.to_vec();
        while c.len() > 1 && c[0].abs() <= ZERO_COEFF {
            c.remove(0);
        }
        if c.is_empty() {
            c.push(0.0);
        }
        if c.len() == 1 && c[0].abs() <= ZERO_COEFF {
            c[0] = 0.0;
        }
        Polynomial { coeffs: c }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(&[c])
    }

    /// Monomial c * x^k.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut v = vec![0.0; k + 1];
        v[0] = c;
        Polynomial::new(&v)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[0]
    }

    /// Constant term.
    pub fn constant_term(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, &c) in self.coeffs.iter().rev().enumerate() {
            out[n - 1 - i] += c;
        }
        for (i, &c) in other.coeffs.iter().rev().enumerate() {
            out[n - 1 - i] += c;
        }
        Polynomial::new(&out)
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        Polynomial::new(&self.coeffs.iter().map(|c| c * k).collect::<Vec<_>>())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(&out)
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in &self.coeffs {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Derivative polynomial.
    pub fn derivative(&self) -> Polynomial {
        let n = self.degree();
        if n == 0 {
            return Polynomial::zero();
        }
        let d: Vec<f64> = self.coeffs[..n]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * (n - i) as f64)
            .collect();
        Polynomial::new(&d)
    }

    /// Largest coefficient magnitude; the scale used for residual checks.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// All complex roots. Conjugate symmetry is exact for real input.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.degree() == 0 {
            return Err(Error::NoRoots);
        }
        let mut c = self.coeffs.clone();
        let mut roots: Vec<Complex64> = Vec::with_capacity(self.degree());
        // roots at the origin come from exact trailing zeros
        while c.len() > 1 && c.last().copied() == Some(0.0) {
            roots.push(Complex64::new(0.0, 0.0));
            c.pop();
        }
        let deg = c.len() - 1;
        match deg {
            0 => {}
            1 => roots.push(Complex64::new(-c[1] / c[0], 0.0)),
            2 => roots.extend_from_slice(&quadratic_roots(c[0], c[1], c[2])),
            _ => {
                let mut found = companion_eigenvalues(&c)?;
                polish(&self_monic(&c), &mut found);
                roots.extend_from_slice(&found);
            }
        }
        enforce_conjugates(&mut roots);
        Ok(roots)
    }

    /// Real-coefficient polynomial with the given roots and leading gain.
    /// Complex roots must appear in conjugate pairs.
    pub fn from_roots(roots: &[Complex64], gain: f64) -> Result<Polynomial> {
        let mut rs: Vec<Complex64> = roots.to_vec();
        let mut p = Polynomial::constant(gain);
        while let Some(r) = rs.pop() {
            if r.im == 0.0 {
                p = p.mul(&Polynomial::new(&[1.0, -r.re]));
            } else {
                let tol = 1e-9 * (1.0 + r.norm());
                let pos = rs
                    .iter()
                    .position(|s| (s - r.conj()).norm() <= tol)
                    .ok_or_else(|| Error::UnpairedComplexRoot(format!("{r}")))?;
                let s = rs.remove(pos);
                // quadratic factor from the averaged exact-conjugate pair
                let re = 0.5 * (r.re + s.re);
                let im = 0.5 * (r.im - s.im).abs();
                p = p.mul(&Polynomial::new(&[1.0, -2.0 * re, re * re + im * im]));
            }
        }
        Ok(p)
    }
}

fn self_monic(c: &[f64]) -> Polynomial {
    let lead = c[0];
    Polynomial::new(&c.iter().map(|x| x / lead).collect::<Vec<_>>())
}

/// Numerically stable quadratic formula (citardauq for the far root).
fn quadratic_roots(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let (r1, r2) = if q == 0.0 {
            (0.0, 0.0)
        } else {
            (q / a, c / q)
        };
        [Complex64::new(r1, 0.0), Complex64::new(r2, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a).abs();
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

/// Eigenvalues of the balanced companion matrix of a monic-normalized
/// polynomial, via Francis double-shift QR on the Hessenberg form.
fn companion_eigenvalues(c: &[f64]) -> Result<Vec<Complex64>> {
    let lead = c[0];
    let n = c.len() - 1;
    let mut h = vec![0.0; n * n];
    for j in 0..n {
        h[j] = -c[j + 1] / lead;
    }
    for i in 1..n {
        h[i * n + (i - 1)] = 1.0;
    }
    balance(&mut h, n);
    hqr(&mut h, n)
}

/// Osborne balancing (radix-2), standard for eigenvalue preconditioning.
fn balance(a: &mut [f64], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    loop {
        let mut last = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].abs();
                    r += a[i * n + j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                let mut c2 = c;
                while c2 < g {
                    f *= RADIX;
                    c2 *= sqrdx;
                }
                g = r * RADIX;
                while c2 > g {
                    f /= RADIX;
                    c2 /= sqrdx;
                }
                if (c2 + r) / f < 0.95 * s {
                    last = false;
                    let ginv = 1.0 / f;
                    for j in 0..n {
                        a[i * n + j] *= ginv;
                    }
                    for j in 0..n {
                        a[j * n + i] *= f;
                    }
                }
            }
        }
        if last {
            break;
        }
    }
}

/// Francis QR iteration for a real upper Hessenberg matrix, eigenvalues only.
fn hqr(a: &mut [f64], n: usize) -> Result<Vec<Complex64>> {
    let at = |a: &[f64], i: usize, j: usize| a[i * n + j];
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += at(a, i, j).abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            // look for a small subdiagonal element
            let mut l = nn;
            while l >= 1 {
                let s = at(a, (l - 1) as usize, (l - 1) as usize).abs()
                    + at(a, l as usize, l as usize).abs();
                let s = if s == 0.0 { anorm } else { s };
                if at(a, l as usize, (l - 1) as usize).abs() <= f64::EPSILON * s {
                    a[l as usize * n + (l - 1) as usize] = 0.0;
                    break;
                }
                l -= 1;
            }
            let x = at(a, nn as usize, nn as usize);
            if l == nn {
                wr[nn as usize] = x + t;
                wi[nn as usize] = 0.0;
                nn -= 1;
                break;
            }
            let y = at(a, (nn - 1) as usize, (nn - 1) as usize);
            let w = at(a, nn as usize, (nn - 1) as usize) * at(a, (nn - 1) as usize, nn as usize);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let x2 = x + t;
                if q >= 0.0 {
                    let z = p + p.signum() * z;
                    wr[(nn - 1) as usize] = x2 + z;
                    wr[nn as usize] = if z != 0.0 { x2 - w / z } else { x2 + z };
                    wi[(nn - 1) as usize] = 0.0;
                    wi[nn as usize] = 0.0;
                } else {
                    wr[(nn - 1) as usize] = x2 + p;
                    wr[nn as usize] = x2 + p;
                    wi[(nn - 1) as usize] = -z;
                    wi[nn as usize] = z;
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return Err(Error::RootsNotConverged(60));
            }
            let (mut p, mut q, mut r);
            let mut x = x;
            let y;
            let mut w = w;
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for i in 0..=nn as usize {
                    a[i * n + i] -= x;
                }
                let s = at(a, nn as usize, (nn - 1) as usize).abs()
                    + at(a, (nn - 1) as usize, (nn - 2) as usize).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            } else {
                y = at(a, (nn - 1) as usize, (nn - 1) as usize);
            }
            its += 1;
            // form shift and look for 2 consecutive small subdiagonals
            let mut m = nn - 2;
            while m >= l {
                let z = at(a, m as usize, m as usize);
                r = x - z;
                let s = y - z;
                p = (r * s - w) / at(a, (m + 1) as usize, m as usize)
                    + at(a, m as usize, (m + 1) as usize);
                q = at(a, (m + 1) as usize, (m + 1) as usize) - z - r - s;
                r = at(a, (m + 2) as usize, (m + 1) as usize);
                let scale = p.abs() + q.abs() + r.abs();
                p /= scale;
                q /= scale;
                r /= scale;
                if m == l {
                    break;
                }
                let u = at(a, m as usize, (m - 1) as usize).abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (at(a, (m - 1) as usize, (m - 1) as usize).abs()
                        + at(a, m as usize, m as usize).abs()
                        + at(a, (m + 1) as usize, (m + 1) as usize).abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[i as usize * n + (i - 2) as usize] = 0.0;
                if i != m + 2 {
                    a[i as usize * n + (i - 3) as usize] = 0.0;
                }
            }
            // double QR step on rows l..nn, columns m..nn
            let mut k = m;
            while k <= nn - 1 {
                if k != m {
                    p = at(a, k as usize, (k - 1) as usize);
                    q = at(a, (k + 1) as usize, (k - 1) as usize);
                    r = if k != nn - 1 {
                        at(a, (k + 2) as usize, (k - 1) as usize)
                    } else {
                        0.0
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                } else {
                    // p,q,r carried over from the small-subdiagonal search
                    let z = at(a, m as usize, m as usize);
                    let rr = x - z;
                    let s = y - z;
                    p = (rr * s - w) / at(a, (m + 1) as usize, m as usize)
                        + at(a, m as usize, (m + 1) as usize);
                    q = at(a, (m + 1) as usize, (m + 1) as usize) - z - rr - s;
                    r = at(a, (m + 2) as usize, (m + 1) as usize);
                    let scale = p.abs() + q.abs() + r.abs();
                    p /= scale;
                    q /= scale;
                    r /= scale;
                }
                let s = (p * p + q * q + r * r).sqrt() * p.signum();
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k as usize * n + (k - 1) as usize] =
                                -at(a, k as usize, (k - 1) as usize);
                        }
                    } else {
                        a[k as usize * n + (k - 1) as usize] = -s * x;
                    }
                    p += s;
                    let x2 = p / s;
                    let y2 = q / s;
                    let z2 = r / s;
                    q /= p;
                    r /= p;
                    for j in k as usize..=nn as usize {
                        let mut pp = at(a, k as usize, j) + q * at(a, (k + 1) as usize, j);
                        if k != nn - 1 {
                            pp += r * at(a, (k + 2) as usize, j);
                            a[(k + 2) as usize * n + j] -= pp * z2;
                        }
                        a[(k + 1) as usize * n + j] -= pp * y2;
                        a[k as usize * n + j] -= pp * x2;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l as usize..=mmin as usize {
                        let mut pp =
                            x2 * at(a, i, k as usize) + y2 * at(a, i, (k + 1) as usize);
                        if k != nn - 1 {
                            pp += z2 * at(a, i, (k + 2) as usize);
                            a[i * n + (k + 2) as usize] -= pp * r;
                        }
                        a[i * n + (k + 1) as usize] -= pp * q;
                        a[i * n + k as usize] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex64::new(re, im))
        .collect())
}

/// Newton refinement against the original (monic) coefficients. Real roots
/// stay real; complex pairs are polished once and mirrored exactly.
fn polish(p: &Polynomial, roots: &mut [Complex64]) {
    let dp = p.derivative();
    let mut i = 0;
    while i < roots.len() {
        let r = roots[i];
        if r.im == 0.0 {
            let mut x = r.re;
            let mut best = p.eval_real(x).abs();
            for _ in 0..12 {
                let f = p.eval_real(x);
                let d = dp.eval_real(x);
                if d == 0.0 {
                    break;
                }
                let xn = x - f / d;
                let fn_ = p.eval_real(xn).abs();
                if !xn.is_finite() || fn_ >= best {
                    break;
                }
                x = xn;
                best = fn_;
            }
            roots[i] = Complex64::new(x, 0.0);
            i += 1;
        } else {
            let mut x = r;
            let mut best = p.eval(x).norm();
            for _ in 0..12 {
                let f = p.eval(x);
                let d = dp.eval(x);
                if d.norm() == 0.0 {
                    break;
                }
                let xn = x - f / d;
                let fn_ = p.eval(xn).norm();
                if !xn.re.is_finite() || !xn.im.is_finite() || fn_ >= best {
                    break;
                }
                x = xn;
                best = fn_;
            }
            roots[i] = x;
            // the QR output pairs conjugates adjacently
            if i + 1 < roots.len() && (roots[i + 1] - r.conj()).norm() <= 1e-6 * (1.0 + r.norm()) {
                roots[i + 1] = x.conj();
                i += 2;
            } else {
                i += 1;
            }
        }
    }
}

/// Pair complex roots with their nearest conjugates and average so the set is
/// exactly conjugate-closed (real quadratic factors print cleanly).
fn enforce_conjugates(roots: &mut [Complex64]) {
    let n = roots.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || roots[i].im == 0.0 {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if j == i || used[j] || roots[j].im == 0.0 {
                continue;
            }
            let d = (roots[j] - roots[i].conj()).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        if let Some((j, d)) = best {
            if d <= 1e-6 * (1.0 + roots[i].norm()) {
                let re = 0.5 * (roots[i].re + roots[j].re);
                let im = 0.5 * (roots[i].im - roots[j].im).abs();
                let sign = roots[i].im.signum();
                roots[i] = Complex64::new(re, sign * im);
                roots[j] = Complex64::new(re, -sign * im);
                used[i] = true;
                used[j] = true;
            }
        }
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.degree();
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 && n > 0 {
                continue;
            }
            let pow = n - i;
            if first {
                write!(f, "{c:.6}")?;
                first = false;
            } else if c < 0.0 {
                write!(f, " - {:.6}", -c)?;
            } else {
                write!(f, " + {c:.6}")?;
            }
            match pow {
                0 => {}
                1 => write!(f, "·x")?,
                _ => write!(f, "·x^{pow}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        let scale = 1.0f64.max(b.abs());
        assert!(
            (a - b).abs() <= tol * scale,
            "expected {b}, got {a} (tol {tol})"
        );
    }

    #[test]
    fn add_identity_and_cancellation() {
        let p = Polynomial::new(&[1.0, 400.0, 1e6]);
        assert_eq!(p.add(&Polynomial::zero()).coeffs(), p.coeffs());
        let s = Polynomial::new(&[1.0, 0.0]);
        let neg = Polynomial::new(&[-1.0, 0.0]);
        assert!(s.add(&neg).is_zero());
        // closed-loop denominator of the boost plant under pure 0.5 feedback
        let sum = p.add(&Polynomial::constant(2e6).scale(0.5));
        assert_eq!(sum.coeffs(), &[1.0, 400.0, 2e6]);
    }

    #[test]
    fn mul_expands_factored_forms() {
        let sq = Polynomial::new(&[1.0, 1.0]).mul(&Polynomial::new(&[1.0, 1.0]));
        assert_eq!(sq.coeffs(), &[1.0, 2.0, 1.0]);
        let p = Polynomial::new(&[1.0, 824.5]).mul(&Polynomial::new(&[1.0, 309.0]));
        assert_close(p.coeffs()[1], 1133.5, 1e-12);
        assert_close(p.coeffs()[2], 254770.5, 1e-12);
        assert!(p.mul(&Polynomial::zero()).is_zero());
    }

    #[test]
    fn eval_points() {
        let p = Polynomial::new(&[1.0, 400.0, 1e6]);
        assert_eq!(p.eval(Complex64::new(0.0, 0.0)), Complex64::new(1e6, 0.0));
        let v = p.eval(Complex64::new(0.0, 1000.0));
        assert_close(v.re, 0.0, 1e-10);
        assert_close(v.im, 4e5, 1e-12);
        // rounded discretized boost denominator is ~0 at z = 1
        let q = Polynomial::new(&[1.0, -1.996, 0.996]);
        assert!(q.eval(Complex64::new(1.0, 0.0)).norm() <= 1e-3);
    }

    #[test]
    fn roots_of_paper_polynomials() {
        let p = Polynomial::new(&[1.0, 400.0, 1e6]);
        let mut r = p.roots().unwrap();
        r.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert_close(r[0].re, -200.0, 1e-12);
        assert_close(r[0].im, -979.795897113271, 1e-12);
        assert_eq!(r[0].conj(), r[1]);

        let stiff = Polynomial::new(&[1.0, 44444.444444444445, 8e6]);
        let mut r = stiff.roots().unwrap();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert_close(r[0].re, -44263.709479071, 1e-9);
        assert_close(r[1].re, -180.734965373449, 1e-9);

        let dbl = Polynomial::new(&[1.0, 2.0, 1.0]);
        let r = dbl.roots().unwrap();
        for root in r {
            assert_close(root.re, -1.0, 1e-6);
        }
    }

    #[test]
    fn roots_error_paths() {
        assert!(matches!(
            Polynomial::zero().roots(),
            Err(Error::ZeroPolynomial)
        ));
        assert!(matches!(
            Polynomial::constant(3.0).roots(),
            Err(Error::NoRoots)
        ));
    }

    #[test]
    fn from_roots_round_trip() {
        let p = Polynomial::from_roots(
            &[Complex64::new(-1.0, 0.0), Complex64::new(-1.0, 0.0)],
            1.0,
        )
        .unwrap();
        assert_eq!(p.coeffs(), &[1.0, 2.0, 1.0]);

        let pair = [
            Complex64::new(-200.0, 979.796),
            Complex64::new(-200.0, -979.796),
        ];
        let p = Polynomial::from_roots(&pair, 1.0).unwrap();
        assert_close(p.coeffs()[1], 400.0, 1e-12);
        assert_close(p.coeffs()[2], 1e6, 1e-3);

        let p = Polynomial::from_roots(
            &[Complex64::new(-309.1, 0.0), Complex64::new(-824.1, 0.0)],
            6947.0,
        )
        .unwrap();
        assert_close(p.coeffs()[0], 6947.0, 1e-12);
        assert_close(p.coeffs()[1], 6947.0 * 1133.2, 1e-12);
        assert_close(p.coeffs()[2], 6947.0 * 309.1 * 824.1, 1e-12);

        assert!(Polynomial::from_roots(&[Complex64::new(0.0, 1.0)], 1.0).is_err());
    }

    #[test]
    fn near_cancelling_coefficient_is_kept() {
        // buck filtered-derivative numerator: s^2 coefficient ~3.8e-9 next to ~7e5
        let kp = 3.13926397775873;
        let kd = -0.00403350179228654;
        let n = 778.297404;
        let p = Polynomial::new(&[kp + kd * n, kp * n + 921.175630246025, 921.175630246025 * n]);
        assert_eq!(p.degree(), 2);
        assert!(p.coeffs()[0] > 3e-9 && p.coeffs()[0] < 4e-9);
    }

    #[test]
    fn root_residuals_and_round_trip_on_reference_set() {
        let cases: Vec<Polynomial> = vec![
            Polynomial::new(&[1.0, 400.0, 1e6]),
            Polynomial::new(&[1.0, 44444.444444444445, 8e6]),
            Polynomial::new(&[6946.865780219034, 7874199.838197537, 1769833902.122903]),
            Polynomial::new(&[
                3.7927683216310015e-9,
                3364.4566346063584,
                716948.6016485451,
            ]),
            Polynomial::new(&[1.0, 17031.07, 0.0]),
            // 4th-order closed-loop style denominator
            Polynomial::new(&[1.0, 45222.7, 4.2593e7, 6.5214e11, 1.3764e14]),
        ];
        for p in cases {
            let roots = p.roots().unwrap();
            for r in &roots {
                let residual = p.eval(*r).norm() / p.max_coeff();
                assert!(
                    residual <= 1e-9,
                    "residual {residual} too large for root {r} of {p}"
                );
            }
            let back = Polynomial::from_roots(&roots, p.leading()).unwrap();
            for (a, b) in back.coeffs().iter().zip(p.coeffs()) {
                assert_close(*a, *b, 1e-8);
            }
        }
    }
}
