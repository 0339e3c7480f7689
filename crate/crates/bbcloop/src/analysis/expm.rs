//! Dense matrix exponential by scaling-and-squaring with Pade approximants
//! (Higham's degree selection), for the small state matrices used in
//! zero-order-hold discretization.

/// Row-major square matrix, sized for state dimensions of a handful.
#[derive(Debug, Clone)]
pub struct SmallMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SmallMatrix {
    pub fn zeros(n: usize) -> Self {
        SmallMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SmallMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &SmallMatrix) -> SmallMatrix {
        let n = self.n;
        let mut out = SmallMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.at(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * other.at(k, j);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &SmallMatrix) -> SmallMatrix {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn scale(&self, k: f64) -> SmallMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= k;
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.at(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Solve self * X = B in place via LU with partial pivoting.
    pub fn solve(&self, b: &SmallMatrix) -> SmallMatrix {
        let n = self.n;
        let mut lu = self.clone();
        let mut x = b.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut piv = col;
            let mut best = lu.at(col, col).abs();
            for r in col + 1..n {
                let v = lu.at(r, col).abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if piv != col {
                for j in 0..n {
                    let tmp = lu.at(col, j);
                    lu.set(col, j, lu.at(piv, j));
                    lu.set(piv, j, tmp);
                }
                perm.swap(col, piv);
            }
            let d = lu.at(col, col);
            for r in col + 1..n {
                let f = lu.at(r, col) / d;
                lu.set(r, col, f);
                for j in col + 1..n {
                    let v = lu.at(r, j) - f * lu.at(col, j);
                    lu.set(r, j, v);
                }
            }
        }
        // apply permutation to rows of B
        let orig = x.clone();
        for (i, &p) in perm.iter().enumerate() {
            for j in 0..n {
                x.set(i, j, orig.at(p, j));
            }
        }
        // forward substitution (unit lower)
        for col in 0..n {
            for r in col + 1..n {
                let f = lu.at(r, col);
                for j in 0..n {
                    let v = x.at(r, j) - f * x.at(col, j);
                    x.set(r, j, v);
                }
            }
        }
        // back substitution
        for col in (0..n).rev() {
            let d = lu.at(col, col);
            for j in 0..n {
                x.set(col, j, x.at(col, j) / d);
            }
            for r in 0..col {
                let f = lu.at(r, col);
                for j in 0..n {
                    let v = x.at(r, j) - f * x.at(col, j);
                    x.set(r, j, v);
                }
            }
        }
        x
    }
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

pub fn expm(a: &SmallMatrix) -> SmallMatrix {
    let norm = a.norm_1();
    let (u, v, squarings) = if norm < 1.495585217958292e-2 {
        let (u, v) = pade_uv_low(a, &PADE3);
        (u, v, 0)
    } else if norm < 2.539398330063230e-1 {
        let (u, v) = pade_uv_low(a, &PADE5);
        (u, v, 0)
    } else if norm < 9.504178996162932e-1 {
        let (u, v) = pade_uv_low(a, &PADE7);
        (u, v, 0)
    } else if norm < 2.097847961257068 {
        let (u, v) = pade_uv_low(a, &PADE9);
        (u, v, 0)
    } else {
        const THETA13: f64 = 5.371920351148152;
        let mut s = ((norm / THETA13).log2().ceil() as i32).max(0);
        let scaled = a.scale(2f64.powi(-s));
        let (u, v) = pade13_uv(&scaled);
        let sq = s;
        s = 0;
        let _ = s;
        (u, v, sq)
    };
    // r = (V - U)^{-1} (V + U)
    let num = v.add(&u);
    let den = v.add(&u.scale(-1.0));
    let mut r = den.solve(&num);
    for _ in 0..squarings {
        r = r.mul(&r);
    }
    r
}

fn pade_uv_low(a: &SmallMatrix, b: &[f64]) -> (SmallMatrix, SmallMatrix) {
    let n = a.n;
    let ident = SmallMatrix::identity(n);
    let a2 = a.mul(a);
    // powers a^2, a^4, ... as needed
    let mut even_terms: Vec<SmallMatrix> = vec![ident.clone(), a2.clone()];
    while 2 * even_terms.len() < b.len() {
        let next = even_terms.last().unwrap().mul(&a2);
        even_terms.push(next);
    }
    let mut u_inner = SmallMatrix::zeros(n);
    let mut v = SmallMatrix::zeros(n);
    for (k, term) in even_terms.iter().enumerate() {
        if 2 * k + 1 < b.len() {
            u_inner = u_inner.add(&term.scale(b[2 * k + 1]));
        }
        if 2 * k < b.len() {
            v = v.add(&term.scale(b[2 * k]));
        }
    }
    (a.mul(&u_inner), v)
}

fn pade13_uv(a: &SmallMatrix) -> (SmallMatrix, SmallMatrix) {
    let n = a.n;
    let ident = SmallMatrix::identity(n);
    let b = &PADE13;
    let a2 = a.mul(a);
    let a4 = a2.mul(&a2);
    let a6 = a4.mul(&a2);
    let u_hi = a6
        .scale(b[13])
        .add(&a4.scale(b[11]))
        .add(&a2.scale(b[9]));
    let u_inner = a6
        .mul(&u_hi)
        .add(&a6.scale(b[7]))
        .add(&a4.scale(b[5]))
        .add(&a2.scale(b[3]))
        .add(&ident.scale(b[1]));
    let u = a.mul(&u_inner);
    let v_hi = a6
        .scale(b[12])
        .add(&a4.scale(b[10]))
        .add(&a2.scale(b[8]));
    let v = a6
        .mul(&v_hi)
        .add(&a6.scale(b[6]))
        .add(&a4.scale(b[4]))
        .add(&a2.scale(b[2]))
        .add(&ident.scale(b[0]));
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_zero_is_identity() {
        let e = expm(&SmallMatrix::zeros(3));
        let ident = SmallMatrix::identity(3);
        for (a, b) in e.data.iter().zip(&ident.data) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn expm_diagonal() {
        let mut m = SmallMatrix::zeros(2);
        m.set(0, 0, 1.0);
        m.set(1, 1, -2.0);
        let e = expm(&m);
        assert!((e.at(0, 0) - 1f64.exp()).abs() < 1e-12);
        assert!((e.at(1, 1) - (-2f64).exp()).abs() < 1e-12);
        assert!(e.at(0, 1).abs() < 1e-14);
    }

    #[test]
    fn expm_rotation_block() {
        // exp([[0, -w],[w, 0]] t) = rotation by w t
        let w = 3.0;
        let mut m = SmallMatrix::zeros(2);
        m.set(0, 1, -w);
        m.set(1, 0, w);
        let e = expm(&m);
        assert!((e.at(0, 0) - w.cos()).abs() < 1e-12);
        assert!((e.at(1, 0) - w.sin()).abs() < 1e-12);
    }

    #[test]
    fn expm_large_norm_uses_squaring() {
        // stiff diagonal needs scaling; compare against exact
        let mut m = SmallMatrix::zeros(2);
        m.set(0, 0, -44444.444444444445 * 2.26e-6);
        m.set(1, 1, -180.73 * 2.26e-6);
        let e = expm(&m);
        assert!((e.at(0, 0) - (m.at(0, 0)).exp()).abs() < 1e-12);
        assert!((e.at(1, 1) - (m.at(1, 1)).exp()).abs() < 1e-12);
    }
}
