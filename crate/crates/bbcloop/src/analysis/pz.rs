//! Pole-zero extraction and stability classification.
//!
//! Continuous systems are judged by the real parts of their poles, discrete
//! systems by pole magnitudes against the unit circle. Boundary and exterior
//! roots of either kind are listed as offenders so a non-minimum-phase zero
//! is visible even when the poles alone look fine.

use num_complex::Complex64;

use crate::error::Result;
use crate::lti::{Domain, TransferFunction};

/// Distance from the stability boundary below which a root counts as ON it.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    Stable,
    MarginallyStable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    Pole,
    Zero,
}

#[derive(Debug, Clone, Copy)]
pub struct Offender {
    pub kind: RootKind,
    pub value: Complex64,
    /// true when on the boundary (within tolerance), false when outside.
    pub on_boundary: bool,
}

#[derive(Debug, Clone)]
pub struct PoleZeroReport {
    pub poles: Vec<Complex64>,
    pub zeros: Vec<Complex64>,
    pub classification: StabilityClass,
    pub offenders: Vec<Offender>,
    pub domain: Domain,
}

fn margin_of(domain: &Domain, r: Complex64) -> f64 {
    // positive inside the stable region, negative outside
    match domain {
        Domain::Continuous => -r.re,
        Domain::Discrete { .. } => 1.0 - r.norm(),
    }
}

pub fn pole_zero_report(g: &TransferFunction) -> Result<PoleZeroReport> {
    let poles = g.poles()?;
    let zeros = g.zeros()?;
    let mut offenders = Vec::new();
    let mut any_outside_pole = false;
    let mut any_boundary_pole = false;
    for &p in &poles {
        let m = margin_of(&g.domain, p);
        if m.abs() <= BOUNDARY_TOL {
            any_boundary_pole = true;
            offenders.push(Offender {
                kind: RootKind::Pole,
                value: p,
                on_boundary: true,
            });
        } else if m < 0.0 {
            any_outside_pole = true;
            offenders.push(Offender {
                kind: RootKind::Pole,
                value: p,
                on_boundary: false,
            });
        }
    }
    for &z in &zeros {
        let m = margin_of(&g.domain, z);
        if m.abs() <= BOUNDARY_TOL {
            offenders.push(Offender {
                kind: RootKind::Zero,
                value: z,
                on_boundary: true,
            });
        } else if m < 0.0 {
            offenders.push(Offender {
                kind: RootKind::Zero,
                value: z,
                on_boundary: false,
            });
        }
    }
    let classification = if any_outside_pole {
        StabilityClass::Unstable
    } else if any_boundary_pole {
        StabilityClass::MarginallyStable
    } else {
        StabilityClass::Stable
    };
    Ok(PoleZeroReport {
        poles,
        zeros,
        classification,
        offenders,
        domain: g.domain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::{zpk_to_tf, ZpkForm};

    #[test]
    fn continuous_stable() {
        let g = TransferFunction::continuous(&[2e6], &[1.0, 400.0, 1e6]).unwrap();
        let r = pole_zero_report(&g).unwrap();
        assert_eq!(r.classification, StabilityClass::Stable);
        assert!(r.offenders.is_empty());
    }

    #[test]
    fn rhp_pole_is_unstable() {
        let g = TransferFunction::continuous(&[1.0], &[1.0, -1.0]).unwrap();
        let r = pole_zero_report(&g).unwrap();
        assert_eq!(r.classification, StabilityClass::Unstable);
        assert_eq!(r.offenders.len(), 1);
        assert!((r.offenders[0].value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn printed_buck_digital_pid_form_is_marginal_with_exterior_zero() {
        // factored form as printed in the reference: zero at -1.041 outside
        // the unit circle, pole exactly on it at -1
        let z = ZpkForm {
            zeros: vec![
                Complex64::new(-0.8381, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(-1.041, 0.0),
            ],
            poles: vec![
                Complex64::new(-0.8791, 0.0),
                Complex64::new(-0.9112, 0.0),
                Complex64::new(-0.9985, 0.0),
                Complex64::new(-1.0, 0.0),
            ],
            gain: 0.95672,
            domain: Domain::Discrete { sample_time: 0.1 },
        };
        let g = zpk_to_tf(&z).unwrap();
        let r = pole_zero_report(&g).unwrap();
        assert_eq!(r.classification, StabilityClass::MarginallyStable);
        let exterior_zero = r
            .offenders
            .iter()
            .find(|o| o.kind == RootKind::Zero && !o.on_boundary && o.value.norm() > 1.02)
            .expect("zero outside the unit circle");
        assert!((exterior_zero.value.re + 1.041).abs() < 1e-6);
        assert!(r
            .offenders
            .iter()
            .any(|o| o.kind == RootKind::Pole && o.on_boundary));
    }

    #[test]
    fn integrator_is_marginal() {
        let g = TransferFunction::continuous(&[1.0], &[1.0, 0.0]).unwrap();
        let r = pole_zero_report(&g).unwrap();
        assert_eq!(r.classification, StabilityClass::MarginallyStable);
    }
}
