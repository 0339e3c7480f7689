//! Averaged models of the bidirectional buck-boost power stage.
//!
//! Both operating modes reduce to two states: inductor current and the
//! active-side capacitor voltage. The linear state-space matrices come from
//! the duty-averaged equations at the nominal operating point; the nonlinear
//! derivative function keeps the duty input live for time simulation.

use crate::error::{Error, Result};
use crate::lti::StateSpaceModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatingMode {
    Boost,
    Buck,
}

impl std::fmt::Display for OperatingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OperatingMode::Boost => write!(f, "boost"),
            OperatingMode::Buck => write!(f, "buck"),
        }
    }
}

/// Physical converter parameters. Defaults reproduce the reference design
/// ratings (24 V bus, 12 V battery, 20 kHz switching).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverterParams {
    pub v_bus: f64,
    pub i_bus: f64,
    pub v_batt: f64,
    pub f_sw: f64,
    pub v_o: f64,
    pub i_o: f64,
    pub duty: f64,
    pub inductance: f64,
    pub c_bus: f64,
    pub r_load: f64,
    pub c_o: f64,
    pub cells_series: u32,
    pub cells_parallel: u32,
    pub r_inter: f64,
}

impl Default for ConverterParams {
    fn default() -> Self {
        ConverterParams {
            v_bus: 24.0,
            i_bus: 3.0,
            v_batt: 12.0,
            f_sw: 20e3,
            v_o: 24.0,
            i_o: 2.4,
            duty: 0.5,
            inductance: 1000e-6,
            c_bus: 250e-6,
            r_load: 10.0,
            c_o: 125e-6,
            cells_series: 6,
            cells_parallel: 1,
            r_inter: 30e-3,
        }
    }
}

impl ConverterParams {
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("v_bus", self.v_bus),
            ("i_bus", self.i_bus),
            ("v_batt", self.v_batt),
            ("f_sw", self.f_sw),
            ("v_o", self.v_o),
            ("i_o", self.i_o),
            ("inductance", self.inductance),
            ("c_bus", self.c_bus),
            ("r_load", self.r_load),
            ("c_o", self.c_o),
            ("r_inter", self.r_inter),
        ];
        for (name, v) in positives {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.duty > 0.0 && self.duty < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "duty must lie in (0, 1), got {}",
                self.duty
            )));
        }
        if self.cells_series == 0 || self.cells_parallel == 0 {
            return Err(Error::InvalidParameter("cell counts must be >= 1".into()));
        }
        Ok(())
    }

    /// Battery series resistance: (Ns/Np) * per-cell resistance.
    pub fn r_batt(&self) -> f64 {
        (self.cells_series as f64 / self.cells_parallel as f64) * self.r_inter
    }
}

/// Boost-mode averaged state-space model. States: inductor current, bus
/// capacitor voltage. Input: battery voltage. Output: the voltage state.
pub fn boost_state_space(p: &ConverterParams) -> Result<StateSpaceModel> {
    p.validate()?;
    let d = p.duty;
    let l = p.inductance;
    StateSpaceModel::new(
        vec![
            vec![0.0, -(1.0 - d) / l],
            vec![(1.0 - d) / p.c_bus, -1.0 / (p.r_load * p.c_bus)],
        ],
        vec![vec![1.0 / l], vec![0.0]],
        vec![vec![0.0, 1.0]],
        vec![vec![0.0]],
    )
}

/// Buck-mode averaged state-space model. States: inductor current, battery-
/// side capacitor voltage. Input: bus voltage. Output: the voltage state.
pub fn buck_state_space(p: &ConverterParams) -> Result<StateSpaceModel> {
    p.validate()?;
    let l = p.inductance;
    let rb = p.r_batt();
    StateSpaceModel::new(
        vec![
            vec![0.0, -1.0 / l],
            vec![1.0 / p.c_o, -1.0 / (rb * p.c_o)],
        ],
        vec![vec![p.duty / l], vec![0.0]],
        vec![vec![0.0, 1.0]],
        vec![vec![0.0]],
    )
}

pub fn state_space(p: &ConverterParams, mode: OperatingMode) -> Result<StateSpaceModel> {
    match mode {
        OperatingMode::Boost => boost_state_space(p),
        OperatingMode::Buck => buck_state_space(p),
    }
}

/// Averaged large-signal derivatives with the duty cycle as a live input.
///
/// boost: di/dt = (V_batt - (1-d) v_C)/L,  dv/dt = ((1-d) i_L - v_C/R)/C_bus
/// buck:  di/dt = (d V_bus - v_C)/L,       dv/dt = (i_L - v_C/R_batt)/C_o
pub fn nonlinear_derivatives(
    p: &ConverterParams,
    mode: OperatingMode,
    state: (f64, f64),
    duty_input: f64,
) -> (f64, f64) {
    let (i_l, v_c) = state;
    match mode {
        OperatingMode::Boost => (
            (p.v_batt - (1.0 - duty_input) * v_c) / p.inductance,
            ((1.0 - duty_input) * i_l - v_c / p.r_load) / p.c_bus,
        ),
        OperatingMode::Buck => (
            (duty_input * p.v_bus - v_c) / p.inductance,
            (i_l - v_c / p.r_batt()) / p.c_o,
        ),
    }
}

/// Equilibrium state for a fixed duty cycle.
pub fn equilibrium(p: &ConverterParams, mode: OperatingMode, duty: f64) -> (f64, f64) {
    match mode {
        OperatingMode::Boost => {
            let v = p.v_batt / (1.0 - duty);
            (v / (p.r_load * (1.0 - duty)), v)
        }
        OperatingMode::Buck => {
            let v = duty * p.v_bus;
            (v / p.r_batt(), v)
        }
    }
}

/// Finite-difference Jacobian of the averaged derivatives with respect to the
/// state, at the given state and duty.
pub fn state_jacobian_fd(
    p: &ConverterParams,
    mode: OperatingMode,
    state: (f64, f64),
    duty: f64,
) -> [[f64; 2]; 2] {
    let mut jac = [[0.0; 2]; 2];
    for col in 0..2 {
        let base = if col == 0 { state.0 } else { state.1 };
        let h = 1e-6 * base.abs().max(1.0);
        let plus = if col == 0 {
            (state.0 + h, state.1)
        } else {
            (state.0, state.1 + h)
        };
        let minus = if col == 0 {
            (state.0 - h, state.1)
        } else {
            (state.0, state.1 - h)
        };
        let fp = nonlinear_derivatives(p, mode, plus, duty);
        let fm = nonlinear_derivatives(p, mode, minus, duty);
        jac[0][col] = (fp.0 - fm.0) / (2.0 * h);
        jac[1][col] = (fp.1 - fm.1) / (2.0 * h);
    }
    jac
}

/// Finite-difference sensitivity of the derivatives to the duty input.
pub fn duty_sensitivity_fd(
    p: &ConverterParams,
    mode: OperatingMode,
    state: (f64, f64),
    duty: f64,
) -> (f64, f64) {
    let h = 1e-7;
    let fp = nonlinear_derivatives(p, mode, state, duty + h);
    let fm = nonlinear_derivatives(p, mode, state, duty - h);
    ((fp.0 - fm.0) / (2.0 * h), (fp.1 - fm.1) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::ss_to_tf;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1.0)
    }

    #[test]
    fn default_params_match_reference_ratings() {
        let p = ConverterParams::default();
        p.validate().unwrap();
        assert!(close(p.r_batt(), 0.18, 1e-12));
    }

    #[test]
    fn boost_matrices() {
        let ss = boost_state_space(&ConverterParams::default()).unwrap();
        assert_eq!(ss.a, vec![vec![0.0, -500.0], vec![2000.0, -400.0]]);
        assert_eq!(ss.b, vec![vec![1000.0], vec![0.0]]);
        let tf = ss_to_tf(&ss, 0, 0).unwrap();
        assert_eq!(tf.num.coeffs(), &[2e6]);
        assert_eq!(tf.den.coeffs(), &[1.0, 400.0, 1e6]);
    }

    #[test]
    fn boost_duty_one_decouples_inductor() {
        let p = ConverterParams {
            duty: 1.0 - 1e-12,
            ..Default::default()
        };
        let ss = boost_state_space(&p).unwrap();
        assert!(ss.a[0][1].abs() < 1e-6);
        assert!(ss.a[1][0].abs() < 1e-6);
    }

    #[test]
    fn buck_matrices() {
        let ss = buck_state_space(&ConverterParams::default()).unwrap();
        assert_eq!(ss.a[0], vec![0.0, -1000.0]);
        assert!(close(ss.a[1][0], 8000.0, 1e-12));
        assert!(close(-ss.a[1][1], 44444.444444444445, 1e-12));
        assert_eq!(ss.b, vec![vec![500.0], vec![0.0]]);
        let tf = ss_to_tf(&ss, 0, 0).unwrap();
        assert_eq!(tf.num.coeffs(), &[4e6]);
        assert!(close(tf.den.coeffs()[1], 44444.444444444445, 1e-12));
        assert!(close(tf.den.coeffs()[2], 8e6, 1e-12));
    }

    #[test]
    fn buck_zero_duty_kills_drive() {
        let p = ConverterParams::default();
        let (di, _) = nonlinear_derivatives(&p, OperatingMode::Buck, (0.0, 0.0), 0.0);
        assert_eq!(di, 0.0);
    }

    #[test]
    fn boost_equilibrium_derivatives_vanish() {
        let p = ConverterParams::default();
        let (i_eq, v_eq) = equilibrium(&p, OperatingMode::Boost, 0.5);
        assert!(close(i_eq, 4.8, 1e-12));
        assert!(close(v_eq, 24.0, 1e-12));
        let (di, dv) = nonlinear_derivatives(&p, OperatingMode::Boost, (i_eq, v_eq), 0.5);
        assert!(di.abs() < 1e-9 && dv.abs() < 1e-9);
    }

    #[test]
    fn boost_dc_identity_across_duties() {
        let p = ConverterParams::default();
        for d in [0.3, 0.5, 0.7] {
            let (_, v_eq) = equilibrium(&p, OperatingMode::Boost, d);
            assert!(close(v_eq, p.v_batt / (1.0 - d), 1e-12));
            let (di, dv) = nonlinear_derivatives(
                &p,
                OperatingMode::Boost,
                equilibrium(&p, OperatingMode::Boost, d),
                d,
            );
            assert!(di.abs() < 1e-9 && dv.abs() < 1e-9);
        }
    }

    #[test]
    fn jacobian_matches_linear_a_matrix() {
        let p = ConverterParams::default();
        for mode in [OperatingMode::Boost, OperatingMode::Buck] {
            let ss = state_space(&p, mode).unwrap();
            let x_eq = equilibrium(&p, mode, p.duty);
            let jac = state_jacobian_fd(&p, mode, x_eq, p.duty);
            for i in 0..2 {
                for j in 0..2 {
                    let scale = ss.a[i][j].abs().max(1.0);
                    assert!(
                        (jac[i][j] - ss.a[i][j]).abs() <= 1e-6 * scale,
                        "{mode} A[{i}][{j}]: fd {} vs {}",
                        jac[i][j],
                        ss.a[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn inductance_scaling_property() {
        let p = ConverterParams::default();
        let doubled = ConverterParams {
            inductance: 2.0 * p.inductance,
            ..p
        };
        let a = boost_state_space(&p).unwrap();
        let b = boost_state_space(&doubled).unwrap();
        assert!(close(b.a[0][1], a.a[0][1] / 2.0, 1e-12));
        assert!(close(b.b[0][0], a.b[0][0] / 2.0, 1e-12));
    }

    #[test]
    fn invalid_params_rejected() {
        let p = ConverterParams {
            duty: 1.2,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = ConverterParams {
            r_load: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
