//! Rendering of the reference-characterization report: console tables at
//! four significant figures, full-precision CSV summary, and the per-scenario
//! artifact files.

use std::fmt::Write as _;
use std::path::Path;

use bbcloop::analysis::{
    frequency_response, log_grid, pole_zero_report, step_response, StabilityClass,
};
use bbcloop::lti::{format_sig, tustin_discretize, Domain};
use bbcloop::reference::{
    analog_closed_loop, digital_closed_loop, plant_tf, reference_report, ControllerChoice,
    Section, Tol,
};
use bbcloop::plant::OperatingMode;

use crate::emit;

fn fmt4(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v.is_nan() {
        return "nan".into();
    }
    format_sig(v, 4)
}

fn tol_str(t: &Tol) -> String {
    match t {
        Tol::Rel(v) => format!("rel {v:.0e}"),
        Tol::Abs(v) => format!("abs {v:.0e}"),
        Tol::MatchInf => "inf".into(),
        Tol::Bool => "flag".into(),
    }
}

pub fn render_console(sections: &[Section]) -> String {
    let mut out = String::new();
    let mut total = 0usize;
    let mut failed = 0usize;
    for s in sections {
        let _ = writeln!(out, "\n== [{}] {} (criterion {})", s.id, s.title, s.criterion);
        let _ = writeln!(
            out,
            "{:<44} {:>12} {:>12} {:>10} {:>9}  {}",
            "check", "reference", "computed", "delta", "tol", "verdict"
        );
        for c in &s.checks {
            total += 1;
            let ok = c.pass();
            if !ok {
                failed += 1;
            }
            let delta = if c.expected.is_infinite() || matches!(c.tol, Tol::Bool) {
                "-".to_string()
            } else {
                format!("{:.2e}", c.rel_delta())
            };
            let _ = writeln!(
                out,
                "{:<44} {:>12} {:>12} {:>10} {:>9}  {}",
                c.key,
                fmt4(c.expected),
                fmt4(c.actual),
                delta,
                tol_str(&c.tol),
                if ok { "ok" } else { "FAIL" }
            );
            if let Some(n) = &c.note {
                let _ = writeln!(out, "    note: {n}");
            }
        }
    }
    let _ = writeln!(
        out,
        "\n{} checks, {} failed{}",
        total,
        failed,
        if failed == 0 { " — reference characterization reproduced" } else { "" }
    );
    out
}

pub fn write_summary_csv(dir: &Path, sections: &[Section]) -> anyhow::Result<()> {
    let mut s = String::from("section,criterion,key,reference,computed,rel_delta,tolerance,verdict,note\n");
    for sec in sections {
        for c in &sec.checks {
            let note = c.note.as_deref().unwrap_or("").replace(',', ";");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                sec.id,
                sec.criterion,
                c.key,
                c.expected,
                c.actual,
                c.rel_delta(),
                tol_str(&c.tol).replace(' ', "_"),
                if c.pass() { "ok" } else { "fail" },
                note
            );
        }
    }
    std::fs::write(dir.join("summary.csv"), s)?;
    Ok(())
}

/// Emit the step / bode / pole-zero artifacts behind the reference figures.
pub fn write_artifacts(dir: &Path) -> anyhow::Result<()> {
    use ControllerChoice::*;
    use OperatingMode::*;
    let analog: Vec<(&str, ControllerChoice, OperatingMode, f64)> = vec![
        ("boost_open", None, Boost, 0.06),
        ("boost_pid", Pid, Boost, 0.06),
        ("boost_pidn", Pidn, Boost, 0.06),
        ("buck_open", None, Buck, 0.06),
        ("buck_pid", Pid, Buck, 0.02),
        ("buck_pidn", Pidn, Buck, 0.04),
    ];
    for (name, choice, mode, horizon) in &analog {
        let h = bbcloop::reference::script_feedback_gain(*mode, *choice, false);
        let tf = match choice {
            None => plant_tf(*mode)?,
            _ => analog_closed_loop(*mode, *choice, h)?,
        };
        let ts = step_response(&tf, *horizon)?;
        emit::emit_step_csv(dir, &format!("step_{name}"), &ts)?;
        let grid = log_grid(1.0, 1e5, 400);
        let sweep = frequency_response(&tf, &grid)?;
        emit::emit_bode_csv(dir, &format!("bode_{name}"), &sweep)?;
        let pz = pole_zero_report(&tf)?;
        emit::emit_pzmap_csv(dir, &format!("pzmap_{name}"), &pz.poles, &pz.zeros)?;
    }
    // digital counterparts at the sample times that reproduce the record
    let digital: Vec<(&str, ControllerChoice, OperatingMode, f64, f64)> = vec![
        ("boost_digital_open", None, Boost, 1e-5, 1.0),
        ("boost_digital_pid", Pid, Boost, 1e-5, 1.0),
        ("boost_digital_pidn", Pidn, Boost, 1e-5, 0.5),
        ("buck_digital_open", None, Buck, 0.1, 1.0),
        ("buck_digital_pid", Pid, Buck, 0.1, 1.0),
        ("buck_digital_pidn", Pidn, Buck, 0.1, 1.0),
    ];
    for (name, choice, mode, ts, h) in &digital {
        let tf = match choice {
            None => tustin_discretize(&plant_tf(*mode)?, *ts)?,
            _ => digital_closed_loop(*mode, *choice, *ts, *h)?,
        };
        let pz = pole_zero_report(&tf)?;
        emit::emit_pzmap_csv(dir, &format!("pzmap_{name}"), &pz.poles, &pz.zeros)?;
        emit::emit_pzmap_svg(
            dir,
            &format!("pzmap_{name}"),
            &pz.poles,
            &pz.zeros,
            Domain::Discrete { sample_time: *ts },
        )?;
    }
    Ok(())
}

pub fn classification_str(c: StabilityClass) -> &'static str {
    match c {
        StabilityClass::Stable => "stable",
        StabilityClass::MarginallyStable => "marginally stable",
        StabilityClass::Unstable => "unstable",
    }
}

/// Full report run. Returns the number of failed checks.
pub fn run_report(dir: &Path, emit_files: bool) -> anyhow::Result<usize> {
    let sections = reference_report().map_err(|e| anyhow::anyhow!("report computation: {e}"))?;
    print!("{}", render_console(&sections));
    if emit_files {
        emit::ensure_dir(dir)?;
        write_summary_csv(dir, &sections)?;
        write_artifacts(dir)?;
        println!("artifacts written to {}", dir.display());
    }
    Ok(sections
        .iter()
        .flat_map(|s| &s.checks)
        .filter(|c| !c.pass())
        .count())
}
