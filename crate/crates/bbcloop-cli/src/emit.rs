//! CSV and SVG artifact emission. CSV numbers print at full round-trip
//! precision except simulation traces, which use 9 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};

use bbcloop::analysis::{FrequencyPoint, TimeSeries};
use bbcloop::lti::Domain;
use bbcloop::simloop::SimTrace;
use bbcloop::Complex64;

pub fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn write_file(path: &PathBuf, content: &str) -> anyhow::Result<()> {
    fs::write(path, content).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn emit_step_csv(dir: &Path, name: &str, ts: &TimeSeries) -> anyhow::Result<PathBuf> {
    if ts.is_empty() {
        bail!("empty step series: nothing to write");
    }
    let mut s = String::from("t,y\n");
    for (k, v) in ts.values.iter().enumerate() {
        let _ = writeln!(s, "{},{}", ts.time_at(k), v);
    }
    let path = dir.join(format!("{name}.csv"));
    write_file(&path, &s)?;
    Ok(path)
}

pub fn emit_bode_csv(dir: &Path, name: &str, pts: &[FrequencyPoint]) -> anyhow::Result<PathBuf> {
    if pts.is_empty() {
        bail!("empty frequency sweep: nothing to write");
    }
    let mut s = String::from("omega_rad_s,mag_db,phase_deg\n");
    for p in pts {
        let _ = writeln!(s, "{},{},{}", p.omega, p.magnitude_db, p.phase_deg);
    }
    let path = dir.join(format!("{name}.csv"));
    write_file(&path, &s)?;
    Ok(path)
}

pub fn emit_pzmap_csv(
    dir: &Path,
    name: &str,
    poles: &[Complex64],
    zeros: &[Complex64],
) -> anyhow::Result<PathBuf> {
    if poles.is_empty() && zeros.is_empty() {
        bail!("no poles or zeros: nothing to write");
    }
    let mut s = String::from("kind,re,im\n");
    for p in poles {
        let _ = writeln!(s, "pole,{},{}", p.re, p.im);
    }
    for z in zeros {
        let _ = writeln!(s, "zero,{},{}", z.re, z.im);
    }
    let path = dir.join(format!("{name}.csv"));
    write_file(&path, &s)?;
    Ok(path)
}

pub fn emit_trace_csv(dir: &Path, name: &str, trace: &SimTrace) -> anyhow::Result<PathBuf> {
    if trace.is_empty() {
        bail!("empty simulation trace: nothing to write");
    }
    let mut s = String::from("t,i_L,v_C,duty,mode,v_error,v_ea\n");
    for k in 0..trace.len() {
        let _ = writeln!(
            s,
            "{:.8e},{:.8e},{:.8e},{:.8e},{},{:.8e},{:.8e}",
            trace.time_at(k),
            trace.i_l[k],
            trace.v_c[k],
            trace.duty[k],
            trace.mode[k],
            trace.v_error[k],
            trace.v_ea[k],
        );
    }
    let path = dir.join(format!("{name}.csv"));
    write_file(&path, &s)?;
    Ok(path)
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

const W: f64 = 760.0;
const PANEL_H: f64 = 270.0;
const MARGIN: f64 = 55.0;

fn polyline(points: &[(f64, f64)], stroke: &str) -> String {
    let pts: Vec<String> = points
        .iter()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.5\" points=\"{}\"/>",
        pts.join(" ")
    )
}

fn axis_box(y_off: f64, title: &str) -> String {
    format!(
        "<rect x=\"{MARGIN}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\
         <text x=\"{MARGIN}\" y=\"{}\" font-size=\"13\" fill=\"#222\">{title}</text>",
        y_off + 20.0,
        W - 2.0 * MARGIN,
        PANEL_H - 40.0,
        y_off + 14.0
    )
}

/// Two stacked log-frequency panels: magnitude (dB) and phase (deg).
pub fn emit_bode_svg(dir: &Path, name: &str, pts: &[FrequencyPoint]) -> anyhow::Result<PathBuf> {
    if pts.is_empty() {
        bail!("empty frequency sweep: nothing to draw");
    }
    let finite: Vec<&FrequencyPoint> = pts.iter().filter(|p| p.magnitude_db.is_finite()).collect();
    if finite.is_empty() {
        bail!("sweep has no finite magnitudes");
    }
    let (x0, x1) = (finite[0].omega.log10(), finite.last().unwrap().omega.log10());
    let xmap = |w: f64| MARGIN + (w.log10() - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let (mut mlo, mut mhi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut plo, mut phi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &finite {
        mlo = mlo.min(p.magnitude_db);
        mhi = mhi.max(p.magnitude_db);
        plo = plo.min(p.phase_deg);
        phi = phi.max(p.phase_deg);
    }
    let pad = |lo: &mut f64, hi: &mut f64| {
        let span = (*hi - *lo).max(1.0);
        *lo -= 0.05 * span;
        *hi += 0.05 * span;
    };
    pad(&mut mlo, &mut mhi);
    pad(&mut plo, &mut phi);
    let ymap1 = |v: f64| 20.0 + (mhi - v) / (mhi - mlo) * (PANEL_H - 40.0);
    let ymap2 = |v: f64| PANEL_H + 20.0 + (phi - v) / (phi - plo) * (PANEL_H - 40.0);
    let mag: Vec<(f64, f64)> = finite.iter().map(|p| (xmap(p.omega), ymap1(p.magnitude_db))).collect();
    let ph: Vec<(f64, f64)> = finite.iter().map(|p| (xmap(p.omega), ymap2(p.phase_deg))).collect();
    let svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{}\">\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>{}{}{}{}\
         <text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"#222\">log10 omega (rad/s): {:.1} to {:.1}</text>\
         </svg>",
        2.0 * PANEL_H + 10.0,
        axis_box(0.0, &format!("{name}: magnitude (dB)")),
        axis_box(PANEL_H, &format!("{name}: phase (deg)")),
        polyline(&mag, "#0b62a4"),
        polyline(&ph, "#a43b0b"),
        MARGIN,
        2.0 * PANEL_H,
        x0,
        x1,
    );
    let path = dir.join(format!("{name}.svg"));
    write_file(&path, &svg)?;
    Ok(path)
}

/// Pole-zero scatter; discrete maps draw the unit circle.
pub fn emit_pzmap_svg(
    dir: &Path,
    name: &str,
    poles: &[Complex64],
    zeros: &[Complex64],
    domain: Domain,
) -> anyhow::Result<PathBuf> {
    if poles.is_empty() && zeros.is_empty() {
        bail!("no poles or zeros: nothing to draw");
    }
    let size = 560.0;
    let mut extent = 1.2f64;
    for r in poles.iter().chain(zeros) {
        extent = extent.max(r.re.abs().max(r.im.abs()) * 1.15);
    }
    let map = |v: f64| size / 2.0 + v / extent * (size / 2.0 - 20.0);
    let mut body = String::new();
    // axes
    let _ = write!(
        body,
        "<line x1=\"0\" y1=\"{h}\" x2=\"{size}\" y2=\"{h}\" stroke=\"#bbb\"/>\
         <line x1=\"{h}\" y1=\"0\" x2=\"{h}\" y2=\"{size}\" stroke=\"#bbb\"/>",
        h = size / 2.0
    );
    if matches!(domain, Domain::Discrete { .. }) {
        let r = map(1.0) - size / 2.0;
        let _ = write!(
            body,
            "<circle cx=\"{c}\" cy=\"{c}\" r=\"{r:.2}\" fill=\"none\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>",
            c = size / 2.0
        );
    }
    for p in poles {
        let (x, y) = (map(p.re), map(-p.im));
        let _ = write!(
            body,
            "<path d=\"M {x0} {y0} L {x1} {y1} M {x0} {y1} L {x1} {y0}\" stroke=\"#a40b0b\" stroke-width=\"2\"/>",
            x0 = x - 5.0,
            y0 = y - 5.0,
            x1 = x + 5.0,
            y1 = y + 5.0
        );
    }
    for z in zeros {
        let _ = write!(
            body,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\" fill=\"none\" stroke=\"#0b62a4\" stroke-width=\"2\"/>",
            map(z.re),
            map(-z.im)
        );
    }
    let svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\">\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>{body}\
         <text x=\"8\" y=\"16\" font-size=\"13\" fill=\"#222\">{name} (extent ±{extent:.3e})</text>\
         </svg>"
    );
    let path = dir.join(format!("{name}.svg"));
    write_file(&path, &svg)?;
    Ok(path)
}
