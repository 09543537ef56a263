//! Minimal SVG renderings of the CSV artifacts. Convenience output only;
//! the CSV/JSON tables are the contract.

use std::path::{Path, PathBuf};

use anyhow::Result;
use num_complex::Complex64;

use nhm_core::analytic::LoopSet;
use nhm_core::topology::SpectralFlow;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 48.0;

struct Frame {
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn around(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
        if !xmin.is_finite() {
            (xmin, xmax, ymin, ymax) = (0.0, 1.0, 0.0, 1.0);
        }
        let padx = 0.05 * (xmax - xmin).max(1e-12);
        let pady = 0.05 * (ymax - ymin).max(1e-12);
        Self {
            xmin: xmin - padx,
            xmax: xmax + padx,
            ymin: ymin - pady,
            ymax: ymax + pady,
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = MARGIN + (x - self.xmin) / (self.xmax - self.xmin) * (W - 2.0 * MARGIN);
        let py = H - MARGIN - (y - self.ymin) / (self.ymax - self.ymin) * (H - 2.0 * MARGIN);
        (px, py)
    }
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"monospace\" font-size=\"14\">{title}</text>\n",
        MARGIN
    )
}

fn circle(f: &Frame, x: f64, y: f64, r: f64, color: &str) -> String {
    let (px, py) = f.map(x, y);
    format!("<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"{r}\" fill=\"{color}\"/>\n")
}

fn polyline(f: &Frame, pts: &[(f64, f64)], color: &str, dashed: bool) -> String {
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y)| {
            let (px, py) = f.map(x, y);
            format!("{px:.2},{py:.2}")
        })
        .collect();
    let dash = if dashed {
        " stroke-dasharray=\"4 3\""
    } else {
        ""
    };
    format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1\"{dash}/>\n",
        coords.join(" ")
    )
}

/// Spectrum scatter plus the analytic curve (solid where branch-valid).
pub fn spectrum_panel(
    dir: &Path,
    tag: &str,
    eigenvalues: &[Complex64],
    loops: &LoopSet,
) -> Result<PathBuf> {
    let pts = eigenvalues
        .iter()
        .map(|e| (e.re, e.im))
        .chain(loops.samples.iter().map(|s| (s.energy.re, s.energy.im)));
    let frame = Frame::around(pts);
    let mut svg = svg_open(&format!("spectrum eps={tag}"));
    // curve segments grouped by validity
    let mut run: Vec<(f64, f64)> = Vec::new();
    let mut run_valid = true;
    for s in &loops.samples {
        let p = (s.energy.re, s.energy.im);
        if run.is_empty() || s.branch_valid == run_valid {
            run_valid = s.branch_valid;
            run.push(p);
        } else {
            svg.push_str(&polyline(
                &frame,
                &run,
                if run_valid { "#d62728" } else { "#aaaaaa" },
                !run_valid,
            ));
            run = vec![p];
            run_valid = s.branch_valid;
        }
    }
    if !run.is_empty() {
        svg.push_str(&polyline(
            &frame,
            &run,
            if run_valid { "#d62728" } else { "#aaaaaa" },
            !run_valid,
        ));
    }
    for e in eigenvalues {
        svg.push_str(&circle(&frame, e.re, e.im, 1.5, "#1f77b4"));
    }
    svg.push_str("</svg>\n");
    let path = dir.join(format!("spectrum_eps{tag}.svg"));
    std::fs::write(&path, svg)?;
    Ok(path)
}

/// Step plot of (w1, w2) against epsilon with the critical couplings.
pub fn winding_steps(
    dir: &Path,
    rows: &[(f64, i64, i64)],
    eps1: f64,
    eps2: f64,
) -> Result<PathBuf> {
    let frame = Frame::around(
        rows.iter()
            .flat_map(|&(e, w1, w2)| [(e, w1 as f64), (e, w2 as f64)]),
    );
    let mut svg = svg_open("winding numbers");
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let w1: Vec<(f64, f64)> = sorted.iter().map(|&(e, w, _)| (e, w as f64)).collect();
    let w2: Vec<(f64, f64)> = sorted.iter().map(|&(e, _, w)| (e, w as f64)).collect();
    svg.push_str(&polyline(&frame, &w1, "#1f77b4", false));
    svg.push_str(&polyline(&frame, &w2, "#d62728", false));
    for eps in [eps1, eps2] {
        let line = [(eps, frame.ymin), (eps, frame.ymax)];
        svg.push_str(&polyline(&frame, &line, "#999999", true));
    }
    svg.push_str("</svg>\n");
    let path = dir.join("winding.svg");
    std::fs::write(&path, svg)?;
    Ok(path)
}

/// Eigenvalue trajectories in the complex plane over the flux sweep.
pub fn rotation_trajectories(dir: &Path, flow: &SpectralFlow) -> Result<PathBuf> {
    let n = flow.levels[0].len();
    let frame = Frame::around(
        flow.levels
            .iter()
            .flat_map(|lv| lv.iter().map(|e| (e.re, e.im))),
    );
    let mut svg = svg_open("spectral rotations");
    for i in 0..n {
        let pts: Vec<(f64, f64)> = flow.trajectory(i).iter().map(|e| (e.re, e.im)).collect();
        svg.push_str(&polyline(&frame, &pts, "#1f77b4", false));
    }
    for e in &flow.levels[0] {
        svg.push_str(&circle(&frame, e.re, e.im, 1.5, "#d62728"));
    }
    svg.push_str("</svg>\n");
    let path = dir.join("rotations.svg");
    std::fs::write(&path, svg)?;
    Ok(path)
}
