use std::fmt::Write as _;

use super::{LinearizationReport, Stability, Termination, Trajectory};
use crate::geometry::{Container, ReferenceCurve};

pub const CSV_HEADER: &str = "t,perimeter,area,residual,ball_radius,eta,xgamma_norm";

/// One row per recorded time; `{:?}` keeps full precision so reruns are byte-identical.
pub fn trajectory_csv<S>(traj: &Trajectory<S>) -> String {
    let c = &traj.channels;
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for i in 0..traj.times.len() {
        writeln!(
            out,
            "{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            traj.times[i], c.perimeter[i], c.area[i], c.residual[i], c.ball_radius[i], c.eta[i], c.xgamma_norm[i]
        )
        .unwrap();
    }
    out
}

/// Closed polyline through the nodes, with the container drawn as a circle.
pub fn curve_svg(curve: &ReferenceCurve, container: &Container) -> String {
    let r = container.radius();
    let c = container.center();
    let mut pts = String::new();
    for p in curve.points().iter().chain(curve.points().first()) {
        // SVG y grows downwards.
        write!(pts, "{:.6},{:.6} ", p.x, -p.y).unwrap();
    }
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">\n\
         <circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"none\" stroke=\"gray\" stroke-width=\"{:.6}\"/>\n\
         <polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{:.6}\"/>\n</svg>\n",
        c.x - 1.05 * r,
        -c.y - 1.05 * r,
        2.1 * r,
        2.1 * r,
        c.x,
        -c.y,
        r,
        0.005 * r,
        pts.trim_end(),
        0.005 * r
    )
}

pub fn linearization_text(rep: &LinearizationReport) -> String {
    let mut out = String::new();
    writeln!(out, "# linearization").unwrap();
    writeln!(out, "modes {}", rep.modes).unwrap();
    writeln!(out, "dimension {}", rep.matrix.nrows()).unwrap();
    writeln!(out, "norm {:.10e}", rep.norm).unwrap();
    writeln!(out, "kernel_dimension {}", rep.kernel_dimension).unwrap();
    let names = ["1", "cos", "sin"];
    for (name, r) in names.iter().zip(rep.kernel_residuals) {
        writeln!(out, "kernel_residual {name} {:.6e}", r / rep.norm).unwrap();
    }
    writeln!(out, "leakage {:.6e}", rep.leakage()).unwrap();
    match &rep.stability {
        Stability::NormallyStable => writeln!(out, "verdict normally-stable").unwrap(),
        Stability::NotNormallyStable(why) => writeln!(out, "verdict not-normally-stable ({why})").unwrap(),
    }
    writeln!(out, "\n# mode rate").unwrap();
    for k in 0..=rep.modes {
        writeln!(out, "{k} {:.10e}", rep.mode_rate(k)).unwrap();
    }
    writeln!(out, "\n# eigenvalues (re im)").unwrap();
    for z in &rep.eigenvalues {
        writeln!(out, "{:.10e} {:.10e}", z.re, z.im).unwrap();
    }
    out
}

pub fn termination_text(term: &Termination) -> String {
    match term {
        Termination::HorizonReached => "horizon-reached".into(),
        Termination::ResidualReached => "residual-reached".into(),
        Termination::Breakdown { time, cause } => format!("breakdown at t = {time:.6e}: {cause}"),
    }
}
