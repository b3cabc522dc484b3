//! CSV diagnostics, printed with 17 significant digits so identical runs
//! produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use bgkmix::estimates::suite::SampleReport;
use bgkmix::macroscopic::TwoFluidState;
use bgkmix::solver::DiagnosticRecord;

use crate::CliError;

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

const AXES: [&str; 3] = ["x", "y", "z"];

/// Header of the kinetic/macroscopic diagnostics schema for dimension `d`.
pub fn diagnostics_header(d: usize) -> String {
    let mut h = String::from("t,n1,n2");
    for k in 1..=2 {
        for axis in &AXES[..d] {
            let _ = write!(h, ",u{k}{axis}");
        }
    }
    h.push_str(",T1,T2");
    for axis in &AXES[..d] {
        let _ = write!(h, ",p_total{axis}");
    }
    h.push_str(",E_total,entropy,min_f1,min_f2,clipped_mass");
    h
}

/// Serializes a kinetic diagnostics series.
pub fn diagnostics_csv(records: &[DiagnosticRecord], d: usize) -> String {
    let mut out = diagnostics_header(d);
    out.push('\n');
    for r in records {
        let mut row = vec![fmt(r.t), fmt(r.mean_density[0]), fmt(r.mean_density[1])];
        for k in 0..2 {
            for a in 0..d {
                row.push(fmt(r.bulk_velocity[k][a]));
            }
        }
        row.push(fmt(r.mean_temperature[0]));
        row.push(fmt(r.mean_temperature[1]));
        for a in 0..d {
            row.push(fmt(r.total_momentum[a]));
        }
        row.push(fmt(r.total_energy));
        row.push(fmt(r.entropy));
        row.push(fmt(r.min_f[0]));
        row.push(fmt(r.min_f[1]));
        row.push(fmt(r.clipped_mass));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Serializes a two-fluid trajectory into the same schema; the
/// phase-space-only columns (entropy, min f, clipped mass) hold NaN.
pub fn two_fluid_csv(trajectory: &[(f64, TwoFluidState)], masses: [f64; 2]) -> String {
    let d = 3;
    let mut out = diagnostics_header(d);
    out.push('\n');
    for (t, s) in trajectory {
        let mut row = vec![fmt(*t), fmt(s.density[0]), fmt(s.density[1])];
        for k in 0..2 {
            for a in 0..d {
                row.push(fmt(s.velocity[k][a]));
            }
        }
        row.push(fmt(s.temperature(0, masses[0])));
        row.push(fmt(s.temperature(1, masses[1])));
        for a in 0..d {
            let p: f64 = (0..2)
                .map(|k| masses[k] * s.density[k] * s.velocity[k][a])
                .sum();
            row.push(fmt(p));
        }
        let e: f64 = (0..2)
            .map(|k| masses[k] * s.density[k] * s.energy[k])
            .sum();
        row.push(fmt(e));
        for _ in 0..4 {
            row.push(fmt(f64::NAN));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Serializes estimate-suite outcomes, one inequality per row.
pub fn estimates_csv(outcomes: &[SampleReport]) -> String {
    let mut out = String::from("sample,seed,label,lhs,rhs,constant,pass,margin\n");
    for o in outcomes {
        for r in &o.report.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                o.sample,
                o.seed,
                r.label,
                fmt(r.lhs),
                fmt(r.rhs),
                fmt(r.constant),
                r.pass,
                fmt(r.margin)
            );
        }
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
