//! Trace envelopes: executable versions of the a-priori bounds that drive
//! the well-posedness argument, evaluated tick by tick on a recorded run.
//!
//! Families checked, with every constant built from the initial record and
//! the derived inequality constants:
//!
//! - `nq_growth`: `N_q(f1)(t) + N_q(f2)(t) <= A0 e^{C_G t}` where `A0` is
//!   the initial sum and `C_G = nu~_max (C_iv1(m1) + C_iv1(m2) + C_iv2 +
//!   C_iv3)` absorbs the frequency bounds;
//! - `density_floor`: `n_k(x, t) >= C0_k e^{-(nu~_kk + nu~_kj) t}` with
//!   `C0_k` the smallest initial cell density;
//! - `temperature_floor`: the composition of the density floor, the q = 0
//!   growth bound and the density-temperature constants, for the species
//!   and the mixture temperatures;
//! - `cap`: `T + |u|^2` capped by the tail-moment constants combined with
//!   the `N_q` growth and density floor. Density ratios on the mixture cap
//!   lines come from the recorded per-tick extremes.

use super::{constants, CheckRow, EstimateReport, SLACK};
use crate::error::{KineticError, Result};
use crate::mixture::{MixtureClosure, MixtureParameters, ModelVariant};
use crate::solver::DiagnosticRecord;

/// Worst-tick aggregation of one envelope family: `lhs <= rhs` must hold at
/// every tick; the reported row carries the values at the tightest tick.
fn aggregate<'a>(
    label: &str,
    constant: f64,
    ticks: impl Iterator<Item = (&'a DiagnosticRecord, f64, f64)>,
) -> CheckRow {
    let mut worst: Option<(f64, f64)> = None;
    for (_, lhs, rhs) in ticks {
        let margin = rhs - lhs;
        if worst.map_or(true, |(l, r)| margin < r - l) {
            worst = Some((lhs, rhs));
        }
    }
    let (lhs, rhs) = worst.unwrap_or((0.0, 0.0));
    CheckRow {
        label: label.to_string(),
        lhs,
        rhs,
        constant,
        pass: lhs <= rhs + SLACK,
        margin: rhs - lhs,
    }
}

fn closures_for(
    p: &MixtureParameters,
    first: &DiagnosticRecord,
    d: usize,
) -> Result<[MixtureClosure; 2]> {
    match p.variant {
        ModelVariant::TwoTerm => Ok([p.two_term_closure(0, d), p.two_term_closure(1, d)]),
        ModelVariant::SingleTerm => {
            // Closure coefficients depend on densities; homogeneous runs
            // keep them constant, so the initial mean densities pin them.
            let (n1, n2) = (first.mean_density[0], first.mean_density[1]);
            let freqs = p.collision_frequencies(n1, n2)?;
            Ok([
                p.single_term_closure(0, &freqs, n1, n2)?,
                p.single_term_closure(1, &freqs, n1, n2)?,
            ])
        }
    }
}

/// Growth constant `C_G(q)` of the `N_q` Gronwall bound.
fn growth_constant(
    p: &MixtureParameters,
    closures: &[MixtureClosure; 2],
    d: usize,
    q: f64,
) -> Result<f64> {
    let nu_max = p.nu_tilde.iter().copied().fold(0.0, f64::max);
    let c_iv1 = constants::maxwellian_sup_single(d, p.m1, q)?
        + constants::maxwellian_sup_single(d, p.m2, q)?;
    let c_iv_mix = constants::maxwellian_sup_mixture(&closures[0], d, p.m1, p.m2, q)?
        + constants::maxwellian_sup_mixture(&closures[1], d, p.m1, p.m2, q)?;
    Ok(nu_max * (c_iv1 + c_iv_mix))
}

/// Verifies all envelope families on the trace.
pub fn check_envelopes(
    trace: &[DiagnosticRecord],
    p: &MixtureParameters,
    d: usize,
) -> Result<EstimateReport> {
    let first = trace
        .first()
        .ok_or_else(|| KineticError::Diagnostic("empty trace".to_string()))?;
    let q = first.nq_exponent;
    if trace.iter().any(|r| r.nq_exponent != q) {
        return Err(KineticError::Diagnostic(
            "trace mixes N_q exponents".to_string(),
        ));
    }
    if q <= (d + 2) as f64 {
        return Err(KineticError::Precondition(format!(
            "envelopes need the trace N_q exponent above d + 2 = {}, got {q}",
            d + 2
        )));
    }
    let closures = closures_for(p, first, d)?;
    let dd = d as f64;
    let masses = [p.m1, p.m2];
    // nu~_kk + nu~_kj per species, indexing [nu11, nu12, nu21, nu22].
    let decay = [
        p.nu_tilde[0] + p.nu_tilde[1],
        p.nu_tilde[3] + p.nu_tilde[2],
    ];
    let mut report = EstimateReport::default();

    // N_q growth.
    let c_g = growth_constant(p, &closures, d, q)?;
    let a0 = first.nq[0] + first.nq[1];
    report.rows.push(aggregate(
        "envelope.nq_growth",
        c_g,
        trace
            .iter()
            .map(|r| (r, r.nq[0] + r.nq[1], a0 * (c_g * r.t).exp())),
    ));

    // N_0 growth bound feeds the temperature floors.
    let c_g0 = growth_constant(p, &closures, d, 0.0)?;
    let a0_zero = first.n0[0] + first.n0[1];
    let n0_bound = |t: f64| a0_zero * (c_g0 * t).exp();

    for k in 0..2 {
        let c0 = first.min_density[k];
        let floor = move |t: f64| c0 * (-decay[k] * t).exp();
        report.rows.push(aggregate(
            &format!("envelope.density_floor.species{}", k + 1),
            c0,
            trace.iter().map(|r| (r, floor(r.t), r.min_density[k])),
        ));

        // Temperature floor: T_k >= [n_k / (C_i1 N_0)]^{2/d} composed with
        // the density floor and the N_0 growth bound.
        let c_i1 = constants::density_temperature(d, masses[k]);
        report.rows.push(aggregate(
            &format!("envelope.temperature_floor.species{}", k + 1),
            c_i1,
            trace.iter().map(|r| {
                let b = (floor(r.t) / (c_i1 * n0_bound(r.t))).powf(2.0 / dd);
                (r, b, r.min_temperature[k])
            }),
        ));

        // Mixture temperature floor through T_mix >= t_own T_own.
        let t_own = closures[k].t_coeff[k];
        if t_own <= 0.0 {
            return Err(KineticError::DegenerateConstant(format!(
                "own-temperature coefficient {t_own} degenerates the mixture floor"
            )));
        }
        let c_mix = c_i1 / t_own.powf(dd / 2.0);
        report.rows.push(aggregate(
            &format!("envelope.mix_temperature_floor.target{}", k + 1),
            c_mix,
            trace.iter().map(|r| {
                let b = (floor(r.t) / (c_mix * n0_bound(r.t))).powf(2.0 / dd);
                (r, b, r.min_mix_temperature[k])
            }),
        ));
    }

    // Velocity caps: T + |u|^2 <= [C (N_q bound) / n_floor]^{2/(q-d)}.
    let nq_bound = move |t: f64| a0 * (c_g * t).exp();
    let cap_exp = 2.0 / (q - dd);
    for k in 0..2 {
        let c0 = first.min_density[k];
        let floor = move |t: f64| c0 * (-decay[k] * t).exp();
        let c_ii1 = constants::tail_moment_single(d, masses[k], q)?;
        report.rows.push(aggregate(
            &format!("envelope.cap.species{}", k + 1),
            c_ii1,
            trace.iter().map(|r| {
                let b = (c_ii1 * nq_bound(r.t) / floor(r.t)).powf(cap_exp);
                (r, r.max_cap[k], b)
            }),
        ));

        let c_mix = constants::tail_moment_mixture(&closures[k], d, p.m1, p.m2, q)?;
        let j = 1 - k;
        report.rows.push(aggregate(
            &format!("envelope.mix_cap.target{}", k + 1),
            c_mix,
            trace.iter().map(|r| {
                // Combined norm bounded with the recorded density ratio.
                let ratio = r.max_density[k] / r.min_density[j];
                let b = (c_mix * (1.0 + ratio) * nq_bound(r.t) / floor(r.t)).powf(cap_exp);
                (r, r.max_mix_cap[k], b)
            }),
        ));
    }

    Ok(report)
}
