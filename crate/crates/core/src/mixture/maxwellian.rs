//! Maxwellian evaluation on the velocity lattice, with an optional
//! moment-matching correction.
//!
//! Sampling the analytic Maxwellian on a truncated lattice does not
//! reproduce `(n, u, T)` exactly. [`conservative_sample`] Newton-solves for
//! discrete parameters `(n~, u~, T~)` whose *lattice* moments match the
//! requested ones, which is what makes the relaxation step conserve mass,
//! momentum and energy to rounding.

use crate::error::{KineticError, Result};
use crate::grid::{Neumaier, PhaseGrid};
use crate::vecn::Vec3;

/// Target moments of a Maxwellian: `M(v) = n (m/(2 pi T))^{d/2}
/// exp(-m |v-u|^2 / (2 T))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxwellTarget {
    pub density: f64,
    pub velocity: Vec3,
    pub temperature: f64,
    pub mass: f64,
}

/// Parameters of the corrected discrete Maxwellian actually sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectedParams {
    pub density: f64,
    pub velocity: Vec3,
    pub temperature: f64,
}

impl From<&MaxwellTarget> for CorrectedParams {
    fn from(t: &MaxwellTarget) -> Self {
        CorrectedParams {
            density: t.density,
            velocity: t.velocity,
            temperature: t.temperature,
        }
    }
}

/// Pointwise analytic value at velocity `v`.
pub fn evaluate(v: &Vec3, target: &MaxwellTarget, d: usize) -> f64 {
    let dv = [
        v[0] - target.velocity[0],
        v[1] - target.velocity[1],
        v[2] - target.velocity[2],
    ];
    let r2 = dv[0] * dv[0] + dv[1] * dv[1] + dv[2] * dv[2];
    let theta = target.temperature / target.mass;
    let norm = (2.0 * std::f64::consts::PI * theta).powf(d as f64 / 2.0);
    target.density / norm * (-0.5 * r2 / theta).exp()
}

/// Samples the analytic Maxwellian into `out` (one cell's worth of nodes).
pub fn sample_into(grid: &PhaseGrid, target: &MaxwellTarget, out: &mut [f64]) {
    debug_assert_eq!(out.len(), grid.n_nodes());
    if target.density == 0.0 {
        out.fill(0.0);
        return;
    }
    let d = grid.velocity_dim();
    let theta = target.temperature / target.mass;
    let norm = target.density / (2.0 * std::f64::consts::PI * theta).powf(d as f64 / 2.0);
    let inv2theta = 0.5 / theta;
    let u = target.velocity;
    for (val, v) in out.iter_mut().zip(grid.nodes()) {
        let dx = v[0] - u[0];
        let dy = v[1] - u[1];
        let dz = v[2] - u[2];
        *val = norm * (-(dx * dx + dy * dy + dz * dz) * inv2theta).exp();
    }
}

/// Validates a Maxwellian request: zero density is fine (zero field),
/// positive density demands positive temperature.
pub fn validate_target(target: &MaxwellTarget) -> Result<()> {
    if target.density < 0.0 {
        return Err(KineticError::Admissibility(format!(
            "Maxwellian density {} < 0",
            target.density
        )));
    }
    if target.density > 0.0 && target.temperature <= 0.0 {
        return Err(KineticError::DegenerateTemperature {
            temperature: target.temperature,
            density: target.density,
        });
    }
    Ok(())
}

/// Lattice moments of the values in `out`: `(mass, momentum, ∫|v-u_ref|^2)`.
/// `u_ref` is the reference velocity for the centered second moment.
fn lattice_moments(grid: &PhaseGrid, vals: &[f64], u_ref: &Vec3) -> (f64, Vec3, f64) {
    let w = grid.weights()[0];
    let mut m0 = Neumaier::default();
    let mut m1 = [Neumaier::default(); 3];
    let mut c2 = Neumaier::default();
    for (val, v) in vals.iter().zip(grid.nodes()) {
        let wv = w * val;
        m0.add(wv);
        m1[0].add(wv * v[0]);
        m1[1].add(wv * v[1]);
        m1[2].add(wv * v[2]);
        let dx = v[0] - u_ref[0];
        let dy = v[1] - u_ref[1];
        let dz = v[2] - u_ref[2];
        c2.add(wv * (dx * dx + dy * dy + dz * dz));
    }
    (
        m0.value(),
        [m1[0].value(), m1[1].value(), m1[2].value()],
        c2.value(),
    )
}

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 30;

/// Samples a discrete Maxwellian whose lattice moments equal the target
/// `(n, u, T)` to `1e-13` relative, by damped Newton on the `d + 2`
/// parameters. Returns the corrected parameters for warm-starting the next
/// call.
pub fn conservative_sample(
    grid: &PhaseGrid,
    target: &MaxwellTarget,
    warm: Option<CorrectedParams>,
    out: &mut [f64],
) -> Result<CorrectedParams> {
    validate_target(target)?;
    if target.density == 0.0 {
        out.fill(0.0);
        return Ok(CorrectedParams::from(target));
    }

    let d = grid.velocity_dim();
    let n_unknowns = d + 2;
    let mut params = warm.unwrap_or_else(|| CorrectedParams::from(target));
    if !(params.density > 0.0) || !(params.temperature > 0.0) {
        params = CorrectedParams::from(target);
    }

    // Scales for the relative residual: (n, n * vth per component, n * T/m).
    let vth = (target.temperature / target.mass).sqrt();
    let mut scale = [target.density; 5];
    for s in scale.iter_mut().take(1 + d).skip(1) {
        *s = target.density * vth.max(1e-300);
    }
    scale[1 + d] = target.density * target.temperature / target.mass;

    // Target raw moments: mass, momentum, centered second moment about the
    // *target* velocity: ∫|v-u|^2 M = d n T / m.
    let target_c2 = d as f64 * target.density * target.temperature / target.mass;

    for iter in 0..=NEWTON_MAX_ITER {
        let trial = MaxwellTarget {
            density: params.density,
            velocity: params.velocity,
            temperature: params.temperature,
            mass: target.mass,
        };
        sample_into(grid, &trial, out);
        let (m0, m1, c2) = lattice_moments(grid, out, &target.velocity);

        let mut residual = [0.0; 5];
        residual[0] = m0 - target.density;
        for a in 0..d {
            residual[1 + a] = m1[a] - target.density * target.velocity[a];
        }
        residual[1 + d] = c2 - target_c2;

        let worst = (0..n_unknowns)
            .map(|i| (residual[i] / scale[i]).abs())
            .fold(0.0, f64::max);
        if worst <= NEWTON_TOL {
            return Ok(params);
        }
        if iter == NEWTON_MAX_ITER {
            break;
        }

        // Jacobian of the lattice moments w.r.t. (n~, u~_0..d-1, T~).
        // dM/dn~ = M/n~, dM/du~_a = M m (v_a - u~_a)/T~,
        // dM/dT~ = M (m |v-u~|^2 / (2 T~^2) - d/(2 T~)).
        // Plain sums are enough here: the Jacobian only steers Newton, the
        // convergence test runs on the compensated residual.
        let mut jac = [[0.0_f64; 5]; 5];
        {
            let w = grid.weights()[0];
            let inv_n = 1.0 / params.density;
            let m_over_t = target.mass / params.temperature;
            let half_inv_t = 0.5 / params.temperature;
            for (val, v) in out.iter().zip(grid.nodes()) {
                let wv = w * val;
                let du = [
                    v[0] - params.velocity[0],
                    v[1] - params.velocity[1],
                    v[2] - params.velocity[2],
                ];
                let r2 = du[0] * du[0] + du[1] * du[1] + du[2] * du[2];
                let dvt = [
                    v[0] - target.velocity[0],
                    v[1] - target.velocity[1],
                    v[2] - target.velocity[2],
                ];
                let rt2 = dvt[0] * dvt[0] + dvt[1] * dvt[1] + dvt[2] * dvt[2];
                // Derivative weights per unknown.
                let mut dw = [0.0_f64; 5];
                dw[0] = inv_n;
                for a in 0..d {
                    dw[1 + a] = m_over_t * du[a];
                }
                dw[1 + d] = half_inv_t * (m_over_t * r2 - d as f64);
                // Moment rows: mass, momentum components, centered second.
                for (col, &dwc) in dw.iter().enumerate().take(n_unknowns) {
                    let g = wv * dwc;
                    jac[0][col] += g;
                    for a in 0..d {
                        jac[1 + a][col] += g * v[a];
                    }
                    jac[1 + d][col] += g * rt2;
                }
            }
        }

        let mut rhs = [0.0_f64; 5];
        for i in 0..n_unknowns {
            rhs[i] = -residual[i];
        }
        solve_dense(&mut jac, &mut rhs, n_unknowns).map_err(|e| {
            KineticError::CorrectionFailed(format!("singular moment Jacobian: {e}"))
        })?;

        // Damped update: keep n~ and T~ positive.
        let mut step = 1.0;
        loop {
            let nd = params.density + step * rhs[0];
            let td = params.temperature + step * rhs[1 + d];
            if nd > 0.0 && td > 0.0 {
                params.density = nd;
                for a in 0..d {
                    params.velocity[a] += step * rhs[1 + a];
                }
                params.temperature = td;
                break;
            }
            step *= 0.5;
            if step < 1e-8 {
                return Err(KineticError::CorrectionFailed(
                    "damping underflow while keeping parameters positive".to_string(),
                ));
            }
        }
    }

    Err(KineticError::CorrectionFailed(format!(
        "no convergence to {NEWTON_TOL:e} within {NEWTON_MAX_ITER} iterations \
         (target n={}, T={}, v_max may be too small)",
        target.density, target.temperature
    )))
}

/// Gaussian elimination with partial pivoting on an `n x n` system stored in
/// fixed 5x5 buffers. Solution lands in `b`.
fn solve_dense(a: &mut [[f64; 5]; 5], b: &mut [f64; 5], n: usize) -> std::result::Result<(), String> {
    for k in 0..n {
        let mut piv = k;
        for r in k + 1..n {
            if a[r][k].abs() > a[piv][k].abs() {
                piv = r;
            }
        }
        if a[piv][k].abs() < 1e-300 {
            return Err(format!("pivot {k} is zero"));
        }
        if piv != k {
            a.swap(piv, k);
            b.swap(piv, k);
        }
        for r in k + 1..n {
            let factor = a[r][k] / a[k][k];
            if factor == 0.0 {
                continue;
            }
            for c in k..n {
                a[r][c] -= factor * a[k][c];
            }
            b[r] -= factor * b[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = b[k];
        for c in k + 1..n {
            s -= a[k][c] * b[c];
        }
        b[k] = s / a[k][k];
    }
    Ok(())
}
