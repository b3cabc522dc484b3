//! Explicit sufficient constants for the moment / sup-norm estimates.
//!
//! The theory states the inequalities with unspecified constants `C`, `C_q`,
//! `A`. Each function here replays the corresponding proof's split-integral
//! or power-mean argument and returns a concrete constant that makes the
//! inequality hold for every nonnegative integrable distribution. The
//! derivations trade tightness for validity, so the constants are large;
//! the point is that they are *sufficient* and computable.
//!
//! Notation: `d` velocity dimension, `m` particle mass, `omega_d` unit-ball
//! volume, `s_d = d omega_d` unit-sphere area, `N_q(f) = sup |v|^q f`.

use crate::error::{KineticError, Result};
use crate::mixture::MixtureClosure;

pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => panic!("velocity dimension {d} out of range"),
    }
}

pub fn unit_sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

/// `n / T^{d/2} <= C N_0(f)` with `C = 2 omega_d (2d/m)^{d/2}`.
///
/// Split `n` at radius `R` around `u`: inside, `f <= N_0` on a ball of
/// volume `omega_d R^d`; outside, Chebyshev with the second moment gives
/// `d n T / (m R^2)`. `R^2 = 2 d T / m` balances the halves.
pub fn density_temperature(d: usize, m: f64) -> f64 {
    2.0 * unit_ball_volume(d) * (2.0 * d as f64 / m).powf(d as f64 / 2.0)
}

/// `n (T + |u|^2)^{(q-d)/2} <= C N_q(f)` for `q > d + 2`.
///
/// Split the second moment at `R`, bound the tail by
/// `N_q s_d R^{d+2-q}/(q-d-2)`, choose `R^{d-q} = n / N_q`, and convert
/// `T <= max(m/d, 1)(d T / m)`.
pub fn tail_moment_single(d: usize, m: f64, q: f64) -> Result<f64> {
    let dd = d as f64;
    if q <= dd + 2.0 {
        return Err(KineticError::Precondition(format!(
            "tail-moment bound needs q > d + 2, got q = {q}, d = {d}"
        )));
    }
    let base = (m / dd).max(1.0) * (1.0 + unit_sphere_area(d) / (q - dd - 2.0));
    Ok(base.powf((q - dd) / 2.0))
}

/// `n T^{(q-d)/2} <= C N_q(f)` for `q < d` or `q > d + 2`.
///
/// For `q < d`: at least half the mass sits in the Chebyshev ball
/// `B(u, sqrt(2dT/m))`, where `f <= N_q |v|^{-q}`; a rearrangement bound on
/// the ball integral gives `C = 2 s_d/(d-q) (2d/m)^{(d-q)/2}`.
/// For `q > d + 2` it follows from the tail-moment bound with
/// `T = (m/d)(dT/m)`.
/// No derivation is provided for `q` in `[d, d+2]`.
pub fn density_t_power(d: usize, m: f64, q: f64) -> Result<f64> {
    let dd = d as f64;
    if q < dd {
        Ok(2.0 * unit_sphere_area(d) / (dd - q) * (2.0 * dd / m).powf((dd - q) / 2.0))
    } else if q > dd + 2.0 {
        let base = (m / dd) * (1.0 + unit_sphere_area(d) / (q - dd - 2.0));
        Ok(base.powf((q - dd) / 2.0))
    } else {
        Err(KineticError::DegenerateConstant(format!(
            "no derived n T^((q-d)/2) constant for q = {q} in [d, d+2] = [{d}, {}]",
            d + 2
        )))
    }
}

/// Constant of the Chebyshev-ball bound `n |u|^q <= C N_q T^{d/2}`, valid
/// whenever `|u|^2 >= 8 d T / m`: half the mass sits in `B(u, r)` with
/// `r^2 = 2dT/m <= |u|^2/4`, where `|v| >= |u|/2` and `f <= N_q (|u|/2)^{-q}`.
fn chebyshev_ball(d: usize, m: f64, q: f64) -> f64 {
    2.0_f64.powf(q + 1.0) * unit_ball_volume(d) * (2.0 * d as f64 / m).powf(d as f64 / 2.0)
}

/// `n |u|^q / T^{d/2} <= C N_q(f)` for `q > d + 2` (or `q < d`), by the
/// two-case split on `|u|^2` vs `8 d T / m`.
pub fn speed_moment_over_t(d: usize, m: f64, q: f64) -> Result<f64> {
    let small_u = (8.0 * d as f64 / m).powf(q / 2.0) * density_t_power(d, m, q)?;
    Ok(chebyshev_ball(d, m, q).max(small_u))
}

/// Constant of (iii.1):
/// `n |u|^{d+q} / [(T + |u|^2) T]^{d/2} <= C N_q(f)`.
///
/// Same two-case split; the large-`|u|` branch absorbs
/// `|u|^d <= (T + |u|^2)^{d/2}`, the small one leaves `n T^{(q-d)/2}`,
/// so the derivation covers `q < d` and `q > d + 2` only.
pub fn velocity_ratio_single(d: usize, m: f64, q: f64) -> Result<f64> {
    if q <= 1.0 {
        return Err(KineticError::Precondition(format!(
            "velocity-ratio bound needs q > 1, got {q}"
        )));
    }
    let dd = d as f64;
    let small_u = (8.0 * dd / m).powf((dd + q) / 2.0) * density_t_power(d, m, q)?;
    Ok(chebyshev_ball(d, m, q).max(small_u))
}

/// The paper-style mixture coefficients
/// `A_own = max(t_own, u_own^2 + d w2 + |u_own u_other - d w2|)` and its
/// `other` twin, for any closure whose velocity and temperature are affine
/// combinations with coefficients summing to one.
pub fn mixture_a_coefficients(closure: &MixtureClosure, d: usize) -> (f64, f64) {
    let dd = d as f64;
    let (uc, tc, w2) = (closure.u_coeff, closure.t_coeff, closure.w2_coeff);
    let cross = (uc[0] * uc[1] - dd * w2).abs();
    let a1 = tc[0].max(uc[0] * uc[0] + dd * w2 + cross);
    let a2 = tc[1].max(uc[1] * uc[1] + dd * w2 + cross);
    (a1, a2)
}

/// Constant of (ii.2)/(ii.3):
/// `n_k (T_mix + |u_mix|^2)^{(q-d)/2} <= C_q (N_q(f_k) + (n_k/n_j) N_q(f_j))`
/// with `C_q = [s_d/(q-d-2) + B_1 + B_2]^{(q-d)/2} max(B_1, B_2)`,
/// `B_i = A_i max(m_i, 1)`.
pub fn tail_moment_mixture(
    closure: &MixtureClosure,
    d: usize,
    m1: f64,
    m2: f64,
    q: f64,
) -> Result<f64> {
    let dd = d as f64;
    if q <= dd + 2.0 {
        return Err(KineticError::Precondition(format!(
            "mixture tail-moment bound needs q > d + 2, got q = {q}, d = {d}"
        )));
    }
    let (a1, a2) = mixture_a_coefficients(closure, d);
    let b1 = a1 * m1.max(1.0);
    let b2 = a2 * m2.max(1.0);
    let base = unit_sphere_area(d) / (q - dd - 2.0) + b1 + b2;
    Ok(base.powf((q - dd) / 2.0) * b1.max(b2))
}

/// Lemma constant for `|c_1 u_1 + c_2 u_2|^q <= A (|u_1|^q + |u_2|^q)`:
/// `A = max(1, (|c_1| + |c_2|)^q)`.
pub fn combination_velocity(u_coeff: [f64; 2], q: f64) -> f64 {
    (u_coeff[0].abs() + u_coeff[1].abs()).powf(q).max(1.0)
}

/// Lemma constant for
/// `(t_1 T_1 + t_2 T_2 + w |u_1-u_2|^2)^q <= A (T_1^q + T_2^q + |u_1-u_2|^{2q})`:
/// `A = 3^{max(q-1, 0)} max(t_1, t_2, w)^q` by the power-mean inequality.
pub fn combination_temperature(t_coeff: [f64; 2], w2_coeff: f64, q: f64) -> f64 {
    let m = t_coeff[0].abs().max(t_coeff[1].abs()).max(w2_coeff.abs());
    3.0_f64.powf((q - 1.0).max(0.0)) * m.powf(q)
}

/// Constant of (iii.2)/(iii.3):
/// `n_k |u_mix|^q / T_mix^{d/2} <= C n_k (|u_1|^q/T_1^{d/2} + |u_2|^q/T_2^{d/2})`
/// with `C = A_vel max(t_1^{-d/2}, t_2^{-d/2})`. Degenerates when a
/// temperature coefficient vanishes.
pub fn velocity_ratio_mixture(closure: &MixtureClosure, d: usize, q: f64) -> Result<f64> {
    let (t1, t2) = (closure.t_coeff[0], closure.t_coeff[1]);
    if t1 <= 0.0 || t2 <= 0.0 {
        return Err(KineticError::DegenerateConstant(format!(
            "temperature coefficients ({t1}, {t2}) degenerate the mixture \
             velocity-ratio bound"
        )));
    }
    let half_d = d as f64 / 2.0;
    let a = combination_velocity(closure.u_coeff, q);
    Ok(a * t1.powf(-half_d).max(t2.powf(-half_d)))
}

/// Constant of (iv.1): `sup |v|^q M[f] <= C_q N_q(f)` for `q > d + 2`, and
/// for `q = 0` via the density-temperature bound.
///
/// For `q >= 1` split `|v|^q <= 2^{q-1}(|v-u|^q + |u|^q)`; the shifted sup
/// has the closed form `(qT/m)^{q/2} e^{-q/2} n (m/(2 pi T))^{d/2}`.
pub fn maxwellian_sup_single(d: usize, m: f64, q: f64) -> Result<f64> {
    let dd = d as f64;
    let gauss_norm = (m / (2.0 * std::f64::consts::PI)).powf(dd / 2.0);
    if q == 0.0 {
        return Ok(gauss_norm * density_temperature(d, m));
    }
    if q <= dd + 2.0 {
        return Err(KineticError::Precondition(format!(
            "Maxwellian sup bound needs q > d + 2 or q = 0, got q = {q}, d = {d}"
        )));
    }
    let shifted = (q / m).powf(q / 2.0) * (-q / 2.0).exp() * density_t_power(d, m, q)?;
    let drift = speed_moment_over_t(d, m, q)?;
    Ok(2.0_f64.powf(q - 1.0) * gauss_norm * (shifted + drift))
}

/// Constant of (iv.2)/(iv.3):
/// `sup |v|^q M_mix[f_1, f_2] <= C_q (N_q(f_k) + (n_k/n_j) N_q(f_j))`,
/// composed by chaining the mixture tail-moment and velocity-ratio
/// constants with the per-species drift bounds.
pub fn maxwellian_sup_mixture(
    closure: &MixtureClosure,
    d: usize,
    m1: f64,
    m2: f64,
    q: f64,
) -> Result<f64> {
    let dd = d as f64;
    let m_mix = closure.mass;
    let gauss_norm = (m_mix / (2.0 * std::f64::consts::PI)).powf(dd / 2.0);
    if q == 0.0 {
        // sup M_mix = n_k / (2 pi T_mix / m_mix)^{d/2} with
        // T_mix >= t_own T_own.
        let t_own = closure.t_coeff[closure.species];
        if t_own <= 0.0 {
            return Err(KineticError::DegenerateConstant(format!(
                "own-temperature coefficient {t_own} degenerates the q = 0 sup bound"
            )));
        }
        let m_own = if closure.species == 0 { m1 } else { m2 };
        return Ok(gauss_norm * density_temperature(d, m_own) / t_own.powf(dd / 2.0));
    }
    if q <= dd + 2.0 {
        return Err(KineticError::Precondition(format!(
            "Maxwellian sup bound needs q > d + 2 or q = 0, got q = {q}, d = {d}"
        )));
    }
    let tail = tail_moment_mixture(closure, d, m1, m2, q)?;
    let ratio = velocity_ratio_mixture(closure, d, q)?;
    let drift = speed_moment_over_t(d, m1, q)?.max(speed_moment_over_t(d, m2, q)?);
    let shifted = (q / m_mix).powf(q / 2.0) * (-q / 2.0).exp() * tail;
    Ok(2.0_f64.powf(q - 1.0) * gauss_norm * (shifted + ratio * drift))
}
