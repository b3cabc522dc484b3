//! Bridge to the six-field two-fluid relaxation system: kinetic exchange
//! terms, the interface-velocity function in the energy sources, the
//! parameter correspondence, and a space-homogeneous integrator.
//!
//! Everything here is three-dimensional: the exchange-term coefficients
//! carry the space dimension 3 explicitly.
//!
//! Specific energies follow `m_k n_k E_k = 1/2 m_k n_k |u_k|^2 +
//! 3/2 n_k T_k`, which makes the kinetic second moment agree with the
//! macroscopic energy.
//!
//! Sign convention: the interface velocity is implemented as
//! `U = 1/2 [(u1+u2).w / |w|^2] w  -  c w  +  V_perp`, `w = u1 - u2`. With
//! the *minus* on `c`, the formula
//! `gamma(c) = 1/3 m1 (1-delta) delta + 2/3 m1 (1-delta) c`, the `c` range
//! and the symmetric `c` form one consistent chain, and the energy sources
//! reproduce the kinetic exchange term identically.

use crate::error::{KineticError, Result};
use crate::mixture::MixtureParameters;
use crate::moments::SpeciesMoments;
use crate::vecn::{self, Vec3};

/// Six-field state `(n_1, n_2, u_1, u_2, E_1, E_2)` of the homogeneous
/// relaxation system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoFluidState {
    pub density: [f64; 2],
    pub velocity: [Vec3; 2],
    /// Specific total energies `E_k`.
    pub energy: [f64; 2],
}

impl TwoFluidState {
    /// Builds the state from primitive `(n, u, T)` per species.
    pub fn from_primitives(
        density: [f64; 2],
        velocity: [Vec3; 2],
        temperature: [f64; 2],
        masses: [f64; 2],
    ) -> Self {
        let energy = [
            0.5 * vecn::norm2(&velocity[0]) + 1.5 * temperature[0] / masses[0],
            0.5 * vecn::norm2(&velocity[1]) + 1.5 * temperature[1] / masses[1],
        ];
        TwoFluidState {
            density,
            velocity,
            energy,
        }
    }

    /// Temperature of species `k`: `T_k = (2/3) m_k (E_k - |u_k|^2 / 2)`.
    pub fn temperature(&self, k: usize, mass: f64) -> f64 {
        2.0 / 3.0 * mass * (self.energy[k] - 0.5 * vecn::norm2(&self.velocity[k]))
    }
}

/// Relaxation parameters of the two-fluid system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeParameters {
    pub lambda_u: f64,
    pub lambda_t: f64,
    pub c: f64,
}

/// Momentum and energy exchange terms of species 1,
/// `F_m = m1 nu12 n1 n2 (1 - delta)(u2 - u1)` and the energy counterpart,
/// evaluated from the kinetic closure at the given moments.
pub fn exchange_terms(
    p: &MixtureParameters,
    mom1: &SpeciesMoments,
    mom2: &SpeciesMoments,
) -> Result<(Vec3, f64)> {
    let (n1, n2) = (mom1.density, mom2.density);
    let nu12 = p.nu12(n1, n2)?;
    let coupling = nu12 * n1 * n2;
    let w = vecn::sub(&mom1.velocity, &mom2.velocity); // u1 - u2
    let f_m = vecn::scale(&w, -p.m1 * coupling * (1.0 - p.delta));

    // Velocity bracket dotted with (u1 - u2), plus the thermal channel
    // towards the other species' temperature.
    let drift = vecn::add_scaled(
        &vecn::add(&mom1.velocity, &mom2.velocity),
        p.delta,
        &w,
    );
    let bracket = vecn::add_scaled(
        &vecn::scale(&drift, 0.5 * p.m1 * (p.delta - 1.0)),
        1.5 * p.gamma,
        &w,
    );
    let f_e = coupling
        * (vecn::dot(&bracket, &w)
            + 1.5 * (1.0 - p.alpha) * (mom2.temperature - mom1.temperature));
    Ok((f_m, f_e))
}

/// Interface velocity of the energy exchange:
/// `U = 1/2 [(u1+u2).w/|w|^2] w - c w + V_perp`, with any supplied `V_perp`
/// candidate projected orthogonal to `w`. Returns `u1` when `u1 = u2` (the
/// exchange term vanishes identically there).
pub fn interface_velocity(
    u1: &Vec3,
    u2: &Vec3,
    c: f64,
    v_perp: Option<&dyn Fn(&Vec3, &Vec3) -> Vec3>,
) -> Vec3 {
    let w = vecn::sub(u1, u2);
    let w2 = vecn::norm2(&w);
    if w2 == 0.0 {
        return *u1;
    }
    let parallel = 0.5 * vecn::dot(&vecn::add(u1, u2), &w) / w2 - c;
    let mut u = vecn::scale(&w, parallel);
    if let Some(f) = v_perp {
        let cand = f(u1, u2);
        let proj = vecn::dot(&cand, &w) / w2;
        u = vecn::add(&u, &vecn::add_scaled(&cand, -proj, &w));
    }
    u
}

/// Derived bridge quantities for given kinetic parameters and relaxation
/// rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeDerived {
    pub delta: f64,
    /// Admissible interval for the free constant `c`.
    pub c_range: (f64, f64),
    /// The symmetry-selected constant
    /// `c = 1/4 (1 - delta)(1 - (m1/m2) eps)`.
    pub c_symmetric: f64,
}

/// `gamma(c) = 1/3 m1 (1 - delta) delta + 2/3 m1 (1 - delta) c`.
pub fn gamma_from_c(m1: f64, delta: f64, c: f64) -> f64 {
    m1 / 3.0 * (1.0 - delta) * delta + 2.0 / 3.0 * m1 * (1.0 - delta) * c
}

/// Admissible `c` interval
/// `[-delta/2, 1/2 - (m1/m2) eps (1 - delta) / 2]`.
pub fn c_range(p: &MixtureParameters) -> (f64, f64) {
    let r = p.m1 / p.m2 * p.epsilon;
    (-0.5 * p.delta, 0.5 - 0.5 * r * (1.0 - p.delta))
}

/// The symmetry-selected constant `c = (1 - delta)(1 - (m1/m2) eps)/4`.
pub fn c_symmetric(p: &MixtureParameters) -> f64 {
    0.25 * (1.0 - p.delta) * (1.0 - p.m1 / p.m2 * p.epsilon)
}

/// Maps a momentum-relaxation rate `lambda_u` to the kinetic `delta` via
/// `delta = 1 - lambda_u / (m1 nu12 n1 n2)` and reports the `c` data.
/// Errors when the resulting `delta` leaves its admissible interval.
pub fn bridge_parameters(
    p: &MixtureParameters,
    lambda_u: f64,
    n1: f64,
    n2: f64,
) -> Result<BridgeDerived> {
    let nu12 = p.nu12(n1, n2)?;
    let coupling = p.m1 * nu12 * n1 * n2;
    if !(coupling > 0.0) {
        return Err(KineticError::Admissibility(
            "lambda_u bridge needs positive m1 nu12 n1 n2".to_string(),
        ));
    }
    let delta = 1.0 - lambda_u / coupling;
    let probe = MixtureParameters {
        delta,
        ..p.clone()
    };
    let (dlo, dhi) = probe.delta_bounds();
    if delta < dlo || delta > dhi {
        return Err(KineticError::Admissibility(format!(
            "bridged delta = {delta} outside admissible [{dlo}, {dhi}]"
        )));
    }
    Ok(BridgeDerived {
        delta,
        c_range: c_range(&probe),
        c_symmetric: c_symmetric(&probe),
    })
}

/// Relaxation rates realizing the kinetic exchange terms:
/// `lambda_u = m1 nu12 n1 n2 (1 - delta)`,
/// `lambda_T = 3/2 nu12 n1 n2 (1 - alpha)`.
pub fn bridged_rates(p: &MixtureParameters, n1: f64, n2: f64) -> Result<BridgeParameters> {
    let nu12 = p.nu12(n1, n2)?;
    Ok(BridgeParameters {
        lambda_u: p.m1 * nu12 * n1 * n2 * (1.0 - p.delta),
        lambda_t: 1.5 * nu12 * n1 * n2 * (1.0 - p.alpha),
        c: c_symmetric(p),
    })
}

/// Time derivatives of the conserved fields
/// `(m1 n1 u1, m2 n2 u2, m1 n1 E1, m2 n2 E2)`; densities are constant in
/// the homogeneous system.
#[derive(Debug, Clone, Copy)]
pub struct SourceTerms {
    pub momentum: [Vec3; 2],
    pub energy: [f64; 2],
}

pub fn source_terms(
    state: &TwoFluidState,
    bridge: &BridgeParameters,
    masses: [f64; 2],
) -> SourceTerms {
    let [u1, u2] = state.velocity;
    let t1 = state.temperature(0, masses[0]);
    let t2 = state.temperature(1, masses[1]);
    let du21 = vecn::sub(&u2, &u1);
    let du12 = vecn::sub(&u1, &u2);
    let u = interface_velocity(&u1, &u2, bridge.c, None);
    SourceTerms {
        momentum: [
            vecn::scale(&du21, bridge.lambda_u),
            vecn::scale(&du12, bridge.lambda_u),
        ],
        energy: [
            bridge.lambda_t * (t2 - t1) + bridge.lambda_u * vecn::dot(&u, &du21),
            bridge.lambda_t * (t1 - t2) + bridge.lambda_u * vecn::dot(&u, &du12),
        ],
    }
}

/// Classical fourth-order Runge-Kutta on the conserved fields. The stage
/// sources are exactly antisymmetric between the species, so total momentum
/// and total energy are preserved to rounding at every step.
pub fn integrate_relaxation(
    state0: &TwoFluidState,
    bridge: &BridgeParameters,
    masses: [f64; 2],
    dt: f64,
    n_steps: usize,
    cadence: usize,
) -> Result<Vec<(f64, TwoFluidState)>> {
    if !(dt > 0.0) {
        return Err(KineticError::config("dt", "must be positive"));
    }
    if cadence == 0 {
        return Err(KineticError::config("cadence", "must be at least 1"));
    }
    // Conserved variables y = (p1, p2, W1, W2).
    let pack = |s: &TwoFluidState| -> [f64; 8] {
        let mut y = [0.0; 8];
        for k in 0..2 {
            let mn = masses[k] * s.density[k];
            for a in 0..3 {
                y[3 * k + a] = mn * s.velocity[k][a];
            }
            y[6 + k] = mn * s.energy[k];
        }
        y
    };
    let unpack = |y: &[f64; 8]| -> TwoFluidState {
        let mut s = *state0;
        for k in 0..2 {
            let mn = masses[k] * s.density[k];
            for a in 0..3 {
                s.velocity[k][a] = y[3 * k + a] / mn;
            }
            s.energy[k] = y[6 + k] / mn;
        }
        s
    };
    let rhs = |y: &[f64; 8]| -> [f64; 8] {
        let s = unpack(y);
        let src = source_terms(&s, bridge, masses);
        let mut dy = [0.0; 8];
        for k in 0..2 {
            for a in 0..3 {
                dy[3 * k + a] = src.momentum[k][a];
            }
            dy[6 + k] = src.energy[k];
        }
        dy
    };

    let mut y = pack(state0);
    let mut out = Vec::with_capacity(n_steps / cadence + 2);
    out.push((0.0, *state0));
    for step in 1..=n_steps {
        let k1 = rhs(&y);
        let mut y2 = y;
        for i in 0..8 {
            y2[i] = y[i] + 0.5 * dt * k1[i];
        }
        let k2 = rhs(&y2);
        let mut y3 = y;
        for i in 0..8 {
            y3[i] = y[i] + 0.5 * dt * k2[i];
        }
        let k3 = rhs(&y3);
        let mut y4 = y;
        for i in 0..8 {
            y4[i] = y[i] + dt * k3[i];
        }
        let k4 = rhs(&y4);
        for i in 0..8 {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let s = unpack(&y);
        for k in 0..2 {
            let t = s.temperature(k, masses[k]);
            if t <= 0.0 {
                return Err(KineticError::DegenerateState(format!(
                    "temperature of species {} fell to {t} at step {step}",
                    k + 1
                )));
            }
        }
        if step % cadence == 0 || step == n_steps {
            out.push((step as f64 * dt, s));
        }
    }
    Ok(out)
}
