//! Interspecies closure algebra for the binary mixture.
//!
//! Everything downstream of the raw moments lives here: admissibility of the
//! free parameters `(alpha, delta, gamma, epsilon)`, the mixture velocities
//! and temperatures of the two-term model, the single-term mixture
//! parameters, collision frequencies, and Maxwellian evaluation.

pub mod maxwellian;

use crate::error::{KineticError, Result};
use crate::moments::SpeciesMoments;
use crate::vecn::{self, Vec3};
use maxwellian::MaxwellTarget;

/// Which relaxation structure the right-hand side uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelVariant {
    /// Separate intra- and interspecies relaxation terms per species.
    TwoTerm,
    /// One relaxation term per species towards a mixture Maxwellian.
    SingleTerm,
}

/// Sign convention for the difference factors in the single-term mixture
/// velocity and temperature.
///
/// `AsPrinted` keeps the `(u_k - u_j)` / `(T_k - T_j)` order; `Physical`
/// flips both so the mixture parameters relax *towards* the other species,
/// which is what conservation of energy and equilibration require.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AapVelocitySign {
    #[default]
    AsPrinted,
    Physical,
}

/// Coupling parameters of the single-term variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AapCoupling {
    pub chi12: f64,
    pub chi21: f64,
    pub sign: AapVelocitySign,
}

/// Free parameters of the mixture models plus the collision-frequency
/// constants. Immutable after construction; `validate` reports on every
/// admissibility invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureParameters {
    pub m1: f64,
    pub m2: f64,
    /// Collision-frequency constants `[nu11~, nu12~, nu21~, nu22~]`; the
    /// actual frequencies are `nu_jk n_k = nu_jk~ n_k / (n1 + n2)`.
    pub nu_tilde: [f64; 4],
    pub alpha: f64,
    pub delta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub variant: ModelVariant,
    pub aap: Option<AapCoupling>,
}

/// One admissibility line of a [`ValidityReport`].
#[derive(Debug, Clone)]
pub struct ValidityCheck {
    pub name: &'static str,
    /// The constraint being checked, human readable.
    pub constraint: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
    /// Distance to the nearest bound; negative when violated.
    pub margin: f64,
}

fn interval_check(
    name: &'static str,
    constraint: String,
    value: f64,
    lower: f64,
    upper: f64,
) -> ValidityCheck {
    let margin = (value - lower).min(upper - value);
    ValidityCheck {
        name,
        constraint,
        value,
        lower,
        upper,
        pass: margin >= 0.0,
        margin,
    }
}

/// Pass/fail per invariant, with the violated bound and margin.
#[derive(Debug, Clone)]
pub struct ValidityReport {
    pub checks: Vec<ValidityCheck>,
}

impl ValidityReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidityCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn first_failure_message(&self) -> Option<String> {
        self.failures()
            .next()
            .map(|c| format!("{}: {} (value {}, margin {})", c.name, c.constraint, c.value, c.margin))
    }
}

/// The four collision-frequency products of one spatial cell.
#[derive(Debug, Clone, Copy)]
pub struct CollisionFrequencies {
    pub nu11_n1: f64,
    pub nu12_n2: f64,
    pub nu21_n1: f64,
    pub nu22_n2: f64,
}

impl CollisionFrequencies {
    /// Total relaxation rate `A_k = nu_kk n_k + nu_kj n_j` per species.
    pub fn total(&self) -> [f64; 2] {
        [self.nu11_n1 + self.nu12_n2, self.nu22_n2 + self.nu21_n1]
    }
}

/// Linear-combination coefficients of one relaxation target's mixture
/// velocity and temperature:
///
/// ```text
/// u_mix = u_coeff[0] u1 + u_coeff[1] u2
/// T_mix = t_coeff[0] T1 + t_coeff[1] T2 + w2_coeff |u1 - u2|^2
/// ```
///
/// Both coefficient pairs sum to one for every closure implemented here,
/// which is what the estimate suite's constant derivations rely on.
#[derive(Debug, Clone, Copy)]
pub struct MixtureClosure {
    /// Species this target relaxes (0 or 1).
    pub species: usize,
    /// Mass in the Maxwellian exponent.
    pub mass: f64,
    pub u_coeff: [f64; 2],
    pub t_coeff: [f64; 2],
    pub w2_coeff: f64,
}

impl MixtureClosure {
    pub fn velocity(&self, u1: &Vec3, u2: &Vec3) -> Vec3 {
        vecn::combine(self.u_coeff[0], u1, self.u_coeff[1], u2)
    }

    pub fn temperature(&self, t1: f64, t2: f64, u1: &Vec3, u2: &Vec3) -> f64 {
        let w2 = vecn::norm2(&vecn::sub(u1, u2));
        self.t_coeff[0] * t1 + self.t_coeff[1] * t2 + self.w2_coeff * w2
    }
}

impl MixtureParameters {
    /// Mass-weighted frequency ratio `(m1/m2) epsilon` that appears in every
    /// admissibility bound.
    fn mass_ratio_eps(&self) -> f64 {
        self.m1 / self.m2 * self.epsilon
    }

    /// Admissible `delta` interval `[(m1 eps/m2 - 1)/(1 + m1 eps/m2), 1]`.
    pub fn delta_bounds(&self) -> (f64, f64) {
        let r = self.mass_ratio_eps();
        ((r - 1.0) / (1.0 + r), 1.0)
    }

    /// Upper bound of the admissible `gamma` interval,
    /// `(m1/d)(1 - delta)[(1 + m1 eps/m2) delta + 1 - m1 eps/m2]`.
    ///
    /// The bracket is evaluated in the factored form `(1 + r)(delta -
    /// delta_lo)` so the bound is exactly zero on both faces of the
    /// admissible `delta` interval.
    pub fn gamma_upper(&self, d: usize) -> f64 {
        let r = self.mass_ratio_eps();
        let (dlo, _) = self.delta_bounds();
        self.m1 / d as f64 * (1.0 - self.delta) * (1.0 + r) * (self.delta - dlo)
    }

    /// Checks every admissibility invariant; report-valued, never errors.
    pub fn validate(&self, d: usize) -> ValidityReport {
        let mut checks = Vec::new();
        checks.push(interval_check(
            "mass_m1",
            "m1 > 0".into(),
            self.m1,
            f64::MIN_POSITIVE,
            f64::INFINITY,
        ));
        checks.push(interval_check(
            "mass_m2",
            "m2 > 0".into(),
            self.m2,
            f64::MIN_POSITIVE,
            f64::INFINITY,
        ));
        let min_nu = self.nu_tilde.iter().copied().fold(f64::INFINITY, f64::min);
        checks.push(interval_check(
            "nu_tilde_positive",
            "all collision-frequency constants positive".into(),
            min_nu,
            f64::MIN_POSITIVE,
            f64::INFINITY,
        ));
        checks.push(interval_check(
            "epsilon",
            "0 < epsilon <= 1".into(),
            self.epsilon,
            f64::MIN_POSITIVE,
            1.0,
        ));
        // nu12~ = eps nu21~ is the stored relationship between the
        // interspecies frequencies.
        let expected = self.epsilon * self.nu_tilde[2];
        let dev = (self.nu_tilde[1] - expected).abs();
        let scale = expected.abs().max(self.nu_tilde[1].abs()).max(1e-30);
        checks.push(ValidityCheck {
            name: "frequency_relation",
            constraint: "nu12~ = epsilon nu21~".into(),
            value: dev / scale,
            lower: 0.0,
            upper: 1e-12,
            pass: dev <= 1e-12 * scale,
            margin: 1e-12 - dev / scale,
        });
        checks.push(interval_check(
            "alpha",
            "0 <= alpha <= 1".into(),
            self.alpha,
            0.0,
            1.0,
        ));
        let (dlo, dhi) = self.delta_bounds();
        checks.push(interval_check(
            "delta",
            format!("(m1 eps/m2 - 1)/(1 + m1 eps/m2) = {dlo:.6} <= delta <= 1"),
            self.delta,
            dlo,
            dhi,
        ));
        let ghi = self.gamma_upper(d);
        checks.push(interval_check(
            "gamma",
            format!("0 <= gamma <= (m1/d)(1-delta)[(1 + m1 eps/m2) delta + 1 - m1 eps/m2] = {ghi:.6}"),
            self.gamma,
            0.0,
            ghi,
        ));
        if let Some(aap) = &self.aap {
            checks.push(interval_check(
                "chi12",
                "chi12 >= 0".into(),
                aap.chi12,
                0.0,
                f64::INFINITY,
            ));
            checks.push(interval_check(
                "chi21",
                "chi21 >= 0".into(),
                aap.chi21,
                0.0,
                f64::INFINITY,
            ));
        }
        ValidityReport { checks }
    }

    /// Collision-frequency products `nu_jk n_k = nu_jk~ n_k / (n1 + n2)`.
    pub fn collision_frequencies(&self, n1: f64, n2: f64) -> Result<CollisionFrequencies> {
        let total = n1 + n2;
        if !(total > 0.0) {
            return Err(KineticError::Vacuum { cell: 0 });
        }
        Ok(CollisionFrequencies {
            nu11_n1: self.nu_tilde[0] * n1 / total,
            nu12_n2: self.nu_tilde[1] * n2 / total,
            nu21_n1: self.nu_tilde[2] * n1 / total,
            nu22_n2: self.nu_tilde[3] * n2 / total,
        })
    }

    /// Bare interspecies frequency `nu12 = nu12~ / (n1 + n2)`, the
    /// coefficient in the exchange terms.
    pub fn nu12(&self, n1: f64, n2: f64) -> Result<f64> {
        let total = n1 + n2;
        if !(total > 0.0) {
            return Err(KineticError::Vacuum { cell: 0 });
        }
        Ok(self.nu_tilde[1] / total)
    }

    /// Mixture velocities `u12 = delta u1 + (1 - delta) u2` and
    /// `u21 = u2 - (m1/m2) eps (1 - delta)(u2 - u1)`.
    pub fn interspecies_velocities(&self, u1: &Vec3, u2: &Vec3) -> (Vec3, Vec3) {
        let u12 = vecn::combine(self.delta, u1, 1.0 - self.delta, u2);
        let eta = self.mass_ratio_eps() * (1.0 - self.delta);
        let u21 = vecn::add_scaled(u2, -eta, &vecn::sub(u2, u1));
        (u12, u21)
    }

    /// Coefficient of `|u1 - u2|^2` in `T21`, with `N = d`.
    fn t21_w2_coeff(&self, d: usize) -> f64 {
        let r = self.mass_ratio_eps();
        self.epsilon * self.m1 * (1.0 - self.delta) * (r * (self.delta - 1.0) + self.delta + 1.0)
            / d as f64
            - self.epsilon * self.gamma
    }

    /// Mixture temperatures `(T12, T21)` for the two-term model.
    ///
    /// Errors when a result comes out nonpositive, which is unreachable for
    /// admissible parameters and positive input temperatures.
    pub fn interspecies_temperatures(
        &self,
        mom1: &SpeciesMoments,
        mom2: &SpeciesMoments,
        d: usize,
    ) -> Result<(f64, f64)> {
        let w2 = vecn::norm2(&vecn::sub(&mom1.velocity, &mom2.velocity));
        let t12 = self.alpha * mom1.temperature
            + (1.0 - self.alpha) * mom2.temperature
            + self.gamma * w2;
        let ea = self.epsilon * (1.0 - self.alpha);
        let t21 = self.t21_w2_coeff(d) * w2 + ea * mom1.temperature
            + (1.0 - ea) * mom2.temperature;
        if (mom1.density > 0.0 && t12 <= 0.0) || (mom2.density > 0.0 && t21 <= 0.0) {
            return Err(KineticError::Admissibility(format!(
                "nonpositive mixture temperature (T12 = {t12}, T21 = {t21})"
            )));
        }
        Ok((t12, t21))
    }

    /// Closure coefficients of one two-term relaxation target.
    pub fn two_term_closure(&self, species: usize, d: usize) -> MixtureClosure {
        if species == 0 {
            MixtureClosure {
                species: 0,
                mass: self.m1,
                u_coeff: [self.delta, 1.0 - self.delta],
                t_coeff: [self.alpha, 1.0 - self.alpha],
                w2_coeff: self.gamma,
            }
        } else {
            let eta = self.mass_ratio_eps() * (1.0 - self.delta);
            let ea = self.epsilon * (1.0 - self.alpha);
            MixtureClosure {
                species: 1,
                mass: self.m2,
                u_coeff: [eta, 1.0 - eta],
                t_coeff: [ea, 1.0 - ea],
                w2_coeff: self.t21_w2_coeff(d),
            }
        }
    }

    /// Closure coefficients of one single-term mixture Maxwellian.
    ///
    /// The coupling strength is `c_k = 2 (m_j/(m_k+m_j)) chi_kj n_j / A_k`
    /// with `A_k = nu_kk n_k + nu_kj n_j`; the temperature carries
    /// `D_k = (2/3)(m_k m_j/(m_k+m_j)^2)(4 chi_kj n_j / A_k)` with the
    /// printed dimension-3 factors kept literally.
    pub fn single_term_closure(
        &self,
        species: usize,
        freqs: &CollisionFrequencies,
        n1: f64,
        n2: f64,
    ) -> Result<MixtureClosure> {
        let aap = self.aap.ok_or_else(|| {
            KineticError::Admissibility("single-term closure requested without coupling parameters".into())
        })?;
        let s = match aap.sign {
            AapVelocitySign::AsPrinted => 1.0,
            AapVelocitySign::Physical => -1.0,
        };
        let a_k = freqs.total()[species];
        if !(a_k > 0.0) {
            return Err(KineticError::Vacuum { cell: 0 });
        }
        let (m_own, m_other, chi, n_other) = if species == 0 {
            (self.m1, self.m2, aap.chi12, n2)
        } else {
            (self.m2, self.m1, aap.chi21, n1)
        };
        let msum = m_own + m_other;
        let coupling = chi * n_other / a_k;
        let c_k = 2.0 * (m_other / msum) * coupling;
        let d_k = 2.0 / 3.0 * (m_own * m_other / (msum * msum)) * 4.0 * coupling;
        let w2_coeff = 0.5 * m_own * d_k - m_own / 3.0 * c_k * c_k;

        let u_own = 1.0 + s * c_k;
        let u_other = -s * c_k;
        let t_own = 1.0 + s * 1.5 * d_k;
        let t_other = -s * 1.5 * d_k;
        Ok(if species == 0 {
            MixtureClosure {
                species: 0,
                mass: m_own,
                u_coeff: [u_own, u_other],
                t_coeff: [t_own, t_other],
                w2_coeff,
            }
        } else {
            MixtureClosure {
                species: 1,
                mass: m_own,
                u_coeff: [u_other, u_own],
                t_coeff: [t_other, t_own],
                w2_coeff,
            }
        })
    }

    /// Positivity ratios of the single-term temperatures:
    /// `chi12 n2 / (nu11 n1 + nu12 n2)` and `chi21 n1 / (nu22 n2 + nu21 n1)`.
    /// Both must stay at most one.
    pub fn aap_positivity_ratios(
        &self,
        freqs: &CollisionFrequencies,
        n1: f64,
        n2: f64,
    ) -> Result<[f64; 2]> {
        let aap = self.aap.ok_or_else(|| {
            KineticError::Admissibility("positivity ratios requested without coupling parameters".into())
        })?;
        let a = freqs.total();
        Ok([aap.chi12 * n2 / a[0], aap.chi21 * n1 / a[1]])
    }

    /// Single-term mixture parameters `(u^(1), u^(2), T^(1), T^(2))`.
    ///
    /// Errors when a mixture temperature comes out nonpositive.
    pub fn aap_interspecies(
        &self,
        mom1: &SpeciesMoments,
        mom2: &SpeciesMoments,
        freqs: &CollisionFrequencies,
    ) -> Result<(Vec3, Vec3, f64, f64)> {
        let c1 = self.single_term_closure(0, freqs, mom1.density, mom2.density)?;
        let c2 = self.single_term_closure(1, freqs, mom1.density, mom2.density)?;
        let u1 = c1.velocity(&mom1.velocity, &mom2.velocity);
        let u2 = c2.velocity(&mom1.velocity, &mom2.velocity);
        let t1 = c1.temperature(
            mom1.temperature,
            mom2.temperature,
            &mom1.velocity,
            &mom2.velocity,
        );
        let t2 = c2.temperature(
            mom1.temperature,
            mom2.temperature,
            &mom1.velocity,
            &mom2.velocity,
        );
        if (mom1.density > 0.0 && t1 <= 0.0) || (mom2.density > 0.0 && t2 <= 0.0) {
            return Err(KineticError::Admissibility(format!(
                "nonpositive single-term temperature (T^(1) = {t1}, T^(2) = {t2})"
            )));
        }
        Ok((u1, u2, t1, t2))
    }
}

/// Evaluates the Maxwellian with moments `(n, u, T)` and mass `m` on the
/// lattice. With `conservative` the discrete parameters are Newton-corrected
/// so the lattice moments match exactly.
pub fn maxwellian_eval(
    n: f64,
    u: &Vec3,
    temperature: f64,
    mass: f64,
    grid: &crate::grid::PhaseGrid,
    conservative: bool,
) -> Result<Vec<f64>> {
    let target = MaxwellTarget {
        density: n,
        velocity: *u,
        temperature,
        mass,
    };
    maxwellian::validate_target(&target)?;
    let mut out = vec![0.0; grid.n_nodes()];
    if conservative {
        maxwellian::conservative_sample(grid, &target, None, &mut out)?;
    } else {
        maxwellian::sample_into(grid, &target, &mut out);
    }
    Ok(out)
}

/// What one species relaxes towards during a step, with the exponential rate
/// `A_k` and the frequency weights already folded in.
#[derive(Debug, Clone)]
pub enum RelaxationTarget {
    TwoTerm {
        intra: MaxwellTarget,
        inter: MaxwellTarget,
        /// nu_kk n_k / A_k
        w_intra: f64,
        /// nu_kj n_j / A_k
        w_inter: f64,
    },
    Single { target: MaxwellTarget },
}

/// Frozen per-cell closure for one relaxation substep.
#[derive(Debug, Clone)]
pub struct StepClosure {
    /// Relaxation rates `A_k` per species.
    pub rate: [f64; 2],
    pub targets: [RelaxationTarget; 2],
}

impl MixtureParameters {
    /// Builds the frozen relaxation closure from the start-of-step moments.
    pub fn step_closure(
        &self,
        mom1: &SpeciesMoments,
        mom2: &SpeciesMoments,
        d: usize,
    ) -> Result<StepClosure> {
        let freqs = self.collision_frequencies(mom1.density, mom2.density)?;
        let rate = freqs.total();
        match self.variant {
            ModelVariant::TwoTerm => {
                let (u12, u21) = self.interspecies_velocities(&mom1.velocity, &mom2.velocity);
                let (t12, t21) = self.interspecies_temperatures(mom1, mom2, d)?;
                let t1 = RelaxationTarget::TwoTerm {
                    intra: MaxwellTarget {
                        density: mom1.density,
                        velocity: mom1.velocity,
                        temperature: mom1.temperature,
                        mass: self.m1,
                    },
                    inter: MaxwellTarget {
                        density: mom1.density,
                        velocity: u12,
                        temperature: t12,
                        mass: self.m1,
                    },
                    w_intra: freqs.nu11_n1 / rate[0],
                    w_inter: freqs.nu12_n2 / rate[0],
                };
                let t2 = RelaxationTarget::TwoTerm {
                    intra: MaxwellTarget {
                        density: mom2.density,
                        velocity: mom2.velocity,
                        temperature: mom2.temperature,
                        mass: self.m2,
                    },
                    inter: MaxwellTarget {
                        density: mom2.density,
                        velocity: u21,
                        temperature: t21,
                        mass: self.m2,
                    },
                    w_intra: freqs.nu22_n2 / rate[1],
                    w_inter: freqs.nu21_n1 / rate[1],
                };
                Ok(StepClosure {
                    rate,
                    targets: [t1, t2],
                })
            }
            ModelVariant::SingleTerm => {
                let (u1, u2, t1, t2) = self.aap_interspecies(mom1, mom2, &freqs)?;
                Ok(StepClosure {
                    rate,
                    targets: [
                        RelaxationTarget::Single {
                            target: MaxwellTarget {
                                density: mom1.density,
                                velocity: u1,
                                temperature: t1,
                                mass: self.m1,
                            },
                        },
                        RelaxationTarget::Single {
                            target: MaxwellTarget {
                                density: mom2.density,
                                velocity: u2,
                                temperature: t2,
                                mass: self.m2,
                            },
                        },
                    ],
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn symmetric_params() -> MixtureParameters {
        MixtureParameters {
            m1: 1.0,
            m2: 1.0,
            nu_tilde: [1.0, 1.0, 1.0, 1.0],
            alpha: 0.5,
            delta: 0.5,
            gamma: 0.0,
            epsilon: 1.0,
            variant: ModelVariant::TwoTerm,
            aap: None,
        }
    }

    fn moments(n: f64, ux: f64, t: f64) -> SpeciesMoments {
        SpeciesMoments {
            density: n,
            velocity: [ux, 0.0, 0.0],
            temperature: t,
        }
    }

    #[test]
    fn delta_range_for_equal_masses_is_unit_interval() {
        let p = symmetric_params();
        let (lo, hi) = p.delta_bounds();
        assert!((lo - 0.0).abs() < 1e-15);
        assert!((hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_upper_bound_direct_evaluation() {
        // m1 = m2 = 1, eps = 1, delta = 1/2, d = 3 -> bound 1/6.
        let p = symmetric_params();
        assert!((p.gamma_upper(3) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn delta_one_forces_gamma_zero() {
        let mut p = symmetric_params();
        p.delta = 1.0;
        assert_eq!(p.gamma_upper(3), 0.0);
        p.gamma = 1e-6;
        assert!(!p.validate(3).pass());
    }

    #[test]
    fn validate_flags_each_violated_invariant() {
        let mut p = symmetric_params();
        p.delta = -0.9;
        let report = p.validate(3);
        assert!(!report.pass());
        let failing: Vec<_> = report.failures().map(|c| c.name).collect();
        // An out-of-range delta empties the gamma interval as well.
        assert!(failing.contains(&"delta"), "failing = {failing:?}");
        // gamma bound became negative territory once delta is invalid, but
        // gamma = 0 stays within [0, bound] only if bound >= 0.
        let mut q = symmetric_params();
        q.epsilon = 1.5;
        let report = q.validate(3);
        assert!(report.failures().any(|c| c.name == "epsilon"));
        // nu12~ = eps nu21~ also breaks once eps changed alone.
        assert!(report.failures().any(|c| c.name == "frequency_relation"));
    }

    #[test]
    fn interspecies_velocities_collapse_at_delta_one() {
        let mut p = symmetric_params();
        p.delta = 1.0;
        let u1 = [0.3, 0.0, 0.0];
        let u2 = [-0.7, 0.2, 0.0];
        let (u12, u21) = p.interspecies_velocities(&u1, &u2);
        assert_eq!(u12, u1);
        assert_eq!(u21, u2);
    }

    #[test]
    fn interspecies_velocities_paper_case() {
        // m1 = m2 = 1, eps = 1, delta = 1/2, u1 = 0, u2 = 1: both 0.5.
        let p = symmetric_params();
        let (u12, u21) = p.interspecies_velocities(&[0.0; 3], &[1.0, 0.0, 0.0]);
        assert!((u12[0] - 0.5).abs() < 1e-15);
        assert!((u21[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn common_velocity_is_fixed_for_any_admissible_delta() {
        let mut p = symmetric_params();
        for delta in [0.0, 0.3, 0.77, 1.0] {
            p.delta = delta;
            let w = [0.4, -0.1, 0.9];
            let (u12, u21) = p.interspecies_velocities(&w, &w);
            for a in 0..3 {
                assert!((u12[a] - w[a]).abs() < 1e-15);
                assert!((u21[a] - w[a]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn interspecies_temperatures_collapse() {
        let mut p = symmetric_params();
        p.alpha = 1.0;
        p.gamma = 0.0;
        let m1 = moments(1.0, 0.5, 1.3);
        let m2 = moments(2.0, 0.5, 0.7);
        let (t12, t21) = p.interspecies_temperatures(&m1, &m2, 3).unwrap();
        assert!((t12 - 1.3).abs() < 1e-15);
        assert!((t21 - 0.7).abs() < 1e-15);
    }

    #[test]
    fn interspecies_temperatures_paper_case() {
        // m1 = m2 = 1, eps = 1, delta = alpha = 1/2, gamma = 0, d = 3,
        // u1 = 0, u2 = 1, T1 = 1, T2 = 2 -> T12 = 1.5, T21 = 1.5 + 1/6.
        let p = symmetric_params();
        let m1 = moments(1.0, 0.0, 1.0);
        let m2 = moments(1.0, 1.0, 2.0);
        let (t12, t21) = p.interspecies_temperatures(&m1, &m2, 3).unwrap();
        assert!((t12 - 1.5).abs() < 1e-15);
        assert!((t21 - (1.5 + 1.0 / 6.0)).abs() < 1e-14);
    }

    #[test]
    fn mixture_temperatures_positive_across_admissible_sweep() {
        // 20^3-ish sweep over (alpha, delta, gamma) inside the admissible box
        // with positive input temperatures.
        let mut p = MixtureParameters {
            m1: 1.0,
            m2: 2.0,
            nu_tilde: [2.0, 1.0, 2.0, 1.0],
            alpha: 0.0,
            delta: 0.0,
            gamma: 0.0,
            epsilon: 0.5,
            variant: ModelVariant::TwoTerm,
            aap: None,
        };
        let m1 = moments(0.8, -0.6, 0.9);
        let m2 = moments(1.7, 1.1, 1.8);
        let (dlo, dhi) = p.delta_bounds();
        let steps = 12;
        for i in 0..=steps {
            p.alpha = i as f64 / steps as f64;
            for j in 0..=steps {
                let t = j as f64 / steps as f64;
                p.delta = dlo * (1.0 - t) + dhi * t;
                let ghi = p.gamma_upper(3);
                for k in 0..=steps {
                    p.gamma = ghi * k as f64 / steps as f64;
                    assert!(p.validate(3).pass(), "sweep point should be admissible");
                    let (t12, t21) = p.interspecies_temperatures(&m1, &m2, 3).unwrap();
                    assert!(t12 > 0.0 && t21 > 0.0, "t12={t12} t21={t21}");
                }
            }
        }
    }

    #[test]
    fn validate_rejects_points_outside_each_face() {
        let base = symmetric_params();
        let cases: Vec<(MixtureParameters, &str)> = vec![
            (
                MixtureParameters { alpha: -0.01, ..base.clone() },
                "alpha",
            ),
            (
                MixtureParameters { alpha: 1.01, ..base.clone() },
                "alpha",
            ),
            (
                MixtureParameters { delta: 1.01, ..base.clone() },
                "delta",
            ),
            (
                MixtureParameters { gamma: -1e-9, ..base.clone() },
                "gamma",
            ),
            (
                MixtureParameters { gamma: 1.0, ..base.clone() },
                "gamma",
            ),
        ];
        for (p, face) in cases {
            let report = p.validate(3);
            assert!(
                report.failures().any(|c| c.name == face),
                "expected {face} violation"
            );
        }
    }

    #[test]
    fn collision_frequencies_paper_case() {
        // nu12~ = 2, n1 = 1, n2 = 3 -> nu12 n2 = 1.5.
        let mut p = symmetric_params();
        p.nu_tilde = [1.0, 2.0, 2.0, 1.0];
        let f = p.collision_frequencies(1.0, 3.0).unwrap();
        assert!((f.nu12_n2 - 1.5).abs() < 1e-15);
    }

    #[test]
    fn collision_frequencies_vacuum_and_single_species() {
        let p = symmetric_params();
        assert!(matches!(
            p.collision_frequencies(0.0, 0.0),
            Err(KineticError::Vacuum { .. })
        ));
        let f = p.collision_frequencies(2.0, 0.0).unwrap();
        assert_eq!(f.nu12_n2, 0.0);
        assert!((f.nu11_n1 - p.nu_tilde[0]).abs() < 1e-15);
    }

    #[test]
    fn collision_rates_bounded_by_max_constant() {
        let mut p = symmetric_params();
        p.nu_tilde = [0.5, 2.0, 2.0, 3.0];
        let max_nu = 3.0;
        for (n1, n2) in [(1.0, 3.0), (0.1, 0.1), (5.0, 0.0)] {
            let f = p.collision_frequencies(n1, n2).unwrap();
            for a in f.total() {
                assert!(a <= max_nu + 1e-15);
            }
        }
    }

    fn aap_params(sign: AapVelocitySign) -> MixtureParameters {
        MixtureParameters {
            m1: 1.0,
            m2: 1.0,
            nu_tilde: [1.0, 1.0, 1.0, 1.0],
            alpha: 0.5,
            delta: 0.5,
            gamma: 0.0,
            epsilon: 1.0,
            variant: ModelVariant::SingleTerm,
            aap: Some(AapCoupling {
                chi12: 0.25,
                chi21: 0.25,
                sign,
            }),
        }
    }

    #[test]
    fn aap_coupling_off_returns_species_moments() {
        let mut p = aap_params(AapVelocitySign::AsPrinted);
        p.aap = Some(AapCoupling {
            chi12: 0.0,
            chi21: 0.0,
            sign: AapVelocitySign::AsPrinted,
        });
        let m1 = moments(1.0, 0.4, 1.2);
        let m2 = moments(2.0, -0.3, 0.8);
        let freqs = p.collision_frequencies(1.0, 2.0).unwrap();
        let (u1, u2, t1, t2) = p.aap_interspecies(&m1, &m2, &freqs).unwrap();
        assert!((u1[0] - 0.4).abs() < 1e-15);
        assert!((u2[0] + 0.3).abs() < 1e-15);
        assert!((t1 - 1.2).abs() < 1e-15);
        assert!((t2 - 0.8).abs() < 1e-15);
    }

    #[test]
    fn aap_velocity_printed_sign_paper_case() {
        // m1 = m2 = 1, unit denominators, chi12 = 1/4, n2 = 1, u1 = 0,
        // u2 = 1 -> u^(1) = -1/4 with the printed (u_k - u_j) factor.
        let p = aap_params(AapVelocitySign::AsPrinted);
        // nu~ = 1 with n1 = n2 = 1 makes A_1 = A_2 = 1 exactly.
        let m1 = moments(1.0, 0.0, 1.0);
        let m2 = moments(1.0, 1.0, 1.0);
        let freqs = p.collision_frequencies(1.0, 1.0).unwrap();
        assert!((freqs.total()[0] - 1.0).abs() < 1e-15);
        let (u1, _, _, _) = p.aap_interspecies(&m1, &m2, &freqs).unwrap();
        assert!((u1[0] + 0.25).abs() < 1e-15, "u^(1) = {}", u1[0]);
    }

    #[test]
    fn aap_temperature_printed_sign_paper_case() {
        // Same setup with u1 = u2, T1 = 1, T2 = 2 -> T^(1) = 3/4.
        let p = aap_params(AapVelocitySign::AsPrinted);
        let m1 = moments(1.0, 0.3, 1.0);
        let m2 = moments(1.0, 0.3, 2.0);
        let freqs = p.collision_frequencies(1.0, 1.0).unwrap();
        let (_, _, t1, _) = p.aap_interspecies(&m1, &m2, &freqs).unwrap();
        assert!((t1 - 0.75).abs() < 1e-14, "T^(1) = {t1}");
    }

    #[test]
    fn aap_physical_sign_moves_towards_other_species() {
        let p = aap_params(AapVelocitySign::Physical);
        let m1 = moments(1.0, 0.0, 1.0);
        let m2 = moments(1.0, 1.0, 2.0);
        let freqs = p.collision_frequencies(1.0, 1.0).unwrap();
        let (u1, u2, t1, t2) = p.aap_interspecies(&m1, &m2, &freqs).unwrap();
        assert!(u1[0] > 0.0 && u1[0] < 1.0, "u^(1) = {}", u1[0]);
        assert!(u2[0] < 1.0 && u2[0] > 0.0, "u^(2) = {}", u2[0]);
        assert!(t1 > 1.0, "T^(1) should warm towards T2, got {t1}");
        assert!(t2 < 2.0, "T^(2) should cool towards T1, got {t2}");
    }

    #[test]
    fn aap_positivity_ratios_match_remark() {
        let p = aap_params(AapVelocitySign::AsPrinted);
        let freqs = p.collision_frequencies(1.0, 1.0).unwrap();
        let ratios = p.aap_positivity_ratios(&freqs, 1.0, 1.0).unwrap();
        assert!((ratios[0] - 0.25).abs() < 1e-15);
        assert!((ratios[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn closure_coefficients_sum_to_one() {
        let p = MixtureParameters {
            m1: 1.3,
            m2: 2.1,
            nu_tilde: [1.0, 0.35, 0.5, 0.75],
            alpha: 0.3,
            delta: 0.4,
            gamma: 0.02,
            epsilon: 0.7,
            variant: ModelVariant::TwoTerm,
            aap: Some(AapCoupling {
                chi12: 0.2,
                chi21: 0.2,
                sign: AapVelocitySign::Physical,
            }),
        };
        let freqs = p.collision_frequencies(0.8, 1.9).unwrap();
        for species in [0, 1] {
            let c = p.two_term_closure(species, 3);
            assert!((c.u_coeff[0] + c.u_coeff[1] - 1.0).abs() < 1e-14);
            assert!((c.t_coeff[0] + c.t_coeff[1] - 1.0).abs() < 1e-14);
            let s = p.single_term_closure(species, &freqs, 0.8, 1.9).unwrap();
            assert!((s.u_coeff[0] + s.u_coeff[1] - 1.0).abs() < 1e-14);
            assert!((s.t_coeff[0] + s.t_coeff[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn momentum_exchange_balance_identity() {
        // m1 nu12 n2 n1 (u12 - u1) + m2 nu21 n1 n2 (u21 - u2) = 0 for every
        // admissible parameter set; realized by the u21 formula.
        let mut p = MixtureParameters {
            m1: 0.9,
            m2: 2.4,
            nu_tilde: [1.1, 0.4 * 0.6, 0.4, 2.0],
            alpha: 0.35,
            delta: 0.0,
            gamma: 0.0,
            epsilon: 0.6,
            variant: ModelVariant::TwoTerm,
            aap: None,
        };
        let (dlo, dhi) = p.delta_bounds();
        let u1 = [0.7, -0.2, 0.4];
        let u2 = [-0.5, 0.6, 0.1];
        let (n1, n2) = (0.8, 1.9);
        for j in 0..=10 {
            p.delta = dlo + (dhi - dlo) * j as f64 / 10.0;
            let freqs = p.collision_frequencies(n1, n2).unwrap();
            let (u12, u21) = p.interspecies_velocities(&u1, &u2);
            for a in 0..3 {
                let s1 = p.m1 * freqs.nu12_n2 * n1 * (u12[a] - u1[a]);
                let s2 = p.m2 * freqs.nu21_n1 * n2 * (u21[a] - u2[a]);
                let scale = s1.abs().max(s2.abs()).max(1e-30);
                assert!((s1 + s2).abs() <= 1e-12 * scale, "axis {a}: {s1} vs {s2}");
            }
        }
    }

    #[test]
    fn energy_exchange_balance_identity() {
        // nu12 n2 n1 [ (m1/2)(|u12|^2 - |u1|^2) + (d/2)(T12 - T1) ]
        //   + nu21 n1 n2 [ (m2/2)(|u21|^2 - |u2|^2) + (d/2)(T21 - T2) ] = 0.
        let d = 3;
        let mut p = MixtureParameters {
            m1: 1.4,
            m2: 0.8,
            nu_tilde: [0.9, 0.75 * 1.2, 1.2, 0.6],
            alpha: 0.0,
            delta: 0.0,
            gamma: 0.0,
            epsilon: 0.75,
            variant: ModelVariant::TwoTerm,
            aap: None,
        };
        let mom1 = SpeciesMoments {
            density: 1.1,
            velocity: [0.4, 0.3, -0.2],
            temperature: 1.6,
        };
        let mom2 = SpeciesMoments {
            density: 0.6,
            velocity: [-0.3, 0.9, 0.5],
            temperature: 0.7,
        };
        let (dlo, dhi) = p.delta_bounds();
        for i in 0..5 {
            p.alpha = i as f64 / 4.0;
            for j in 0..5 {
                p.delta = dlo + (dhi - dlo) * j as f64 / 4.0;
                for k in 0..3 {
                    p.gamma = p.gamma_upper(d) * k as f64 / 2.0;
                    let freqs = p.collision_frequencies(mom1.density, mom2.density).unwrap();
                    let (u12, u21) =
                        p.interspecies_velocities(&mom1.velocity, &mom2.velocity);
                    let (t12, t21) = p.interspecies_temperatures(&mom1, &mom2, d).unwrap();
                    let e1 = freqs.nu12_n2
                        * mom1.density
                        * (0.5 * p.m1 * (vecn::norm2(&u12) - vecn::norm2(&mom1.velocity))
                            + 0.5 * d as f64 * (t12 - mom1.temperature));
                    let e2 = freqs.nu21_n1
                        * mom2.density
                        * (0.5 * p.m2 * (vecn::norm2(&u21) - vecn::norm2(&mom2.velocity))
                            + 0.5 * d as f64 * (t21 - mom2.temperature));
                    let scale = e1.abs().max(e2.abs()).max(1e-30);
                    assert!(
                        (e1 + e2).abs() <= 1e-12 * scale,
                        "alpha={} delta={} gamma={}: {e1} vs {e2}",
                        p.alpha,
                        p.delta,
                        p.gamma
                    );
                }
            }
        }
    }

    #[test]
    fn maxwellian_eval_zero_density_is_zero_field() {
        let grid =
            crate::grid::PhaseGrid::new(&crate::grid::GridConfig::homogeneous(1, 6.0, 32)).unwrap();
        let vals = maxwellian_eval(0.0, &[0.0; 3], 1.0, 1.0, &grid, false).unwrap();
        assert!(vals.iter().all(|&v| v == 0.0));
    }
}
