//! Randomized property suite: every checker against lattice-sampled
//! Gaussian-mixture pairs with admissible random parameters.
//!
//! Sampling is reproducible: per-sample seeds derive from the master seed,
//! so reports are bit-identical across runs and thread counts.

use super::{
    check_combination_bound, check_density_temperature, check_maxwellian_sup, check_tail_moments,
    check_velocity_ratio, EstimateReport, TargetKind,
};
use crate::error::Result;
use crate::grid::{GridConfig, PhaseGrid};
use crate::mixture::maxwellian::{sample_into, MaxwellTarget};
use crate::mixture::{AapCoupling, AapVelocitySign, MixtureParameters, ModelVariant};
use crate::moments::{compute_moments, DistributionField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Suite parameters; checker exponents default to values inside every
/// derivation's validity region for the chosen dimension.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub master_seed: u64,
    pub samples: usize,
    pub velocity_dim: usize,
    pub v_max: f64,
    pub nodes_per_axis: usize,
    /// Exponent for the tail-moment and Maxwellian-sup checks; must exceed
    /// d + 2. Defaults to d + 3.
    pub q_tail: Option<f64>,
    /// Exponent for the velocity-ratio check; must avoid `[d, d+2]`.
    /// Defaults to 2 in three dimensions, d + 3 otherwise.
    pub q_ratio: Option<f64>,
    /// Exponents for the power-mean lemma lines.
    pub lemma_qs: Vec<f64>,
    /// Also run the starred single-term analogues.
    pub starred: bool,
}

impl SuiteConfig {
    pub fn new(master_seed: u64, samples: usize) -> Self {
        SuiteConfig {
            master_seed,
            samples,
            velocity_dim: 3,
            v_max: 10.0,
            nodes_per_axis: 40,
            q_tail: None,
            q_ratio: None,
            lemma_qs: vec![1.0, 1.5, 2.0, 3.0],
            starred: true,
        }
    }

    fn q_tail(&self) -> f64 {
        self.q_tail.unwrap_or((self.velocity_dim + 3) as f64)
    }

    fn q_ratio(&self) -> f64 {
        self.q_ratio.unwrap_or(if self.velocity_dim == 3 {
            2.0
        } else {
            (self.velocity_dim + 3) as f64
        })
    }
}

/// Checker outcomes of one sample.
#[derive(Debug, Clone)]
pub struct SampleReport {
    pub sample: usize,
    pub seed: u64,
    pub report: EstimateReport,
}

fn random_admissible_params(rng: &mut ChaCha12Rng) -> MixtureParameters {
    let m1 = rng.random_range(0.5..2.0);
    let m2 = rng.random_range(0.5..2.0);
    let epsilon: f64 = rng.random_range(0.1..=1.0);
    let nu21 = rng.random_range(0.5..3.0);
    let mut p = MixtureParameters {
        m1,
        m2,
        nu_tilde: [
            rng.random_range(0.5..3.0),
            epsilon * nu21,
            nu21,
            rng.random_range(0.5..3.0),
        ],
        alpha: rng.random_range(0.05..0.95),
        delta: 0.0,
        gamma: 0.0,
        epsilon,
        variant: ModelVariant::TwoTerm,
        aap: None,
    };
    let (dlo, dhi) = p.delta_bounds();
    // Stay a little inside the faces so no constant degenerates.
    let t = rng.random_range(0.02..0.98);
    p.delta = dlo * (1.0 - t) + dhi * t;
    p.gamma = rng.random_range(0.0..1.0) * 0.95 * p.gamma_upper(3);
    p
}

fn random_mixture(
    rng: &mut ChaCha12Rng,
    grid: &PhaseGrid,
    mass: f64,
    buf: &mut [f64],
) -> DistributionField {
    let d = grid.velocity_dim();
    let n_comp = rng.random_range(1..=5);
    let mut f = DistributionField::zeros(grid, mass);
    for _ in 0..n_comp {
        let mut velocity = [0.0; 3];
        for item in velocity.iter_mut().take(d) {
            *item = rng.random_range(-1.2..1.2);
        }
        let target = MaxwellTarget {
            density: rng.random_range(0.2..1.5),
            velocity,
            temperature: rng.random_range(0.3..2.0),
            mass,
        };
        sample_into(grid, &target, buf);
        for (val, b) in f.cell_mut(0).iter_mut().zip(buf.iter()) {
            *val += b;
        }
    }
    f
}

/// Largest coupling constant keeping the single-term closures inside every
/// starred derivation: the positivity ratios stay below one, the
/// `|u_1 - u_2|^2` coefficient nonnegative, and the own-temperature
/// coefficients strictly positive.
fn admissible_chi(p: &MixtureParameters, n1: f64, n2: f64) -> Result<f64> {
    let freqs = p.collision_frequencies(n1, n2)?;
    let a = freqs.total();
    let bound1 = a[0] / n2 * (p.m1 / p.m2).min(1.0);
    let bound2 = a[1] / n1 * (p.m2 / p.m1).min(1.0);
    Ok(0.85 * bound1.min(bound2))
}

fn run_sample(
    cfg: &SuiteConfig,
    grid: &PhaseGrid,
    sample: usize,
    seed: u64,
) -> Result<SampleReport> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut p = random_admissible_params(&mut rng);
    let mut buf = vec![0.0; grid.n_nodes()];
    let f1 = random_mixture(&mut rng, grid, p.m1, &mut buf);
    let f2 = random_mixture(&mut rng, grid, p.m2, &mut buf);

    let q_tail = cfg.q_tail();
    let q_ratio = cfg.q_ratio();
    let mut report = EstimateReport::default();
    report.merge(check_density_temperature(
        &f1,
        &f2,
        grid,
        &p,
        TargetKind::TwoTerm,
        0,
    )?);
    report.merge(check_tail_moments(
        &f1,
        &f2,
        grid,
        &p,
        TargetKind::TwoTerm,
        0,
        q_tail,
    )?);
    report.merge(check_velocity_ratio(
        &f1,
        &f2,
        grid,
        &p,
        TargetKind::TwoTerm,
        0,
        q_ratio,
    )?);
    for q in [0.0, q_tail] {
        report.merge(check_maxwellian_sup(
            &f1,
            &f2,
            grid,
            &p,
            TargetKind::TwoTerm,
            0,
            q,
        )?);
    }
    let mom1 = compute_moments(&f1, grid, 0)?;
    let mom2 = compute_moments(&f2, grid, 0)?;
    for &q in &cfg.lemma_qs {
        let lemma = check_combination_bound(
            &p,
            &mom1.velocity,
            &mom2.velocity,
            mom1.temperature,
            mom2.temperature,
            q,
        )?;
        for mut row in lemma.rows {
            row.label = format!("{}@q={}", row.label, q);
            report.rows.push(row);
        }
    }

    if cfg.starred {
        let chi = admissible_chi(&p, mom1.density, mom2.density)?;
        p.variant = ModelVariant::SingleTerm;
        p.aap = Some(AapCoupling {
            chi12: chi,
            chi21: chi,
            sign: AapVelocitySign::Physical,
        });
        report.merge(check_density_temperature(
            &f1,
            &f2,
            grid,
            &p,
            TargetKind::SingleTerm,
            0,
        )?);
        report.merge(check_tail_moments(
            &f1,
            &f2,
            grid,
            &p,
            TargetKind::SingleTerm,
            0,
            q_tail,
        )?);
        report.merge(check_velocity_ratio(
            &f1,
            &f2,
            grid,
            &p,
            TargetKind::SingleTerm,
            0,
            q_ratio,
        )?);
        for q in [0.0, q_tail] {
            report.merge(check_maxwellian_sup(
                &f1,
                &f2,
                grid,
                &p,
                TargetKind::SingleTerm,
                0,
                q,
            )?);
        }
    }

    Ok(SampleReport {
        sample,
        seed,
        report,
    })
}

/// Runs the whole suite; sample order in the output is fixed regardless of
/// parallelism.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<SampleReport>> {
    let grid = PhaseGrid::new(&GridConfig::homogeneous(
        cfg.velocity_dim,
        cfg.v_max,
        cfg.nodes_per_axis,
    ))?;
    let mut seeder = ChaCha12Rng::seed_from_u64(cfg.master_seed);
    let seeds: Vec<u64> = (0..cfg.samples).map(|_| seeder.random()).collect();

    #[cfg(feature = "parallel")]
    {
        seeds
            .par_iter()
            .enumerate()
            .map(|(i, &seed)| run_sample(cfg, &grid, i, seed))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seeds
            .iter()
            .enumerate()
            .map(|(i, &seed)| run_sample(cfg, &grid, i, seed))
            .collect()
    }
}
