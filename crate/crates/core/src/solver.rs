//! Time evolution of the two-species state for both model variants, plus
//! the fixed-point (Picard) driver mirroring the mild-solution construction.
//!
//! One step is operator-split:
//!
//! 1. semi-Lagrangian advection of each species along `x - v dt` with
//!    periodic wrap and linear interpolation between cell centers;
//! 2. per-cell exponential relaxation
//!    `f_k <- e^{-A_k dt} f_k + (1 - e^{-A_k dt}) target_k`,
//!    `A_k = nu_kk n_k + nu_kj n_j`, with Maxwellian parameters frozen at
//!    the step start.
//!
//! In the space-homogeneous case with frozen coefficients the relaxation
//! substep agrees exactly with the Duhamel (mild-solution) form.

use crate::error::{KineticError, Result};
use crate::grid::{Neumaier, PhaseGrid};
use crate::mixture::maxwellian::{self, CorrectedParams, MaxwellTarget};
use crate::mixture::{MixtureParameters, ModelVariant, RelaxationTarget};
use crate::moments::{
    self, compute_moments, raw_moments, weighted_sup_global, DistributionField, SpeciesMoments,
};
use crate::vecn::{self, Vec3};

/// Phase-space state of both species at one time.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub f1: DistributionField,
    pub f2: DistributionField,
    pub t: f64,
    /// Record of the most recent step.
    pub last_step: StepDiagnostics,
}

impl SolverState {
    pub fn new(f1: DistributionField, f2: DistributionField) -> Self {
        SolverState {
            f1,
            f2,
            t: 0.0,
            last_step: StepDiagnostics::default(),
        }
    }

    pub fn species(&self, k: usize) -> &DistributionField {
        if k == 0 {
            &self.f1
        } else {
            &self.f2
        }
    }
}

/// What the last step did to positivity.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepDiagnostics {
    /// Phase-space mass removed by clipping interpolation negatives.
    pub clipped_mass: f64,
    /// Minimum of f_k over phase space after the step.
    pub min_f: [f64; 2],
}

/// Step-level switches.
#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    /// Newton-correct the discrete Maxwellians so lattice moments match
    /// exactly (conservation runs); plain analytic sampling otherwise.
    pub conservative: bool,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions { conservative: true }
    }
}

/// Scratch buffers and Newton warm starts reused across steps.
#[derive(Debug)]
pub struct StepWorkspace {
    target: Vec<f64>,
    scratch: Vec<f64>,
    advect_row: Vec<f64>,
    /// Corrected parameters per cell and target slot
    /// (2 * species + {0: intra/single, 1: inter}).
    warm: Vec<[Option<CorrectedParams>; 4]>,
}

impl StepWorkspace {
    pub fn new(grid: &PhaseGrid) -> Self {
        StepWorkspace {
            target: vec![0.0; grid.n_nodes()],
            scratch: vec![0.0; grid.n_nodes()],
            advect_row: vec![0.0; grid.n_cells()],
            warm: vec![[None; 4]; grid.n_cells()],
        }
    }
}

/// Samples a Maxwellian into `out`, corrected or analytic.
fn sample_target(
    grid: &PhaseGrid,
    target: &MaxwellTarget,
    warm: &mut Option<CorrectedParams>,
    conservative: bool,
    out: &mut [f64],
) -> Result<()> {
    if conservative {
        let params = maxwellian::conservative_sample(grid, target, *warm, out)?;
        *warm = Some(params);
    } else {
        maxwellian::validate_target(target)?;
        maxwellian::sample_into(grid, target, out);
    }
    Ok(())
}

/// Semi-Lagrangian advection of one species: `f(x, v) <- f(x - v dt, v)`.
/// Linear interpolation keeps values nonnegative; any rounding negatives are
/// clipped and their mass accounted.
fn advect(
    f: &mut DistributionField,
    grid: &PhaseGrid,
    dt: f64,
    row: &mut [f64],
    clipped: &mut f64,
) {
    let n_cells = grid.n_cells();
    if n_cells == 1 {
        return;
    }
    let n_nodes = grid.n_nodes();
    let dx = grid.dx();
    let w = grid.weights()[0];
    let values = f.values_mut();
    for node in 0..n_nodes {
        let sigma = grid.nodes()[node][0] * dt / dx;
        let base = sigma.floor();
        let frac = sigma - base;
        let shift = base as i64;
        for (c, slot) in row.iter_mut().enumerate() {
            // Departure cell for arrival cell c, interpolated between the
            // two bracketing cell centers.
            let s = (c as i64 - shift).rem_euclid(n_cells as i64) as usize;
            let s1 = (s + n_cells - 1) % n_cells;
            let a = values[s * n_nodes + node];
            let b = values[s1 * n_nodes + node];
            let mut v = (1.0 - frac) * a + frac * b;
            if v < 0.0 {
                *clipped += -v * w * dx;
                v = 0.0;
            }
            *slot = v;
        }
        for (c, &v) in row.iter().enumerate() {
            values[c * n_nodes + node] = v;
        }
    }
}

/// Advances the state by one step of split transport and relaxation.
pub fn step(
    state: &mut SolverState,
    p: &MixtureParameters,
    grid: &PhaseGrid,
    dt: f64,
    opts: &StepOptions,
    ws: &mut StepWorkspace,
) -> Result<()> {
    if !(dt > 0.0) {
        return Err(KineticError::config(
            "dt",
            format!("must be positive, got {dt}"),
        ));
    }
    let d = grid.velocity_dim();
    let mut clipped = 0.0;

    advect(&mut state.f1, grid, dt, &mut ws.advect_row, &mut clipped);
    advect(&mut state.f2, grid, dt, &mut ws.advect_row, &mut clipped);

    let mut min_f = [f64::INFINITY; 2];
    for cell in 0..grid.n_cells() {
        let mom1 = compute_moments(&state.f1, grid, cell)?;
        let mom2 = compute_moments(&state.f2, grid, cell)?;
        let closure = p.step_closure(&mom1, &mom2, d)?;

        for species in 0..2 {
            let rate = closure.rate[species];
            let decay = (-rate * dt).exp();
            let gain = 1.0 - decay;
            let warm = &mut ws.warm[cell];
            match &closure.targets[species] {
                RelaxationTarget::TwoTerm {
                    intra,
                    inter,
                    w_intra,
                    w_inter,
                } => {
                    sample_target(
                        grid,
                        intra,
                        &mut warm[2 * species],
                        opts.conservative,
                        &mut ws.target,
                    )?;
                    sample_target(
                        grid,
                        inter,
                        &mut warm[2 * species + 1],
                        opts.conservative,
                        &mut ws.scratch,
                    )?;
                    let (wi, we) = (*w_intra, *w_inter);
                    for (tgt, s) in ws.target.iter_mut().zip(&ws.scratch) {
                        *tgt = wi * *tgt + we * s;
                    }
                }
                RelaxationTarget::Single { target } => {
                    sample_target(
                        grid,
                        target,
                        &mut warm[2 * species],
                        opts.conservative,
                        &mut ws.target,
                    )?;
                }
            }
            let f = if species == 0 {
                &mut state.f1
            } else {
                &mut state.f2
            };
            let row = f.cell_mut(cell);
            let mut local_min = f64::INFINITY;
            for (val, tgt) in row.iter_mut().zip(&ws.target) {
                *val = decay * *val + gain * tgt;
                local_min = local_min.min(*val);
            }
            min_f[species] = min_f[species].min(local_min);
        }
    }

    state.t += dt;
    state.last_step = StepDiagnostics {
        clipped_mass: clipped,
        min_f,
    };
    Ok(())
}

/// One Maxwellian component of an initial condition, with sinusoidal
/// density modulation `n(x) = n0 (1 + a sin(2 pi mode x / L))`.
#[derive(Debug, Clone)]
pub struct MaxwellComponent {
    pub density: f64,
    pub velocity: Vec3,
    pub temperature: f64,
    pub modulation_amplitude: f64,
    pub modulation_mode: u32,
}

impl MaxwellComponent {
    pub fn uniform(density: f64, velocity: Vec3, temperature: f64) -> Self {
        MaxwellComponent {
            density,
            velocity,
            temperature,
            modulation_amplitude: 0.0,
            modulation_mode: 1,
        }
    }
}

/// Builds a species field from Maxwellian components.
pub fn build_species(
    grid: &PhaseGrid,
    mass: f64,
    components: &[MaxwellComponent],
) -> Result<DistributionField> {
    if components.is_empty() {
        return Err(KineticError::config(
            "initial_condition",
            "species needs at least one Maxwellian component",
        ));
    }
    for comp in components {
        if comp.density < 0.0 {
            return Err(KineticError::config(
                "density",
                "component density must be nonnegative",
            ));
        }
        if comp.density > 0.0 && comp.temperature <= 0.0 {
            return Err(KineticError::config(
                "temperature",
                "component temperature must be positive",
            ));
        }
        if comp.modulation_amplitude.abs() >= 1.0 {
            return Err(KineticError::config(
                "modulation_amplitude",
                "must lie in (-1, 1) to keep the density positive",
            ));
        }
    }
    let mut f = DistributionField::zeros(grid, mass);
    let length = grid.domain_length();
    let mut buf = vec![0.0; grid.n_nodes()];
    for comp in components {
        let target = MaxwellTarget {
            density: comp.density,
            velocity: comp.velocity,
            temperature: comp.temperature,
            mass,
        };
        maxwellian::sample_into(grid, &target, &mut buf);
        for c in 0..grid.n_cells() {
            let x = grid.cell_x(c);
            let factor = 1.0
                + comp.modulation_amplitude
                    * (2.0 * std::f64::consts::PI * comp.modulation_mode as f64 * x / length)
                        .sin();
            let row = f.cell_mut(c);
            for (val, b) in row.iter_mut().zip(&buf) {
                *val += factor * b;
            }
        }
    }
    Ok(f)
}

/// One diagnostics sample of a run.
#[derive(Debug, Clone)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub step: usize,
    /// Domain-integrated particle count per species.
    pub mass: [f64; 2],
    pub mean_density: [f64; 2],
    pub min_density: [f64; 2],
    pub max_density: [f64; 2],
    /// Density-weighted mean velocity per species.
    pub bulk_velocity: [Vec3; 2],
    /// Density-weighted mean temperature per species.
    pub mean_temperature: [f64; 2],
    pub min_temperature: [f64; 2],
    /// Max over cells of T_k + |u_k|^2.
    pub max_cap: [f64; 2],
    /// Min over cells of the mixture temperatures (T12, T21) or
    /// (T^(1), T^(2)).
    pub min_mix_temperature: [f64; 2],
    /// Max over cells of T_mix + |u_mix|^2 for the same targets.
    pub max_mix_cap: [f64; 2],
    pub total_momentum: Vec3,
    pub total_energy: f64,
    pub entropy: f64,
    pub min_f: [f64; 2],
    /// Largest per-step clipped mass since the previous record.
    pub clipped_mass: f64,
    /// Exponent of the recorded N_q norm.
    pub nq_exponent: f64,
    /// Global N_q at that exponent, per species.
    pub nq: [f64; 2],
    /// Global N_0 per species.
    pub n0: [f64; 2],
}

/// Evaluates the full diagnostics of a state.
pub fn diagnose(
    state: &SolverState,
    p: &MixtureParameters,
    grid: &PhaseGrid,
    nq_exponent: f64,
    step: usize,
    clipped_mass: f64,
) -> Result<DiagnosticRecord> {
    let d = grid.velocity_dim();
    let dx = grid.dx();
    let length = grid.domain_length();
    let mut mass = [0.0; 2];
    let mut min_density = [f64::INFINITY; 2];
    let mut max_density = [0.0_f64; 2];
    let mut weighted_u = [[Neumaier::default(); 3]; 2];
    let mut weighted_t = [Neumaier::default(); 2];
    let mut min_temperature = [f64::INFINITY; 2];
    let mut max_cap = [0.0_f64; 2];
    let mut min_mix_temperature = [f64::INFINITY; 2];
    let mut max_mix_cap = [0.0_f64; 2];
    let mut momentum = [Neumaier::default(); 3];
    let mut energy = Neumaier::default();
    let masses = [p.m1, p.m2];

    for cell in 0..grid.n_cells() {
        let mut cell_moments: [Option<SpeciesMoments>; 2] = [None, None];
        for species in 0..2 {
            let f = state.species(species);
            let (n, raw_momentum, second) = raw_moments(f, grid, cell);
            let mom = compute_moments(f, grid, cell)?;
            mass[species] += n * dx;
            min_density[species] = min_density[species].min(n);
            max_density[species] = max_density[species].max(n);
            for a in 0..3 {
                weighted_u[species][a].add(n * dx * mom.velocity[a]);
                momentum[a].add(masses[species] * raw_momentum[a] * dx);
            }
            weighted_t[species].add(n * dx * mom.temperature);
            min_temperature[species] = min_temperature[species].min(mom.temperature);
            max_cap[species] = max_cap[species].max(mom.temperature + vecn::norm2(&mom.velocity));
            energy.add(0.5 * masses[species] * second * dx);
            cell_moments[species] = Some(mom);
        }
        let mom1 = cell_moments[0].unwrap();
        let mom2 = cell_moments[1].unwrap();
        match p.variant {
            ModelVariant::TwoTerm => {
                let (u12, u21) = p.interspecies_velocities(&mom1.velocity, &mom2.velocity);
                let (t12, t21) = p.interspecies_temperatures(&mom1, &mom2, d)?;
                min_mix_temperature[0] = min_mix_temperature[0].min(t12);
                min_mix_temperature[1] = min_mix_temperature[1].min(t21);
                max_mix_cap[0] = max_mix_cap[0].max(t12 + vecn::norm2(&u12));
                max_mix_cap[1] = max_mix_cap[1].max(t21 + vecn::norm2(&u21));
            }
            ModelVariant::SingleTerm => {
                let freqs = p.collision_frequencies(mom1.density, mom2.density)?;
                let (u1, u2, t1, t2) = p.aap_interspecies(&mom1, &mom2, &freqs)?;
                min_mix_temperature[0] = min_mix_temperature[0].min(t1);
                min_mix_temperature[1] = min_mix_temperature[1].min(t2);
                max_mix_cap[0] = max_mix_cap[0].max(t1 + vecn::norm2(&u1));
                max_mix_cap[1] = max_mix_cap[1].max(t2 + vecn::norm2(&u2));
            }
        }
    }

    let mut bulk_velocity = [[0.0; 3]; 2];
    let mut mean_temperature = [0.0; 2];
    for species in 0..2 {
        for a in 0..3 {
            bulk_velocity[species][a] = weighted_u[species][a].value() / mass[species];
        }
        mean_temperature[species] = weighted_t[species].value() / mass[species];
    }

    Ok(DiagnosticRecord {
        t: state.t,
        step,
        mass,
        mean_density: [mass[0] / length, mass[1] / length],
        min_density,
        max_density,
        bulk_velocity,
        mean_temperature,
        min_temperature,
        max_cap,
        min_mix_temperature,
        max_mix_cap,
        total_momentum: [
            momentum[0].value(),
            momentum[1].value(),
            momentum[2].value(),
        ],
        total_energy: energy.value(),
        entropy: moments::entropy(&state.f1, &state.f2, grid),
        min_f: [state.f1.min_value(), state.f2.min_value()],
        clipped_mass,
        nq_exponent,
        nq: [
            weighted_sup_global(&state.f1, grid, nq_exponent),
            weighted_sup_global(&state.f2, grid, nq_exponent),
        ],
        n0: [
            weighted_sup_global(&state.f1, grid, 0.0),
            weighted_sup_global(&state.f2, grid, 0.0),
        ],
    })
}

/// Run parameters for [`run_simulation`].
#[derive(Debug, Clone)]
pub struct SimulationSpec {
    pub dt: f64,
    pub n_steps: usize,
    /// Record diagnostics every `cadence` steps (step 0 always recorded).
    pub cadence: usize,
    pub conservative: bool,
    /// Exponent of the N_q norm carried in the diagnostics.
    pub nq_exponent: f64,
}

impl SimulationSpec {
    pub fn new(dt: f64, n_steps: usize) -> Self {
        SimulationSpec {
            dt,
            n_steps,
            cadence: 1,
            conservative: true,
            nq_exponent: 6.0,
        }
    }

    pub fn t_end(&self) -> f64 {
        self.dt * self.n_steps as f64
    }
}

/// Advances the initial state and collects diagnostics. Deterministic for a
/// given spec.
pub fn run_simulation(
    mut state: SolverState,
    p: &MixtureParameters,
    grid: &PhaseGrid,
    spec: &SimulationSpec,
) -> Result<(Vec<DiagnosticRecord>, SolverState)> {
    if !(spec.dt > 0.0) {
        return Err(KineticError::config("dt", "must be positive"));
    }
    if spec.cadence == 0 {
        return Err(KineticError::config("cadence", "must be at least 1"));
    }
    let opts = StepOptions {
        conservative: spec.conservative,
    };
    let mut ws = StepWorkspace::new(grid);
    let mut records = Vec::with_capacity(spec.n_steps / spec.cadence + 2);
    records.push(diagnose(&state, p, grid, spec.nq_exponent, 0, 0.0)?);
    let mut clipped_since_record: f64 = 0.0;
    for s in 1..=spec.n_steps {
        step(&mut state, p, grid, spec.dt, &opts, &mut ws)?;
        clipped_since_record = clipped_since_record.max(state.last_step.clipped_mass);
        if s % spec.cadence == 0 || s == spec.n_steps {
            records.push(diagnose(
                &state,
                p,
                grid,
                spec.nq_exponent,
                s,
                clipped_since_record,
            )?);
            clipped_since_record = 0.0;
        }
    }
    Ok((records, state))
}

/// Distance trace of the fixed-point iteration.
#[derive(Debug, Clone, Default)]
pub struct PicardTrace {
    /// Weighted-L1 distance between successive iterates, summed over both
    /// species, sup over the time samples.
    pub distances: Vec<f64>,
}

impl PicardTrace {
    /// Ratios of successive distances.
    pub fn ratios(&self) -> Vec<f64> {
        self.distances
            .windows(2)
            .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
            .collect()
    }
}

/// Solves the initial value problem on `[0, t_end]` by iterating the
/// frozen-coefficient linear problem: iterate `n` is advanced with densities
/// and Maxwellians evaluated from iterate `n - 1` at matching times.
///
/// Iterate 0 is the initial data held constant in time. Convergence is
/// declared once the sup-in-time weighted-L1 distance between successive
/// iterates drops below `tol`.
pub fn picard_solve(
    initial: &SolverState,
    p: &MixtureParameters,
    grid: &PhaseGrid,
    t_end: f64,
    dt: f64,
    tol: f64,
    max_iter: usize,
    opts: &StepOptions,
) -> Result<(SolverState, PicardTrace)> {
    if !(tol > 0.0) {
        return Err(KineticError::config("tol", "must be positive"));
    }
    if !(dt > 0.0) || t_end < 0.0 {
        return Err(KineticError::config(
            "dt",
            "dt must be positive, t_end nonnegative",
        ));
    }
    let n_steps = (t_end / dt).round().max(0.0) as usize;
    let d = grid.velocity_dim();
    let mut ws = StepWorkspace::new(grid);

    // Iterate 0: constant-in-time initial data.
    let mut prev: Vec<(DistributionField, DistributionField)> = (0..=n_steps)
        .map(|_| (initial.f1.clone(), initial.f2.clone()))
        .collect();
    let mut trace = PicardTrace::default();

    for _iter in 0..max_iter {
        let mut current = Vec::with_capacity(n_steps + 1);
        current.push((initial.f1.clone(), initial.f2.clone()));
        for s in 0..n_steps {
            let (pf1, pf2) = &prev[s];
            let (mut f1, mut f2) = {
                let last = current.last().unwrap();
                (last.0.clone(), last.1.clone())
            };
            let mut clipped = 0.0;
            advect(&mut f1, grid, dt, &mut ws.advect_row, &mut clipped);
            advect(&mut f2, grid, dt, &mut ws.advect_row, &mut clipped);
            for cell in 0..grid.n_cells() {
                let mom1 = compute_moments(pf1, grid, cell)?;
                let mom2 = compute_moments(pf2, grid, cell)?;
                let closure = p.step_closure(&mom1, &mom2, d)?;
                for species in 0..2 {
                    let rate = closure.rate[species];
                    let decay = (-rate * dt).exp();
                    let gain = 1.0 - decay;
                    match &closure.targets[species] {
                        RelaxationTarget::TwoTerm {
                            intra,
                            inter,
                            w_intra,
                            w_inter,
                        } => {
                            let mut none = None;
                            sample_target(grid, intra, &mut none, opts.conservative, &mut ws.target)?;
                            let mut none2 = None;
                            sample_target(
                                grid,
                                inter,
                                &mut none2,
                                opts.conservative,
                                &mut ws.scratch,
                            )?;
                            let (wi, we) = (*w_intra, *w_inter);
                            for (tgt, sc) in ws.target.iter_mut().zip(&ws.scratch) {
                                *tgt = wi * *tgt + we * sc;
                            }
                        }
                        RelaxationTarget::Single { target } => {
                            let mut none = None;
                            sample_target(grid, target, &mut none, opts.conservative, &mut ws.target)?;
                        }
                    }
                    let f = if species == 0 { &mut f1 } else { &mut f2 };
                    for (val, tgt) in f.cell_mut(cell).iter_mut().zip(&ws.target) {
                        *val = decay * *val + gain * tgt;
                    }
                }
            }
            current.push((f1, f2));
        }

        let mut dist: f64 = 0.0;
        for (new, old) in current.iter().zip(&prev) {
            let d1 = moments::weighted_l1_distance(&new.0, &old.0, grid)?;
            let d2 = moments::weighted_l1_distance(&new.1, &old.1, grid)?;
            dist = dist.max(d1 + d2);
        }
        trace.distances.push(dist);
        prev = current;
        if dist < tol {
            let (f1, f2) = prev.pop().unwrap();
            let mut state = SolverState::new(f1, f2);
            state.t = initial.t + n_steps as f64 * dt;
            return Ok((state, trace));
        }
    }

    let last = trace.distances.last().copied().unwrap_or(f64::NAN);
    Err(KineticError::NonConvergence {
        max_iter,
        last_distance: last,
        trace: trace.distances,
    })
}
