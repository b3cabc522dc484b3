//! Macroscopic moments, weighted sup-norms, the entropy functional and the
//! weighted-L1 distance used by the fixed-point contraction check.
//!
//! Moment conventions, with `d` the velocity dimension:
//!
//! ```text
//! n   = ∫ f dv
//! u   = (1/n) ∫ v f dv
//! T   = (m / (d n)) ∫ |v - u|^2 f dv
//! ```

use crate::error::{KineticError, Result};
use crate::grid::{Neumaier, PhaseGrid};
use crate::vecn::{self, Vec3};

/// Number density, mean velocity and temperature of one species at one
/// spatial cell. Temperature absorbs the Boltzmann constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeciesMoments {
    pub density: f64,
    pub velocity: Vec3,
    pub temperature: f64,
}

/// Phase-space density of one species: `n_cells x n_nodes` nonnegative
/// values plus the particle mass.
#[derive(Debug, Clone)]
pub struct DistributionField {
    values: Vec<f64>,
    mass: f64,
    n_cells: usize,
    n_nodes: usize,
}

impl DistributionField {
    pub fn zeros(grid: &PhaseGrid, mass: f64) -> Self {
        DistributionField {
            values: vec![0.0; grid.n_cells() * grid.n_nodes()],
            mass,
            n_cells: grid.n_cells(),
            n_nodes: grid.n_nodes(),
        }
    }

    /// Builds a field by evaluating `f(x, v)` at every cell center / node.
    pub fn from_fn(grid: &PhaseGrid, mass: f64, f: impl Fn(f64, &Vec3) -> f64) -> Self {
        let mut field = Self::zeros(grid, mass);
        for c in 0..grid.n_cells() {
            let x = grid.cell_x(c);
            let row = field.cell_mut(c);
            for (val, v) in row.iter_mut().zip(grid.nodes()) {
                *val = f(x, v);
            }
        }
        field
    }

    /// Wraps per-node values as a single-cell field.
    pub fn from_values(grid: &PhaseGrid, mass: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() * grid.n_nodes() {
            return Err(KineticError::Dimension(format!(
                "field has {} values, grid holds {} cells x {} nodes",
                values.len(),
                grid.n_cells(),
                grid.n_nodes()
            )));
        }
        Ok(DistributionField {
            values,
            mass,
            n_cells: grid.n_cells(),
            n_nodes: grid.n_nodes(),
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn cell(&self, c: usize) -> &[f64] {
        &self.values[c * self.n_nodes..(c + 1) * self.n_nodes]
    }

    pub fn cell_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.values[c * self.n_nodes..(c + 1) * self.n_nodes]
    }

    /// Minimum value over the whole phase space.
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn same_shape(&self, other: &DistributionField) -> Result<()> {
        if self.n_cells != other.n_cells || self.n_nodes != other.n_nodes {
            return Err(KineticError::Dimension(format!(
                "field shapes differ: {}x{} vs {}x{}",
                self.n_cells, self.n_nodes, other.n_cells, other.n_nodes
            )));
        }
        Ok(())
    }
}

/// Raw velocity moments of one cell: mass, momentum and the second moment
/// `∫ |v|^2 f dv`, all by compensated quadrature in fixed node order.
pub fn raw_moments(f: &DistributionField, grid: &PhaseGrid, cell: usize) -> (f64, Vec3, f64) {
    let row = f.cell(cell);
    let mut m0 = Neumaier::default();
    let mut m1 = [Neumaier::default(); 3];
    let mut m2 = Neumaier::default();
    for ((val, v), s2) in row.iter().zip(grid.nodes()).zip(grid.speed2()) {
        let wv = grid.weights()[0] * val;
        m0.add(wv);
        m1[0].add(wv * v[0]);
        m1[1].add(wv * v[1]);
        m1[2].add(wv * v[2]);
        m2.add(wv * s2);
    }
    (
        m0.value(),
        [m1[0].value(), m1[1].value(), m1[2].value()],
        m2.value(),
    )
}

/// Computes `(n, u, T)` of one cell.
///
/// Errors with [`KineticError::ZeroDensity`] when the cell carries no mass,
/// since `u` and `T` are then undefined.
pub fn compute_moments(
    f: &DistributionField,
    grid: &PhaseGrid,
    cell: usize,
) -> Result<SpeciesMoments> {
    let (n, momentum, second) = raw_moments(f, grid, cell);
    if n <= 0.0 {
        return Err(KineticError::ZeroDensity { cell });
    }
    let u = vecn::scale(&momentum, 1.0 / n);
    // ∫|v-u|^2 f = ∫|v|^2 f - n |u|^2
    let centered = second - n * vecn::norm2(&u);
    let d = grid.velocity_dim() as f64;
    let temperature = f.mass() * centered.max(0.0) / (d * n);
    Ok(SpeciesMoments {
        density: n,
        velocity: u,
        temperature,
    })
}

/// `x^p` with a fast path for small integer exponents.
#[inline]
pub(crate) fn pow_halfexp(x: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() <= 16.0 {
        x.powi(p as i32)
    } else {
        x.powf(p)
    }
}

/// Weighted sup-norm `N_q(f) = max over lattice nodes of |v|^q f(v)` at one
/// cell. The truncated lattice realizes the supremum.
pub fn weighted_sup(f: &DistributionField, grid: &PhaseGrid, q: f64, cell: usize) -> f64 {
    debug_assert!(q >= 0.0);
    let row = f.cell(cell);
    if q == 0.0 {
        return row.iter().copied().fold(0.0, f64::max);
    }
    let half_q = 0.5 * q;
    row.iter()
        .zip(grid.speed2())
        .map(|(val, s2)| pow_halfexp(*s2, half_q) * val)
        .fold(0.0, f64::max)
}

/// `N_q` over all spatial cells.
pub fn weighted_sup_global(f: &DistributionField, grid: &PhaseGrid, q: f64) -> f64 {
    (0..f.n_cells())
        .map(|c| weighted_sup(f, grid, q, c))
        .fold(0.0, f64::max)
}

/// Entropy functional `H = ∫∫ (f1 ln f1 + f2 ln f2) dv dx` with the
/// convention `0 ln 0 = 0`.
pub fn entropy(f1: &DistributionField, f2: &DistributionField, grid: &PhaseGrid) -> f64 {
    let mut acc = Neumaier::default();
    let w = grid.weights()[0];
    let dx = grid.dx();
    for f in [f1, f2] {
        for c in 0..f.n_cells() {
            let mut cell_acc = Neumaier::default();
            for &val in f.cell(c) {
                if val > 0.0 {
                    cell_acc.add(val * val.ln());
                }
            }
            acc.add(cell_acc.value() * w * dx);
        }
    }
    acc.value()
}

/// Weighted-L1 distance `∫∫ (1 + |v|^2) |f - g| dv dx`.
pub fn weighted_l1_distance(
    f: &DistributionField,
    g: &DistributionField,
    grid: &PhaseGrid,
) -> Result<f64> {
    f.same_shape(g)?;
    if f.n_cells() != grid.n_cells() || f.n_nodes() != grid.n_nodes() {
        return Err(KineticError::Dimension(
            "field shape does not match grid".to_string(),
        ));
    }
    let w = grid.weights()[0];
    let dx = grid.dx();
    let mut acc = Neumaier::default();
    for c in 0..f.n_cells() {
        let mut cell_acc = Neumaier::default();
        for ((a, b), s2) in f.cell(c).iter().zip(g.cell(c)).zip(grid.speed2()) {
            cell_acc.add((1.0 + s2) * (a - b).abs());
        }
        acc.add(cell_acc.value() * w * dx);
    }
    Ok(acc.value())
}
