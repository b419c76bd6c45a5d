//! Eigenvalue curves of the symmetric block of `H_spin` along a Rabi-frequency
//! sweep.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh_real, Eigh};
use crate::params::SystemParams;
use crate::spin::build_h_spin;
use crate::symmetry::SymmetrySector;

/// Gap below which neighbouring levels are associated by eigenvector overlap
/// instead of sorted order.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// How the detuning moves along the sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetuningPath {
    /// `Δ = Δ₀` at every grid point.
    Fixed(f64),
    /// One detuning per grid point.
    Tabulated(Vec<f64>),
}

impl DetuningPath {
    fn at(&self, idx: usize) -> f64 {
        match self {
            DetuningPath::Fixed(d) => *d,
            DetuningPath::Tabulated(v) => v[idx],
        }
    }
}

/// Continuous eigenvalue curves over the grid.
#[derive(Clone, Debug)]
pub struct SpectralFlow {
    /// Swept single-atom Rabi frequencies `Ω₀` (equal to `Ω` for unit occupations).
    pub omegas: Vec<f64>,
    /// `curves[c][g]`: energy of curve `c` at grid point `g`.
    pub curves: Vec<Vec<f64>>,
    /// Curve that starts on the no-Rydberg state `|0⟩`.
    pub vacuum_curve: usize,
}

impl SpectralFlow {
    /// Sorted position of curve `c` at grid point `g` (0 = ground).
    pub fn level_index(&self, c: usize, g: usize) -> usize {
        let e = self.curves[c][g];
        self.curves.iter().filter(|other| other[g] < e).count()
    }

    /// Whether the `|0⟩` curve is the lowest level at every grid point.
    pub fn vacuum_stays_ground(&self) -> bool {
        (0..self.omegas.len()).all(|g| self.level_index(self.vacuum_curve, g) == 0)
    }

    /// Distance from curve `c` to its nearest neighbour at each grid point.
    pub fn gaps(&self, c: usize) -> Vec<f64> {
        (0..self.omegas.len())
            .map(|g| {
                let e = self.curves[c][g];
                self.curves
                    .iter()
                    .enumerate()
                    .filter(|&(o, _)| o != c)
                    .map(|(_, other)| (other[g] - e).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// Smallest gap of the `|0⟩` curve along the sweep, excluding the first
    /// grid point (where `Ω = 0` levels may be exactly degenerate).
    pub fn vacuum_min_gap(&self) -> f64 {
        self.gaps(self.vacuum_curve)
            .into_iter()
            .skip(1)
            .fold(f64::INFINITY, f64::min)
    }

    /// Number of interior local minima of the `|0⟩`-curve gap below `threshold`.
    pub fn vacuum_avoided_crossings(&self, threshold: f64) -> usize {
        let gaps = self.gaps(self.vacuum_curve);
        gaps.windows(3)
            .filter(|w| w[1] < threshold && w[1] <= w[0] && w[1] <= w[2])
            .count()
    }
}

fn sector_eigh(base: &SystemParams, omega0: f64, delta: f64, sector: &SymmetrySector) -> Result<Eigh<f64>> {
    let p = base.with_omega0(omega0)?.with_delta(delta)?;
    let h = build_h_spin(&p)?;
    Ok(eigh_real(sector.block_real(&h)?))
}

/// Column permutation `perm[c_prev] = c_next` matching eigenvectors of
/// adjacent grid points. Levels are associated in sorted order except inside
/// clusters closer than [`DEGENERACY_TOL`], where the largest overlaps win.
fn associate(prev: &Eigh<f64>, next: &Eigh<f64>) -> Vec<usize> {
    let n = next.values.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && next.values[end] - next.values[end - 1] < DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            let overlap = |a: usize, b: usize| -> f64 { prev.vectors.column(a).dot(&next.vectors.column(b)).abs() };
            let mut free: Vec<usize> = (start..end).collect();
            #[allow(clippy::needless_range_loop)]
            for a in start..end {
                let (pos, _) = free
                    .iter()
                    .enumerate()
                    .map(|(pos, &b)| (pos, overlap(a, b)))
                    .max_by(|x, y| x.1.total_cmp(&y.1))
                    .expect("cluster not empty");
                perm[a] = free.swap_remove(pos);
            }
        }
        start = end;
    }
    perm
}

/// Eigenvalue curves of the symmetric block of `H_spin` for each `Ω₀` in
/// `omega_grid` (ascending). Grid points are diagonalized in parallel.
pub fn spectral_flow(
    base: &SystemParams,
    omega_grid: &[f64],
    sector: &SymmetrySector,
    detuning: &DetuningPath,
) -> Result<SpectralFlow> {
    if omega_grid.is_empty() {
        return Err(Error::validation("empty Rabi-frequency grid"));
    }
    if omega_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::validation("Rabi-frequency grid must be sorted ascending"));
    }
    if let DetuningPath::Tabulated(v) = detuning {
        if v.len() != omega_grid.len() {
            return Err(Error::Dimension {
                expected: omega_grid.len(),
                found: v.len(),
            });
        }
    }
    if sector.sites() != base.sites() {
        return Err(Error::validation("sector and parameters describe different rings"));
    }

    let solved: Vec<Eigh<f64>> = omega_grid
        .par_iter()
        .enumerate()
        .map(|(g, &w)| sector_eigh(base, w, detuning.at(g), sector))
        .collect::<Result<_>>()?;

    let n = sector.rank();
    // column of curve c at the current grid point
    let mut column: Vec<usize> = (0..n).collect();
    let mut curves = vec![Vec::with_capacity(omega_grid.len()); n];

    // |0⟩ is the single-member orbit of basis index 0
    let vac_orbit = sector.orbit_of(0);
    let vacuum_curve = (0..n)
        .max_by(|&a, &b| {
            solved[0].vectors[(vac_orbit, a)]
                .abs()
                .total_cmp(&solved[0].vectors[(vac_orbit, b)].abs())
        })
        .expect("sector not empty");

    for (g, eig) in solved.iter().enumerate() {
        if g > 0 {
            let perm = associate(&solved[g - 1], eig);
            column.iter_mut().for_each(|c| *c = perm[*c]);
        }
        for (c, curve) in curves.iter_mut().enumerate() {
            curve.push(eig.values[column[c]]);
        }
    }

    Ok(SpectralFlow {
        omegas: omega_grid.to_vec(),
        curves,
        vacuum_curve,
    })
}

/// Ground-to-first-excited gap of the symmetric block at fixed parameters.
pub fn symmetric_gap(params: &SystemParams, sector: &SymmetrySector) -> Result<f64> {
    let h = build_h_spin(params)?;
    let values = eigh_real(sector.block_real(&h)?).values;
    if values.len() < 2 {
        return Err(Error::validation("sector has a single level"));
    }
    Ok(values[1] - values[0])
}

/// Dense symmetric block of `H_spin`, for callers that need eigenvectors.
pub fn symmetric_block(params: &SystemParams, sector: &SymmetrySector) -> Result<DMatrix<f64>> {
    sector.block_real(&build_h_spin(params)?)
}
