//! Lattice symmetries of the ring and the fully symmetric sector.
//!
//! `X` is the cyclic shift with `X† σ^(k) X = σ^(k+1)`, i.e. it moves the
//! content of site `k + 1` onto site `k`; `R` is the reflection with
//! `R† σ^(k) R = σ^(L−k+1)`. Both permute computational basis states and act
//! identically in the lab and rotated frames, because the frame rotation is
//! the same on every site.
//!
//! The simultaneous `+1` eigenspace of `X` and `R` is spanned by the uniform
//! superpositions over dihedral orbits of basis configurations, one vector per
//! orbit.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::basis::{site_mask, Frame, StateVector};
use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::spin::{check_cap, DEFAULT_ED_CAP};

/// Image of basis index `i` under the cyclic shift `X`.
pub fn shift_index(i: usize, sites: usize) -> usize {
    // new site k holds old site k+1: bit j <- bit j+1, bit L-1 <- bit 0
    let low = i & 1;
    (i >> 1) | (low << (sites - 1))
}

/// Image of basis index `i` under the reflection `R`.
pub fn reflect_index(i: usize, sites: usize) -> usize {
    (1..=sites)
        .filter(|&k| i & site_mask(k) != 0)
        .map(|k| site_mask(sites - k + 1))
        .sum()
}

/// The permutation matrices `(X, R)`.
pub fn symmetry_operators(sites: usize, frame: Frame) -> Result<(OperatorMatrix, OperatorMatrix)> {
    check_cap("symmetry operators", sites, DEFAULT_ED_CAP)?;
    let dim = 1usize << sites;
    Ok((
        OperatorMatrix::permutation(dim, frame, |i| shift_index(i, sites)),
        OperatorMatrix::permutation(dim, frame, |i| reflect_index(i, sites)),
    ))
}

/// Smallest index in the dihedral orbit of `i`.
pub fn canonical_representative(i: usize, sites: usize) -> usize {
    let mut best = i;
    let mut cur = i;
    for _ in 0..sites {
        best = best.min(cur).min(reflect_index(cur, sites));
        cur = shift_index(cur, sites);
    }
    best
}

/// The fully symmetric subspace, represented by its dihedral orbits.
#[derive(Clone, Debug)]
pub struct SymmetrySector {
    sites: usize,
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
}

/// Build the fully symmetric sector of an `sites`-site ring.
pub fn symmetric_sector(sites: usize) -> Result<SymmetrySector> {
    if sites == 0 {
        return Err(Error::validation("ring needs at least one site"));
    }
    check_cap("symmetric sector", sites, DEFAULT_ED_CAP)?;
    let dim = 1usize << sites;
    let mut orbit_of = vec![usize::MAX; dim];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..dim {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = Vec::new();
        let mut cur = i;
        for _ in 0..sites {
            for img in [cur, reflect_index(cur, sites)] {
                if orbit_of[img] == usize::MAX {
                    orbit_of[img] = id;
                    members.push(img);
                }
            }
            cur = shift_index(cur, sites);
        }
        members.sort_unstable();
        orbits.push(members);
    }
    Ok(SymmetrySector {
        sites,
        orbits,
        orbit_of,
    })
}

impl SymmetrySector {
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Dimension of the sector = number of dihedral orbits.
    pub fn rank(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    /// Orbit index containing basis state `i`.
    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbit_of[i]
    }

    /// Normalized uniform superposition over orbit `o`.
    pub fn basis_vector(&self, o: usize, frame: Frame) -> StateVector {
        let members = &self.orbits[o];
        let a = C64::new(1.0 / (members.len() as f64).sqrt(), 0.0);
        let mut amps = vec![C64::new(0.0, 0.0); 1 << self.sites];
        for &m in members {
            amps[m] = a;
        }
        StateVector::from_amplitudes(self.sites, frame, amps).expect("dimension fixed by construction")
    }

    pub fn orthonormal_basis(&self, frame: Frame) -> Vec<StateVector> {
        (0..self.rank()).map(|o| self.basis_vector(o, frame)).collect()
    }

    /// The orthogonal projector onto the sector, `Σ_o |o⟩⟨o|`.
    pub fn projector(&self, frame: Frame) -> OperatorMatrix {
        let entries = self.orbits.iter().flat_map(|members| {
            let w = C64::new(1.0 / members.len() as f64, 0.0);
            members
                .iter()
                .flat_map(move |&i| members.iter().map(move |&j| (i, j, w)))
        });
        OperatorMatrix::from_triplets(1 << self.sites, frame, entries)
            .into_hermitian()
            .expect("orbit projector is real symmetric")
    }

    /// Sector coordinates `⟨o|ψ⟩`.
    pub fn coefficients(&self, psi: &StateVector) -> Result<Vec<C64>> {
        if psi.sites() != self.sites {
            return Err(Error::Dimension {
                expected: 1 << self.sites,
                found: psi.dim(),
            });
        }
        let amps = psi.amplitudes();
        Ok(self
            .orbits
            .iter()
            .map(|members| {
                let s: C64 = members.iter().map(|&m| amps[m]).sum();
                s / (members.len() as f64).sqrt()
            })
            .collect())
    }

    /// Embed sector coordinates back into the full space.
    pub fn embed(&self, coeffs: &[C64], frame: Frame) -> Result<StateVector> {
        if coeffs.len() != self.rank() {
            return Err(Error::Dimension {
                expected: self.rank(),
                found: coeffs.len(),
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << self.sites];
        for (members, c) in self.orbits.iter().zip(coeffs) {
            let a = c / (members.len() as f64).sqrt();
            for &m in members {
                amps[m] = a;
            }
        }
        StateVector::from_amplitudes(self.sites, frame, amps)
    }

    /// Weight of `psi` inside the sector, `‖Pψ‖²`.
    pub fn population(&self, psi: &StateVector) -> Result<f64> {
        Ok(self.coefficients(psi)?.iter().map(|c| c.norm_sqr()).sum())
    }

    /// Compression `B† M B` of an operator onto the sector.
    pub fn block(&self, op: &OperatorMatrix) -> Result<DMatrix<C64>> {
        if op.dim() != 1 << self.sites {
            return Err(Error::Dimension {
                expected: 1 << self.sites,
                found: op.dim(),
            });
        }
        let r = self.rank();
        let size: Vec<f64> = self.orbits.iter().map(|m| m.len() as f64).collect();
        let mut b = DMatrix::zeros(r, r);
        for (i, j, v) in op.triplets() {
            let (a, c) = (self.orbit_of[i], self.orbit_of[j]);
            b[(a, c)] += v / (size[a] * size[c]).sqrt();
        }
        Ok(b)
    }

    /// Real part of [`block`](Self::block) for real operators.
    pub fn block_real(&self, op: &OperatorMatrix) -> Result<DMatrix<f64>> {
        let b = self.block(op)?;
        if b.iter().any(|v| v.im != 0.0) {
            return Err(Error::validation("operator has complex entries"));
        }
        Ok(b.map(|v| v.re))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent orbit count: Burnside's lemma over the dihedral group,
    /// counting fixed configurations of each group element by brute force.
    fn burnside(sites: usize) -> usize {
        let dim = 1usize << sites;
        let rotate = |i: usize, r: usize| -> usize {
            (0..sites)
                .filter(|b| i >> b & 1 == 1)
                .map(|b| 1 << ((b + r) % sites))
                .sum()
        };
        let flip = |i: usize| -> usize {
            (0..sites)
                .filter(|b| i >> b & 1 == 1)
                .map(|b| 1 << (sites - 1 - b))
                .sum()
        };
        let mut fixed = 0;
        for r in 0..sites {
            for i in 0..dim {
                if rotate(i, r) == i {
                    fixed += 1;
                }
                if flip(rotate(i, r)) == i {
                    fixed += 1;
                }
            }
        }
        fixed / (2 * sites)
    }

    #[test]
    fn burnside_oracle_reference_values() {
        // Binary bracelets, OEIS A000029.
        assert_eq!(burnside(2), 3);
        assert_eq!(burnside(3), 4);
        assert_eq!(burnside(10), 78);
    }

    #[test]
    fn rank_equals_orbit_count() {
        for l in 2..=10 {
            assert_eq!(symmetric_sector(l).unwrap().rank(), burnside(l), "L = {l}");
        }
    }

    #[test]
    fn shift_has_order_l_and_reflection_is_involution() {
        for l in 2..=7 {
            for i in 0..1usize << l {
                let mut j = i;
                for _ in 0..l {
                    j = shift_index(j, l);
                }
                assert_eq!(j, i);
                assert_eq!(reflect_index(reflect_index(i, l), l), i);
            }
        }
    }

    #[test]
    fn shift_on_three_sites() {
        // X|b1 b2 b3⟩ = |b2 b3 b1⟩, i.e. X† maps (b1 b2 b3) to (b3 b1 b2).
        let l = 3;
        let pattern = |b: [usize; 3]| b[0] | b[1] << 1 | b[2] << 2;
        assert_eq!(shift_index(pattern([1, 0, 0]), l), pattern([0, 0, 1]));
        assert_eq!(shift_index(pattern([1, 1, 0]), l), pattern([1, 0, 1]));
        let (x, _) = symmetry_operators(l, Frame::Lab).unwrap();
        let x3 = x.matmul(&x).unwrap().matmul(&x).unwrap();
        assert!(x3.max_abs_diff(&OperatorMatrix::identity(8, Frame::Lab)).unwrap() < 1e-15);
    }

    #[test]
    fn projector_algebra() {
        let s = symmetric_sector(5).unwrap();
        let p = s.projector(Frame::Lab);
        let (x, r) = symmetry_operators(5, Frame::Lab).unwrap();
        assert!(p.matmul(&p).unwrap().max_abs_diff(&p).unwrap() < 1e-12);
        assert!(p.max_abs_diff(&p.adjoint()).unwrap() < 1e-15);
        assert!(p.matmul(&x).unwrap().max_abs_diff(&p).unwrap() < 1e-12);
        assert!(x.matmul(&p).unwrap().max_abs_diff(&p).unwrap() < 1e-12);
        assert!(r.matmul(&p).unwrap().max_abs_diff(&p).unwrap() < 1e-12);
    }

    #[test]
    fn coefficients_round_trip_inside_sector() {
        let s = symmetric_sector(6).unwrap();
        let coeffs: Vec<C64> = (0..s.rank()).map(|i| C64::new(i as f64, 1.0)).collect();
        let psi = s.embed(&coeffs, Frame::Rotated).unwrap();
        let back = s.coefficients(&psi).unwrap();
        for (a, b) in coeffs.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
