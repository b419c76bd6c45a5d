//! Jordan-Wigner fermion operators as explicit matrices (rotated frame).
//!
//! `c_k = exp(iπ Σ_(j<k) σ_+^(j)σ_-^(j)) σ_-^(k)`; the string is the sign
//! `(−1)^(number of |+⟩ sites left of k)`.

use num_complex::Complex64 as C64;

use super::Parity;
use crate::basis::{excitation_count, site_mask, Frame};
use crate::error::Result;
use crate::operator::OperatorMatrix;
use crate::params::SystemParams;
use crate::spin::{check_cap, next_site};

/// Largest ring for which Jordan-Wigner matrices are built.
pub const JW_CAP: usize = 10;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `c_k` on an `sites`-site ring.
pub fn annihilation(sites: usize, k: usize) -> OperatorMatrix {
    let dim = 1usize << sites;
    let m = site_mask(k);
    let below = m - 1;
    let entries = (0..dim).filter(move |i| i & m != 0).map(move |i| {
        let sign = if (i & below).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        (i ^ m, i, re(sign))
    });
    OperatorMatrix::from_triplets(dim, Frame::Rotated, entries)
}

/// `(c_k, c†_k)` for `k = 1..=L`.
pub fn jw_operators(sites: usize) -> Result<Vec<(OperatorMatrix, OperatorMatrix)>> {
    check_cap("Jordan-Wigner operators", sites, JW_CAP)?;
    Ok((1..=sites)
        .map(|k| {
            let c = annihilation(sites, k);
            let cd = c.adjoint();
            (c, cd)
        })
        .collect())
}

/// `n_+ = Σ_k c†_k c_k`, the number of `|+⟩` sites.
pub fn number_operator(sites: usize) -> OperatorMatrix {
    OperatorMatrix::diagonal(1 << sites, Frame::Rotated, |i| excitation_count(i) as f64)
}

/// `exp(iπ n_+)`.
pub fn parity_operator(sites: usize) -> OperatorMatrix {
    OperatorMatrix::diagonal(1 << sites, Frame::Rotated, |i| {
        if excitation_count(i).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    })
}

/// `η†_(p,n) = L^(−1/2) Σ_k exp(iα_n k) c†_k`.
pub fn eta_dagger(sites: usize, parity: Parity, n: usize) -> Result<OperatorMatrix> {
    check_cap("mode operators", sites, JW_CAP)?;
    let alpha = parity.momentum(n, sites);
    let norm = 1.0 / (sites as f64).sqrt();
    let dim = 1usize << sites;
    let mut acc = OperatorMatrix::zeros(dim, Frame::Rotated);
    for k in 1..=sites {
        let phase = C64::from_polar(norm, alpha * k as f64);
        acc = acc.add_scaled(&annihilation(sites, k).adjoint(), phase)?;
    }
    Ok(acc)
}

/// `H_0`: the ring's fermion Hamiltonian with the bond `L → 1` closed
/// periodically, ignoring the Jordan-Wigner string it actually carries.
pub fn string_free_hamiltonian(params: &SystemParams) -> Result<OperatorMatrix> {
    let l = params.sites();
    check_cap("fermion Hamiltonian", l, JW_CAP)?;
    let dim = 1usize << l;
    let ops = jw_operators(l)?;
    let half = OperatorMatrix::identity(dim, Frame::Rotated).scale(re(0.5));
    let mut h = OperatorMatrix::zeros(dim, Frame::Rotated);
    for k in 1..=l {
        let (c, cd) = &ops[k - 1];
        let (cn, cdn) = &ops[next_site(k, l) - 1];
        let n_k = cd.matmul(c)?.sub(&half)?;
        h = h.add_scaled(&n_k, re(2.0 * params.rabi(k)))?;
        let hop = cd.matmul(cn)?.sub(&c.matmul(cdn)?)?;
        h = h.add_scaled(&hop, re(params.beta() / 4.0))?;
    }
    h.into_hermitian()
}

/// `H_b = −(β/4)(c†_L c_1 − c_L c†_1)(exp(iπ n_+) + 1)`.
pub fn boundary_term(params: &SystemParams) -> Result<OperatorMatrix> {
    let l = params.sites();
    check_cap("boundary term", l, JW_CAP)?;
    let dim = 1usize << l;
    let c1 = annihilation(l, 1);
    let cl = annihilation(l, l);
    let bond = cl.adjoint().matmul(&c1)?.sub(&cl.matmul(&c1.adjoint())?)?;
    let parity_plus_one = parity_operator(l).add(&OperatorMatrix::identity(dim, Frame::Rotated))?;
    Ok(bond.matmul(&parity_plus_one)?.scale(re(-params.beta() / 4.0)))
}
