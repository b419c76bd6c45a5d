//! Full many-body spectrum of `H_xy` from the free-fermion modes, and a
//! cross-check against exact diagonalization.

use super::{mode_set, Parity};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::spin::{build_h_xy, check_cap};

/// Largest allowed deviation between the two spectra.
pub const ORACLE_TOL: f64 = 1e-9;

/// Largest ring for which the dense oracle comparison runs.
const ORACLE_CAP: usize = 12;

/// All `2^L` eigenvalues of `H_xy`, ascending: every odd-size subset of the
/// periodic modes and every even-size subset of the antiperiodic ones.
pub fn free_fermion_spectrum(params: &SystemParams) -> Result<Vec<f64>> {
    let l = params.sites();
    check_cap("free-fermion spectrum", l, 24)?;
    let mut out = Vec::with_capacity(1 << l);
    for parity in [Parity::Odd, Parity::Even] {
        let set = mode_set(params, parity)?;
        let want_odd = parity == Parity::Odd;
        for subset in 0usize..1 << l {
            if (subset.count_ones() % 2 == 1) != want_odd {
                continue;
            }
            let e: f64 = (0..l)
                .filter(|b| subset >> b & 1 == 1)
                .map(|b| set.modes[b].energy)
                .sum();
            out.push(set.ground_energy + e);
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct EdOracleReport {
    pub max_deviation: f64,
    pub ed: Vec<f64>,
    pub fermion: Vec<f64>,
}

/// Diagonalizes `H_xy` densely and compares with [`free_fermion_spectrum`].
/// Deviations above [`ORACLE_TOL`] are reported as [`Error::Oracle`].
pub fn validate_against_ed(params: &SystemParams) -> Result<EdOracleReport> {
    check_cap("oracle diagonalization", params.sites(), ORACLE_CAP)?;
    let fermion = free_fermion_spectrum(params)?;
    let ed = build_h_xy(params).eigenvalues()?;
    let max_deviation = ed.iter().zip(&fermion).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if max_deviation > ORACLE_TOL {
        return Err(Error::Oracle(format!(
            "free-fermion and exact spectra differ by {max_deviation:.3e} (L = {})",
            params.sites()
        )));
    }
    Ok(EdOracleReport {
        max_deviation,
        ed,
        fermion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_exact_diagonalization() {
        for (l, omega) in [(4, 5.0), (5, 1.0), (8, 10.0)] {
            let p = SystemParams::clean(l, 1.0, omega, 0.0).unwrap();
            let r = validate_against_ed(&p).unwrap();
            assert_eq!(r.ed.len(), 1 << l);
            assert!(r.max_deviation < ORACLE_TOL);
        }
    }

    #[test]
    fn zero_interaction_gives_binomial_ladder() {
        let p = SystemParams::clean(4, 0.0, 1.5, 0.0).unwrap();
        let s = free_fermion_spectrum(&p).unwrap();
        // −LΩ + 2Ωm with multiplicity C(4, m)
        let mut want = Vec::new();
        for m in 0..=4usize {
            let c = [1, 4, 6, 4, 1][m];
            want.extend(std::iter::repeat_n(-6.0 + 3.0 * m as f64, c));
        }
        for (a, b) in s.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn disordered_ring_is_rejected() {
        let p = SystemParams::new(3, 1.0, 1.0, 0.0, vec![1, 2, 3]).unwrap();
        assert!(free_fermion_spectrum(&p).is_err());
    }
}
