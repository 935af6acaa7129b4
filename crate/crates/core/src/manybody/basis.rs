//! Symmetric N-boson occupation basis on M lattice sites.
//!
//! Occupation vectors (n_1, ..., n_M) with sum N are enumerated in
//! colexicographic order: vectors compare at the last site where they
//! differ, so the highest site index is the most significant digit.
//! Ranking and unranking are exact combinatorial bijections.

use super::ManyBodyError;

/// Hard ceiling on basis dimension unless the caller raises it.
pub const DEFAULT_BASIS_CAP: usize = 1_000_000;

/// Number of occupation vectors of m sites summing to n: C(n+m-1, n).
pub fn dimension_of(n_particles: usize, sites: usize) -> u128 {
    binomial_u128(n_particles as u128 + sites as u128 - 1, n_particles as u128)
}

fn binomial_u128(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[derive(Debug)]
pub struct SymmetricBasis {
    n_particles: usize,
    sites: usize,
    dim: usize,
    /// Row-major occupation vectors, `dim * sites` entries.
    occupations: Vec<u8>,
    /// counts[n][m] = number of vectors with total n over m sites.
    counts: Vec<Vec<u64>>,
}

impl SymmetricBasis {
    pub fn new(n_particles: usize, sites: usize) -> Result<Self, ManyBodyError> {
        Self::with_cap(n_particles, sites, DEFAULT_BASIS_CAP)
    }

    pub fn with_cap(n_particles: usize, sites: usize, cap: usize) -> Result<Self, ManyBodyError> {
        if sites == 0 || n_particles == 0 || n_particles > u8::MAX as usize {
            return Err(ManyBodyError::BadBasisShape { n_particles, sites });
        }
        let dim_wide = dimension_of(n_particles, sites);
        if dim_wide > cap as u128 {
            return Err(ManyBodyError::BasisCapExceeded { dimension: dim_wide, cap });
        }
        let dim = dim_wide as usize;

        let mut counts = vec![vec![0u64; sites + 1]; n_particles + 1];
        for n in 0..=n_particles {
            for m in 0..=sites {
                counts[n][m] = dimension_of(n, m).min(u64::MAX as u128) as u64;
            }
        }
        // counts[0][0] must be 1 (the empty distribution)
        counts[0][0] = 1;

        let mut occupations = vec![0u8; dim * sites];
        let mut current = vec![0u8; sites];
        let mut row = 0usize;
        enumerate_colex(n_particles, sites, &mut current, &mut occupations, &mut row, sites);
        debug_assert_eq!(row, dim);

        Ok(Self { n_particles, sites, dim, occupations, counts })
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn occupation(&self, index: usize) -> &[u8] {
        &self.occupations[index * self.sites..(index + 1) * self.sites]
    }

    /// Colexicographic rank of an occupation vector.
    pub fn rank(&self, occupation: &[u8]) -> usize {
        debug_assert_eq!(occupation.len(), self.sites);
        let mut rank = 0u64;
        let mut remaining = self.n_particles;
        for site in (0..self.sites).rev() {
            let occ = occupation[site] as usize;
            for c in 0..occ {
                rank += self.count(remaining - c, site);
            }
            remaining -= occ;
        }
        rank as usize
    }

    /// Vectors with total `n` over the lowest `m` sites.
    fn count(&self, n: usize, m: usize) -> u64 {
        self.counts[n][m]
    }
}

/// Fill rows in colex order: the last site runs slowest and ascends.
fn enumerate_colex(
    remaining: usize,
    site_count: usize,
    current: &mut Vec<u8>,
    out: &mut [u8],
    row: &mut usize,
    total_sites: usize,
) {
    if site_count == 1 {
        current[0] = remaining as u8;
        let base = *row * total_sites;
        out[base..base + total_sites].copy_from_slice(current);
        *row += 1;
        return;
    }
    for top in 0..=remaining {
        current[site_count - 1] = top as u8;
        enumerate_colex(remaining - top, site_count - 1, current, out, row, total_sites);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_particle_dimension_is_m() {
        let b = SymmetricBasis::new(1, 7).unwrap();
        assert_eq!(b.dim(), 7);
    }

    #[test]
    fn two_bosons_two_sites_is_three_states() {
        let b = SymmetricBasis::new(2, 2).unwrap();
        assert_eq!(b.dim(), 3);
        assert_eq!(b.occupation(0), &[2, 0]);
        assert_eq!(b.occupation(1), &[1, 1]);
        assert_eq!(b.occupation(2), &[0, 2]);
    }

    #[test]
    fn three_bosons_four_sites_is_twenty_states() {
        // independent combinatorial count C(6,3) = 20
        fn comb(n: u64, k: u64) -> u64 {
            let mut acc = 1u64;
            for i in 0..k {
                acc = acc * (n - i) / (i + 1);
            }
            acc
        }
        assert_eq!(comb(6, 3), 20);
        let b = SymmetricBasis::new(3, 4).unwrap();
        assert_eq!(b.dim(), 20);
    }

    #[test]
    fn rank_and_unrank_are_a_bijection() {
        for &(n, m) in &[(3usize, 4usize), (4, 5), (2, 8), (5, 3)] {
            let b = SymmetricBasis::new(n, m).unwrap();
            for idx in 0..b.dim() {
                let occ = b.occupation(idx).to_vec();
                assert_eq!(occ.iter().map(|&x| x as usize).sum::<usize>(), n);
                assert_eq!(b.rank(&occ), idx, "occ {occ:?}");
            }
        }
    }

    #[test]
    fn enumeration_is_colex_sorted_and_duplicate_free() {
        let b = SymmetricBasis::new(4, 5).unwrap();
        for idx in 1..b.dim() {
            let prev = b.occupation(idx - 1);
            let cur = b.occupation(idx);
            // colex: at the last differing site, prev < cur
            let mut site = b.sites();
            while site > 0 {
                site -= 1;
                if prev[site] != cur[site] {
                    assert!(prev[site] < cur[site], "not colex at {idx}");
                    break;
                }
            }
            assert_ne!(prev, cur);
        }
    }

    #[test]
    fn cap_violation_reports_dimension() {
        let err = SymmetricBasis::with_cap(16, 24, DEFAULT_BASIS_CAP);
        match err {
            Err(ManyBodyError::BasisCapExceeded { dimension, cap }) => {
                assert_eq!(dimension, 37_711_260_990u128);
                assert_eq!(cap, DEFAULT_BASIS_CAP);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }
}
