//! Exact counts of stabilizer groups and the mass check that certifies an
//! enumeration: summing `6^n n! / |Aut|` over the classes of one `(n, k)`
//! cell must give the number of groups in that cell.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("k = {k} exceeds n = {n}")]
    KTooLarge { n: usize, k: usize },
    #[error("automorphism group order {aut} does not divide 6^{n} {n}!")]
    NotDivisor { n: usize, aut: BigUint },
    #[error("automorphism group order is zero")]
    ZeroAut,
}

/// Gaussian binomial coefficient `[n k]_2`.
pub fn gaussian_coeff(n: usize, k: usize) -> Result<BigUint, VerifyError> {
    if k > n {
        return Err(VerifyError::KTooLarge { n, k });
    }
    let two = BigUint::from(2u32);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= two.pow((n - i) as u32) - 1u32;
        den *= two.pow((k - i) as u32) - 1u32;
    }
    Ok(num / den)
}

/// Number of stabilizer groups on `n` qubits with `n - k` generators,
/// modulo phases.
pub fn nlp_count(n: usize, k: usize) -> Result<BigUint, VerifyError> {
    let mut out = gaussian_coeff(n, k)?;
    let two = BigUint::from(2u32);
    for i in 0..n - k {
        out *= two.pow((n - i) as u32) + 1u32;
    }
    Ok(out)
}

/// `6^n n!`, the order of the group of local Cliffords and qubit
/// permutations (modulo phases).
pub fn lc_perm_order(n: usize) -> BigUint {
    let mut out = BigUint::from(6u32).pow(n as u32);
    for i in 2..=n {
        out *= BigUint::from(i);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassCheck {
    pub n: usize,
    pub k: usize,
    pub lhs: BigUint,
    pub rhs: BigUint,
}

impl MassCheck {
    pub fn ok(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Sums orbit sizes `6^n n! / |Aut|` and compares with [`nlp_count`].
pub fn mass_check<'a, I>(aut_sizes: I, n: usize, k: usize) -> Result<MassCheck, VerifyError>
where
    I: IntoIterator<Item = &'a BigUint>,
{
    let order = lc_perm_order(n);
    let mut lhs = BigUint::zero();
    for aut in aut_sizes {
        if aut.is_zero() {
            return Err(VerifyError::ZeroAut);
        }
        if !(&order % aut).is_zero() {
            return Err(VerifyError::NotDivisor { n, aut: aut.clone() });
        }
        lhs += &order / aut;
    }
    Ok(MassCheck { n, k, lhs, rhs: nlp_count(n, k)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::BitMatrix;
    use crate::pauli::symplectic_word;
    use std::collections::BTreeSet;

    fn brute_subspaces(n: usize, k: usize) -> usize {
        // every k-subset of vectors spanning a k-dim space, canonicalized
        let mut spaces = BTreeSet::new();
        let vecs: Vec<u64> = (1..1u64 << n).collect();
        fn rec(n: usize, k: usize, start: usize, vecs: &[u64], cur: &mut Vec<u64>, out: &mut BTreeSet<Vec<u64>>) {
            if cur.len() == k {
                let m = BitMatrix::from_words(n, cur.iter().copied());
                if m.rank() == k {
                    out.insert(m.rref().reduced.words().to_vec());
                }
                return;
            }
            for i in start..vecs.len() {
                cur.push(vecs[i]);
                rec(n, k, i + 1, vecs, cur, out);
                cur.pop();
            }
        }
        rec(n, k, 0, &vecs, &mut Vec::new(), &mut spaces);
        spaces.len().max(usize::from(k == 0))
    }

    #[test]
    fn gaussian_examples() {
        assert_eq!(gaussian_coeff(5, 0).unwrap(), BigUint::one());
        assert_eq!(gaussian_coeff(2, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(gaussian_coeff(4, 2).unwrap(), BigUint::from(35u32));
        assert!(gaussian_coeff(2, 3).is_err());
        for n in 1..=4 {
            for k in 0..=n {
                assert_eq!(gaussian_coeff(n, k).unwrap(), BigUint::from(brute_subspaces(n, k)), "{n} {k}");
            }
        }
    }

    /// Counts isotropic subspaces of dimension `n - k` in F2^{2n} directly.
    fn brute_groups(n: usize, k: usize) -> usize {
        let r = n - k;
        let mut groups = BTreeSet::new();
        let all: Vec<u64> = (1..1u64 << (2 * n)).collect();
        fn rec(n: usize, r: usize, start: usize, all: &[u64], cur: &mut Vec<u64>, out: &mut BTreeSet<Vec<u64>>) {
            if cur.len() == r {
                let m = BitMatrix::from_words(2 * n, cur.iter().copied());
                if m.rank() == r {
                    out.insert(m.rref().reduced.words().to_vec());
                }
                return;
            }
            for i in start..all.len() {
                if cur.iter().all(|&c| !symplectic_word(c, all[i], n)) {
                    cur.push(all[i]);
                    rec(n, r, i + 1, all, cur, out);
                    cur.pop();
                }
            }
        }
        rec(n, r, 0, &all, &mut Vec::new(), &mut groups);
        groups.len().max(usize::from(r == 0))
    }

    #[test]
    fn nlp_examples() {
        assert_eq!(nlp_count(3, 3).unwrap(), BigUint::one());
        assert_eq!(nlp_count(1, 0).unwrap(), BigUint::from(3u32));
        assert_eq!(nlp_count(2, 1).unwrap(), BigUint::from(15u32));
        for n in 1..=2 {
            for k in 0..=n {
                assert_eq!(nlp_count(n, k).unwrap(), BigUint::from(brute_groups(n, k)), "{n} {k}");
            }
        }
    }

    #[test]
    fn mass_examples() {
        let c = mass_check([&BigUint::from(2u32)], 1, 0).unwrap();
        assert!(c.ok());
        assert_eq!(c.lhs, BigUint::from(3u32));
        assert!(mass_check([&BigUint::from(6u32)], 1, 1).unwrap().ok());
        assert!(!mass_check([&BigUint::from(6u32)], 1, 0).unwrap().ok());
        assert_eq!(
            mass_check([&BigUint::from(5u32)], 1, 0),
            Err(VerifyError::NotDivisor { n: 1, aut: BigUint::from(5u32) })
        );
        assert_eq!(lc_perm_order(3), BigUint::from(216u32 * 6));
    }
}
