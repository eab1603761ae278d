//! Local Clifford and qubit permutation actions on stabilizer groups, and
//! the revised standard form used by the decomposition test.
//!
//! Modulo phases the single-qubit Clifford group acts on `{X, Y, Z}` as the
//! full symmetric group, so a local Clifford is stored as one letter
//! permutation per qubit. The six permutations are ordered
//! `I, H, S, R, R^-1, V`; that order is also the sweep order used by the
//! CSS and GF(4) representative searches.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::f2::{low_mask, BitMatrix};
use crate::pauli::{Letter, StabGroup};

/// Letter permutation on one qubit. Indices follow `I, H, S, R, R^-1, V`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LetterPerm(u8);

// Image of each letter code (I=0, X=1, Z=2, Y=3).
const LETTER_MAPS: [[u8; 4]; 6] = [
    [0, 1, 2, 3], // I    ()
    [0, 2, 1, 3], // H    (XZ)
    [0, 3, 2, 1], // S    (XY)
    [0, 3, 1, 2], // R    (XYZ)
    [0, 2, 3, 1], // R^-1 (ZYX)
    [0, 1, 3, 2], // V    (YZ)
];

const NAMES: [&str; 6] = ["I", "H", "S", "R", "Rinv", "V"];

impl LetterPerm {
    pub const IDENTITY: LetterPerm = LetterPerm(0);
    pub const H: LetterPerm = LetterPerm(1);
    pub const S: LetterPerm = LetterPerm(2);
    pub const R: LetterPerm = LetterPerm(3);
    pub const R_INV: LetterPerm = LetterPerm(4);
    pub const V: LetterPerm = LetterPerm(5);

    pub const ALL: [LetterPerm; 6] = [
        LetterPerm(0),
        LetterPerm(1),
        LetterPerm(2),
        LetterPerm(3),
        LetterPerm(4),
        LetterPerm(5),
    ];

    pub fn from_index(i: usize) -> Option<LetterPerm> {
        (i < 6).then_some(LetterPerm(i as u8))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn map_code(self, code: u8) -> u8 {
        LETTER_MAPS[self.0 as usize][code as usize]
    }

    #[inline]
    pub fn apply(self, l: Letter) -> Letter {
        Letter::from_code(self.map_code(l.code()))
    }

    fn from_map(map: [u8; 4]) -> LetterPerm {
        let i = LETTER_MAPS.iter().position(|m| *m == map).expect("not a letter permutation");
        LetterPerm(i as u8)
    }

    /// The permutation taking `X -> x_image` and `Z -> z_image`.
    pub fn from_images(x_image: Letter, z_image: Letter) -> Option<LetterPerm> {
        LETTER_MAPS
            .iter()
            .position(|m| m[1] == x_image.code() && m[2] == z_image.code())
            .map(|i| LetterPerm(i as u8))
    }

    /// `self` after `first`.
    pub fn after(self, first: LetterPerm) -> LetterPerm {
        let mut map = [0u8; 4];
        for (c, out) in map.iter_mut().enumerate() {
            *out = self.map_code(first.map_code(c as u8));
        }
        LetterPerm::from_map(map)
    }

    pub fn inverse(self) -> LetterPerm {
        let mut map = [0u8; 4];
        for c in 0..4u8 {
            map[self.map_code(c) as usize] = c;
        }
        LetterPerm::from_map(map)
    }

    /// Even permutations are the identity and the two 3-cycles.
    pub fn is_even(self) -> bool {
        matches!(self.0, 0 | 3 | 4)
    }

    pub fn name(self) -> &'static str {
        NAMES[self.0 as usize]
    }
}

impl fmt::Debug for LetterPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Maps a packed `[x|z]` word through one letter permutation per qubit.
#[inline]
pub(crate) fn map_word(word: u64, n: usize, perms: &[LetterPerm]) -> u64 {
    let mut x = 0u64;
    let mut z = 0u64;
    for (j, p) in perms.iter().enumerate() {
        let code = ((word >> j) & 1) as u8 | (((word >> (n + j)) & 1) as u8) << 1;
        let c = p.map_code(code);
        x |= ((c & 1) as u64) << j;
        z |= ((c >> 1) as u64) << j;
    }
    x | z << n
}

/// Moves the letter on qubit `j` to qubit `image[j]`.
#[inline]
pub(crate) fn permute_word(word: u64, n: usize, image: &[usize]) -> u64 {
    let m = low_mask(n);
    let (xs, zs) = (word & m, word >> n);
    let mut x = 0u64;
    let mut z = 0u64;
    for (j, &t) in image.iter().enumerate() {
        x |= ((xs >> j) & 1) << t;
        z |= ((zs >> j) & 1) << t;
    }
    x | z << n
}

/// One letter permutation per qubit.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LocalClifford {
    pub perms: Vec<LetterPerm>,
}

impl LocalClifford {
    pub fn identity(n: usize) -> Self {
        LocalClifford { perms: vec![LetterPerm::IDENTITY; n] }
    }

    pub fn uniform(n: usize, p: LetterPerm) -> Self {
        LocalClifford { perms: vec![p; n] }
    }

    pub fn n(&self) -> usize {
        self.perms.len()
    }

    /// The `index`-th element of the `6^n` sweep: qubit 0 is the most
    /// significant digit, digits follow the `I, H, S, R, R^-1, V` order.
    pub fn from_sweep_index(n: usize, mut index: u64) -> Self {
        let mut perms = vec![LetterPerm::IDENTITY; n];
        for slot in perms.iter_mut().rev() {
            *slot = LetterPerm((index % 6) as u8);
            index /= 6;
        }
        LocalClifford { perms }
    }

    pub fn sweep_index(&self) -> u64 {
        self.perms.iter().fold(0, |acc, p| acc * 6 + p.index() as u64)
    }

    /// `self` after `first`, qubit by qubit.
    pub fn after(&self, first: &LocalClifford) -> LocalClifford {
        assert_eq!(self.n(), first.n());
        LocalClifford { perms: self.perms.iter().zip(&first.perms).map(|(a, b)| a.after(*b)).collect() }
    }

    pub fn inverse(&self) -> LocalClifford {
        LocalClifford { perms: self.perms.iter().map(|p| p.inverse()).collect() }
    }
}

/// Qubit permutation: qubit `j` moves to `image[j]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QubitPerm {
    pub image: Vec<usize>,
}

impl QubitPerm {
    pub fn identity(n: usize) -> Self {
        QubitPerm { image: (0..n).collect() }
    }

    /// Validates bijectivity.
    pub fn new(image: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; image.len()];
        for &t in &image {
            if t >= image.len() || std::mem::replace(&mut seen[t], true) {
                return None;
            }
        }
        Some(QubitPerm { image })
    }

    /// Builds a permutation from 1-indexed cycles, e.g. `[[3, 4, 2]]` for
    /// `3 -> 4 -> 2 -> 3`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Option<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        for c in cycles {
            for (i, &a) in c.iter().enumerate() {
                let b = c[(i + 1) % c.len()];
                if a == 0 || b == 0 || a > n || b > n {
                    return None;
                }
                image[a - 1] = b - 1;
            }
        }
        QubitPerm::new(image)
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    /// `self` after `first`.
    pub fn after(&self, first: &QubitPerm) -> QubitPerm {
        QubitPerm { image: first.image.iter().map(|&j| self.image[j]).collect() }
    }

    pub fn inverse(&self) -> QubitPerm {
        let mut inv = vec![0; self.n()];
        for (j, &t) in self.image.iter().enumerate() {
            inv[t] = j;
        }
        QubitPerm { image: inv }
    }
}

/// Element `(W, pi)` of the wreath product; acts as `g -> W(g^pi)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LCPerm {
    pub clifford: LocalClifford,
    pub perm: QubitPerm,
}

impl LCPerm {
    pub fn identity(n: usize) -> Self {
        LCPerm { clifford: LocalClifford::identity(n), perm: QubitPerm::identity(n) }
    }

    pub fn n(&self) -> usize {
        self.perm.n()
    }

    /// Apply to a packed word.
    pub fn apply_word(&self, word: u64) -> u64 {
        let n = self.n();
        map_word(permute_word(word, n, &self.perm.image), n, &self.clifford.perms)
    }

    pub fn apply(&self, g: &StabGroup) -> StabGroup {
        apply_local_clifford(&apply_perm(g, &self.perm), &self.clifford)
    }

    pub fn inverse(&self) -> LCPerm {
        let pinv = self.perm.inverse();
        LCPerm { clifford: shift_clifford(&self.clifford.inverse(), &pinv), perm: pinv }
    }
}

/// The clifford part carried along by a qubit permutation: the entry for
/// qubit `j` moves to `pi(j)`.
fn shift_clifford(w: &LocalClifford, pi: &QubitPerm) -> LocalClifford {
    let mut perms = vec![LetterPerm::IDENTITY; w.n()];
    for (j, &t) in pi.image.iter().enumerate() {
        perms[t] = w.perms[j];
    }
    LocalClifford { perms }
}

/// `a ∘ b`: apply `b` first, then `a`.
/// `(W2, p2)(W1, p1) = (W2 · shift_{p2}(W1), p2 p1)`.
pub fn compose(a: &LCPerm, b: &LCPerm) -> LCPerm {
    assert_eq!(a.n(), b.n());
    LCPerm {
        clifford: a.clifford.after(&shift_clifford(&b.clifford, &a.perm)),
        perm: a.perm.after(&b.perm),
    }
}

/// Uniformly random element of the wreath product for a given seed.
pub fn random_lcperm(n: usize, seed: u64) -> LCPerm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_lcperm_with(n, &mut rng)
}

pub fn random_lcperm_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LCPerm {
    let perms = (0..n).map(|_| LetterPerm(rng.random_range(0..6u8))).collect();
    let mut image: Vec<usize> = (0..n).collect();
    image.shuffle(rng);
    LCPerm { clifford: LocalClifford { perms }, perm: QubitPerm { image } }
}

pub fn apply_local_clifford(g: &StabGroup, w: &LocalClifford) -> StabGroup {
    assert_eq!(g.n(), w.n(), "local Clifford acts on a different qubit count");
    let n = g.n();
    StabGroup::from_words_unchecked(n, g.words().iter().map(|&r| map_word(r, n, &w.perms)).collect())
}

pub fn apply_perm(g: &StabGroup, p: &QubitPerm) -> StabGroup {
    assert_eq!(g.n(), p.n(), "permutation acts on a different qubit count");
    let n = g.n();
    StabGroup::from_words_unchecked(n, g.words().iter().map(|&r| permute_word(r, n, &p.image)).collect())
}

/// Generator matrix in revised standard form.
///
/// Columns (qubits) are reordered as left | middle | right | trivial:
/// ```text
/// [ I A1 A2 0 | B 0 C 0 ]   top r rows
/// [ 0 0  0  0 | D I E 0 ]   bottom rows
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsfResult {
    /// Rows packed `[x|z]` in permuted qubit order.
    pub matrix: BitMatrix,
    /// Qubit `j` of the input sits at column `perm.image[j]`.
    pub perm: QubitPerm,
    /// Rank of the X block (number of top rows / left qubits).
    pub r: usize,
    /// Number of middle qubits (Z identity block of the bottom rows).
    pub middle: usize,
    /// Number of all-zero qubit columns.
    pub trivial: usize,
}

impl RsfResult {
    pub fn n(&self) -> usize {
        self.perm.n()
    }

    pub fn group(&self) -> StabGroup {
        StabGroup::from_words_unchecked(self.n(), self.matrix.words().to_vec())
    }

    /// Checks the block shape.
    pub fn has_block_shape(&self) -> bool {
        let n = self.n();
        let rows = self.matrix.words();
        let (r, s) = (self.r, self.middle);
        let right_end = n - self.trivial;
        for (i, &w) in rows.iter().enumerate() {
            let x = w & low_mask(n);
            let z = w >> n;
            if (x | z) >> right_end != 0 {
                return false;
            }
            if i < r {
                if x & low_mask(r) != 1 << i {
                    return false;
                }
                if (z >> r) & low_mask(s) != 0 {
                    return false;
                }
            } else {
                if x != 0 {
                    return false;
                }
                if (z >> r) & low_mask(s) != 1 << (i - r) {
                    return false;
                }
            }
        }
        rows.len() == r + s
    }
}

/// Revised standard form. X pivots are taken left to right, then Z pivots
/// left to right among the remaining qubits.
pub fn rsf(g: &StabGroup) -> RsfResult {
    let n = g.n();
    let mut rows = g.words().to_vec();
    let nrows = rows.len();
    let mut left = Vec::new();
    let mut top = 0;
    for q in 0..n {
        let bit = 1u64 << q;
        let Some(p) = (top..nrows).find(|&i| rows[i] & bit != 0) else { continue };
        rows.swap(top, p);
        for i in 0..nrows {
            if i != top && rows[i] & bit != 0 {
                rows[i] ^= rows[top];
            }
        }
        left.push(q);
        top += 1;
    }
    let r = top;
    let mut is_left = vec![false; n];
    left.iter().for_each(|&q| is_left[q] = true);
    let mut middle = Vec::new();
    for q in (0..n).filter(|&q| !is_left[q]) {
        let bit = 1u64 << (n + q);
        let Some(p) = (top..nrows).find(|&i| rows[i] & bit != 0) else { continue };
        rows.swap(top, p);
        for i in 0..nrows {
            if i != top && rows[i] & bit != 0 {
                rows[i] ^= rows[top];
            }
        }
        middle.push(q);
        top += 1;
    }
    debug_assert_eq!(top, nrows, "bottom rows must have independent Z parts off the left qubits");
    let support = rows.iter().fold(0u64, |acc, &w| acc | w | w >> n) & low_mask(n);
    let mut is_middle = vec![false; n];
    middle.iter().for_each(|&q| is_middle[q] = true);
    let right: Vec<usize> =
        (0..n).filter(|&q| !is_left[q] && !is_middle[q] && support >> q & 1 == 1).collect();
    let trivial: Vec<usize> = (0..n).filter(|&q| support >> q & 1 == 0).collect();
    let mut image = vec![0; n];
    for (pos, &q) in left.iter().chain(&middle).chain(&right).chain(&trivial).enumerate() {
        image[q] = pos;
    }
    let matrix = BitMatrix::from_words(2 * n, rows.iter().map(|&w| permute_word(w, n, &image)));
    RsfResult { matrix, perm: QubitPerm { image }, r, middle: middle.len(), trivial: trivial.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliOp;

    fn g(s: &str) -> StabGroup {
        StabGroup::parse(s).unwrap()
    }

    #[test]
    fn letter_table_matches_cycle_notation() {
        use Letter::*;
        let img = |p: LetterPerm| (p.apply(X), p.apply(Y), p.apply(Z));
        assert_eq!(img(LetterPerm::IDENTITY), (X, Y, Z));
        assert_eq!(img(LetterPerm::H), (Z, Y, X));
        assert_eq!(img(LetterPerm::S), (Y, X, Z));
        assert_eq!(img(LetterPerm::R), (Y, Z, X));
        assert_eq!(img(LetterPerm::R_INV), (Z, X, Y));
        assert_eq!(img(LetterPerm::V), (X, Z, Y));
        // R = HS as conjugation: S first, then H
        assert_eq!(LetterPerm::H.after(LetterPerm::S), LetterPerm::R);
        assert_eq!(LetterPerm::S.after(LetterPerm::H), LetterPerm::R_INV);
        assert_eq!(LetterPerm::H.after(LetterPerm::S).after(LetterPerm::H), LetterPerm::V);
        for p in LetterPerm::ALL {
            assert_eq!(p.after(p.inverse()), LetterPerm::IDENTITY);
            assert_eq!(p.apply(I), I);
        }
    }

    #[test]
    fn letter_perms_are_linear() {
        for p in LetterPerm::ALL {
            for a in 0..4u8 {
                for b in 0..4u8 {
                    assert_eq!(p.map_code(a ^ b), p.map_code(a) ^ p.map_code(b));
                }
            }
        }
    }

    #[test]
    fn local_clifford_examples() {
        let h2 = LocalClifford::uniform(2, LetterPerm::H);
        assert!(apply_local_clifford(&g("XX"), &h2).same_group(&g("ZZ")));
        assert_eq!(apply_local_clifford(&g("XX;ZZ"), &LocalClifford::identity(2)), g("XX;ZZ"));
        let w = LocalClifford { perms: vec![LetterPerm::R, LetterPerm::IDENTITY] };
        assert!(apply_local_clifford(&g("XZ"), &w).same_group(&g("YZ")));
    }

    #[test]
    fn perm_examples() {
        let swap = QubitPerm::new(vec![0, 2, 1]).unwrap();
        assert!(apply_perm(&g("XIZ"), &swap).same_group(&g("XZI")));
        assert_eq!(apply_perm(&g("XIZ"), &QubitPerm::identity(3)), g("XIZ"));
        let pi = QubitPerm::from_cycles(4, &[&[3, 4, 2]]).unwrap();
        let out = apply_perm(&g("IIIX;ZZII;IZZI"), &pi);
        assert_eq!(out.generator_strings(), vec!["IXII", "ZIZI", "IIZZ"]);
        assert!(QubitPerm::new(vec![0, 0]).is_none());
    }

    #[test]
    fn sweep_index_roundtrip() {
        for i in [0u64, 1, 5, 6, 35, 215, 7775] {
            assert_eq!(LocalClifford::from_sweep_index(5, i).sweep_index(), i);
        }
        let w = LocalClifford::from_sweep_index(2, 1);
        assert_eq!(w.perms, vec![LetterPerm::IDENTITY, LetterPerm::H]);
    }

    #[test]
    fn compose_laws() {
        let n = 4;
        let e = LCPerm::identity(n);
        for seed in 0..20 {
            let a = random_lcperm(n, seed);
            assert_eq!(compose(&e, &a), a);
            assert_eq!(compose(&a, &e), a);
            assert_eq!(compose(&a, &a.inverse()), e);
            assert_eq!(compose(&a.inverse(), &a), e);
        }
        let groups = ["XXXX;ZZZZ", "ZZII;IIXX", "XZZX", "YIII;IYII;IIZZ"];
        for seed in 0..20u64 {
            let (a, b, c) = (random_lcperm(n, seed), random_lcperm(n, seed + 100), random_lcperm(n, seed + 200));
            assert_eq!(compose(&compose(&a, &b), &c), compose(&a, &compose(&b, &c)));
            for s in groups {
                let grp = g(s);
                let lhs = compose(&a, &b).apply(&grp);
                let rhs = a.apply(&b.apply(&grp));
                assert!(lhs.same_group(&rhs));
                let w = grp.words()[0];
                assert_eq!(compose(&a, &b).apply_word(w), a.apply_word(b.apply_word(w)));
            }
        }
    }

    #[test]
    fn action_preserves_rank_and_commutation() {
        for seed in 0..50u64 {
            let n = 5;
            let p = random_lcperm(n, seed);
            let grp = g("XZZXI;IXZZX;XIXZZ;ZXIXZ");
            let out = p.apply(&grp);
            assert!(StabGroup::new(n, out.gens().clone()).is_ok());
            assert_eq!(out.rank(), 4);
        }
    }

    #[test]
    fn rsf_examples() {
        let a = rsf(&g("XX;ZZ"));
        assert_eq!(a.r, 1);
        assert_eq!(PauliOp::from_word(a.matrix.row_word(0), 2).x().to_string(), "11");
        assert!(a.has_block_shape());

        let b = rsf(&g("ZZI;IZZ"));
        assert_eq!(b.r, 0);
        assert_eq!(b.middle, 2);
        let zs = b.group().z_part();
        assert_eq!(zs.words()[0] & 3, 1);
        assert_eq!(zs.words()[1] & 3, 2);
        assert!(b.has_block_shape());

        let c = rsf(&g("X"));
        assert_eq!(c.matrix, BitMatrix::from_strs(2, &["10"]));

        let d = rsf(&g("IIIX;ZZII;IZZI"));
        assert_eq!(d.trivial, 0);
        assert!(d.has_block_shape());
        let e = rsf(&g("ZZII;IZZI"));
        assert_eq!(e.trivial, 1);
        assert!(e.has_block_shape());
    }

    #[test]
    fn rsf_random_groups_keep_shape_and_rank() {
        let reps = ["XZZXI;IXZZX;XIXZZ;ZXIXZ", "XXXX;ZZZZ;XYZI", "ZIXZ;YXYI;IZZX", "XXXXXX;ZZZZZZ;ZZIIII", "IZ"];
        for (seed, s) in reps.iter().enumerate().flat_map(|(i, s)| (0..10u64).map(move |t| (t * 7 + i as u64, *s))) {
            let grp = g(s);
            let moved = random_lcperm(grp.n(), seed).apply(&grp);
            let out = rsf(&moved);
            assert!(out.has_block_shape(), "{moved:?} -> {:?}", out.matrix);
            assert_eq!(out.matrix.rank(), grp.rank());
            assert!(out.group().same_group(&apply_perm(&moved, &out.perm)));
        }
    }
}
