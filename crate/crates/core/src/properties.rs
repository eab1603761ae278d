//! Per-class invariants: weight enumerator, distance, degeneracy, evenness,
//! CSS and GF(4)-linearity (with representative searches), decomposition.

use std::fmt;
use std::ops::{Add, Mul};

use rayon::prelude::*;

use crate::f2::{low_mask, BitMatrix, EchelonBasis};
use crate::pauli::{word_weight, PauliError, StabGroup};
use crate::transform::{map_word, rsf, LetterPerm, LocalClifford};

/// `coeffs[w]` counts group elements of weight `w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightEnum {
    pub coeffs: Vec<u64>,
}

impl WeightEnum {
    pub fn total(&self) -> u64 {
        self.coeffs.iter().sum()
    }
}

impl fmt::Display for WeightEnum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (w, &c) in self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (w, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("x")?,
                (1, c) => write!(f, "{c}x")?,
                (w, 1) => write!(f, "x^{w}")?,
                (w, c) => write!(f, "{c}x^{w}")?,
            }
        }
        Ok(())
    }
}

pub fn weight_enumerator(g: &StabGroup) -> Result<WeightEnum, PauliError> {
    let n = g.n();
    let mut coeffs = vec![0u64; n + 1];
    for w in g.span_words()? {
        coeffs[word_weight(w, n) as usize] += 1;
    }
    Ok(WeightEnum { coeffs })
}

/// Minimum weight of a logical operator for `k > 0`; minimum nonzero
/// stabilizer weight for `k = 0`. The trivial group has distance 1.
pub fn distance(g: &StabGroup) -> Result<u32, PauliError> {
    let n = g.n();
    if g.rank() == 0 {
        return Ok(1);
    }
    let span = g.span_words()?;
    if g.k() == 0 {
        return Ok(span.iter().skip(1).map(|&w| word_weight(w, n)).min().expect("nonempty group"));
    }
    let logicals: Vec<u64> = g.logical_pairs().into_iter().flat_map(|(x, z)| [x.word(), z.word()]).collect();
    if logicals.len() > 2 * crate::pauli::MAX_SPAN_RANK {
        return Err(PauliError::SpanTooLarge(logicals.len()));
    }
    let mut best = n as u32;
    let mut acc = 0u64;
    for i in 1u64..(1 << logicals.len()) {
        acc ^= logicals[i.trailing_zeros() as usize];
        for &s in &span {
            best = best.min(word_weight(acc ^ s, n));
        }
        if best == 1 {
            break;
        }
    }
    Ok(best)
}

/// Whether some nonidentity stabilizer has weight below the distance.
/// Always false for `k = 0`.
pub fn is_degenerate(g: &StabGroup) -> Result<bool, PauliError> {
    if g.k() == 0 || g.rank() == 0 {
        return Ok(false);
    }
    let d = distance(g)?;
    let n = g.n();
    Ok(g.span_words()?.iter().skip(1).any(|&w| word_weight(w, n) < d))
}

/// Whether the even-weight elements generate the whole group.
pub fn is_even(g: &StabGroup) -> Result<bool, PauliError> {
    let n = g.n();
    let mut basis = EchelonBasis::new();
    for w in g.span_words()? {
        if word_weight(w, n).is_multiple_of(2) {
            basis.insert(w);
        }
    }
    Ok(basis.dim() == g.rank())
}

/// `rank(G_X) + rank(G_Z) = n - k`.
pub fn css_rank_test(g: &StabGroup) -> bool {
    g.x_part().rank() + g.z_part().rank() == g.rank()
}

fn css_words(words: &[u64], n: usize) -> bool {
    let m = low_mask(n);
    let xr = BitMatrix::from_words(n, words.iter().map(|&w| w & m)).rank();
    let zr = BitMatrix::from_words(n, words.iter().map(|&w| w >> n)).rank();
    xr + zr == words.len()
}

/// Rewrites a CSS group with X-type generators first, then Z-type ones.
pub fn css_split(g: &StabGroup) -> Option<StabGroup> {
    let n = g.n();
    let m = low_mask(n);
    // Pure elements of one type end up in the RREF rows whose leading
    // (other-type) half is zero.
    let pure = |lead: &dyn Fn(u64) -> u64| -> Vec<u64> {
        let moved = BitMatrix::from_words(2 * n, g.words().iter().map(|&w| lead(w)));
        let reduced = moved.rref().reduced;
        reduced.words().iter().copied().filter(|&w| w != 0 && w & m == 0).collect()
    };
    let xs: Vec<u64> = pure(&|w| (w >> n) | (w & m) << n).into_iter().map(|w| w >> n).collect();
    let zs: Vec<u64> = pure(&|w| w).into_iter().collect();
    if xs.len() + zs.len() != g.rank() {
        return None;
    }
    Some(StabGroup::from_words_unchecked(n, xs.into_iter().chain(zs).collect()))
}

/// First local Clifford in sweep order whose image passes the CSS rank
/// test, with the image written as X-type then Z-type generators.
pub fn css_representative(g: &StabGroup) -> Option<(LocalClifford, StabGroup)> {
    let n = g.n();
    let words = g.words();
    let total = 6u64.pow(n as u32);
    let hit = (0..total).into_par_iter().find_first(|&i| {
        let w = LocalClifford::from_sweep_index(n, i);
        let image: Vec<u64> = words.iter().map(|&r| map_word(r, n, &w.perms)).collect();
        css_words(&image, n)
    })?;
    let w = LocalClifford::from_sweep_index(n, hit);
    let image = crate::transform::apply_local_clifford(g, &w);
    let split = css_split(&image).expect("rank test passed");
    Some((w, split))
}

/// Invariance of the group under the letter cycle `X -> Y -> Z` on every
/// qubit.
pub fn gf4_linear_test(g: &StabGroup) -> bool {
    let n = g.n();
    cycle_invariant(g, &vec![LetterPerm::R; n])
}

fn cycle_invariant(g: &StabGroup, perms: &[LetterPerm]) -> bool {
    let n = g.n();
    let basis = g.basis();
    g.words().iter().all(|&w| basis.contains(map_word(w, n, perms)))
}

/// First local Clifford in sweep order whose image is GF(4)-linear.
///
/// Conjugating the cycle by a letter permutation gives the cycle itself or
/// its inverse depending on parity, so only the parity pattern of the
/// sweep element matters. The first element with a given pattern uses `I`
/// on even qubits and `H` on odd ones.
pub fn gf4_representative(g: &StabGroup) -> Option<LocalClifford> {
    let n = g.n();
    if (n - g.k()) % 2 == 1 {
        return None;
    }
    // Pattern bit for qubit j is bit (n-1-j), so numeric order is sweep order.
    (0u64..1 << n).find_map(|pattern| {
        let odd = |j: usize| pattern >> (n - 1 - j) & 1 == 1;
        let cycle: Vec<LetterPerm> = (0..n).map(|j| if odd(j) { LetterPerm::R_INV } else { LetterPerm::R }).collect();
        cycle_invariant(g, &cycle).then(|| LocalClifford {
            perms: (0..n).map(|j| if odd(j) { LetterPerm::H } else { LetterPerm::IDENTITY }).collect(),
        })
    })
}

/// One factor of a decomposition: a group acting on `qubits` (ascending,
/// original indices), written on `qubits.len()` qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub qubits: Vec<usize>,
    pub group: StabGroup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompReport {
    pub trivial_qubits: Vec<usize>,
    pub factors: Vec<Factor>,
    pub length: usize,
}

impl DecompReport {
    /// A group splits when it has at least two tensor factors, counting
    /// each trivial qubit as one.
    pub fn is_decomposable(&self) -> bool {
        self.trivial_qubits.len() + self.factors.len() >= 2
    }
}

/// Tensor factorization read off the revised standard form: generators
/// are grouped by connected components of their support-overlap graph.
pub fn decompose(g: &StabGroup) -> DecompReport {
    let n = g.n();
    let form = rsf(g);
    let inv = form.perm.inverse();
    // Back to original qubit order; each row is still a group element.
    let rows: Vec<u64> = form
        .matrix
        .words()
        .iter()
        .map(|&w| crate::transform::permute_word(w, n, &inv.image))
        .collect();
    let supports: Vec<u64> = rows.iter().map(|&w| (w | w >> n) & low_mask(n)).collect();
    let all = supports.iter().fold(0, |a, &s| a | s);
    let trivial_qubits: Vec<usize> = (0..n).filter(|&q| all >> q & 1 == 0).collect();

    let mut comp: Vec<usize> = (0..rows.len()).collect();
    fn find(c: &mut [usize], mut i: usize) -> usize {
        while c[i] != i {
            c[i] = c[c[i]];
            i = c[i];
        }
        i
    }
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if supports[i] & supports[j] != 0 {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                comp[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut root_slot: Vec<Option<usize>> = vec![None; rows.len()];
    for i in 0..rows.len() {
        let root = find(&mut comp, i);
        let slot = *root_slot[root].get_or_insert_with(|| {
            groups.push((0, Vec::new()));
            groups.len() - 1
        });
        groups[slot].0 |= supports[i];
        groups[slot].1.push(rows[i]);
    }
    groups.sort_by_key(|(support, _)| support.trailing_zeros());
    let factors: Vec<Factor> = groups
        .into_iter()
        .map(|(support, words)| {
            let qubits: Vec<usize> = (0..n).filter(|&q| support >> q & 1 == 1).collect();
            let m = qubits.len();
            let restrict = |w: u64| {
                qubits.iter().enumerate().fold(0u64, |acc, (i, &q)| {
                    acc | ((w >> q) & 1) << i | ((w >> (n + q)) & 1) << (m + i)
                })
            };
            Factor { group: StabGroup::from_words_unchecked(m, words.into_iter().map(restrict).collect()), qubits }
        })
        .collect();
    let length = factors.len();
    DecompReport { trivial_qubits, factors, length }
}

/// Element of GF(4) as `a + b·ω`, stored as `a | b << 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GF4(u8);

impl GF4 {
    pub const ZERO: GF4 = GF4(0);
    pub const ONE: GF4 = GF4(1);
    pub const OMEGA: GF4 = GF4(2);
    pub const OMEGA2: GF4 = GF4(3);

    pub fn from_bits(b: u8) -> GF4 {
        GF4(b & 3)
    }

    pub fn bits(self) -> u8 {
        self.0
    }
}

impl Add for GF4 {
    type Output = GF4;
    // characteristic 2: addition is XOR of the bit pairs
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: GF4) -> GF4 {
        GF4(self.0 ^ rhs.0)
    }
}

impl Mul for GF4 {
    type Output = GF4;
    fn mul(self, rhs: GF4) -> GF4 {
        // ω² = ω + 1
        let (a, b) = (self.0 & 1, self.0 >> 1);
        let (c, d) = (rhs.0 & 1, rhs.0 >> 1);
        let bd = b & d;
        GF4((a & c ^ bd) | ((a & d ^ b & c ^ bd) << 1))
    }
}

impl fmt::Debug for GF4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["0", "1", "w", "w2"][self.0 as usize])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GF4Vector {
    pub entries: Vec<GF4>,
}

impl Add for &GF4Vector {
    type Output = GF4Vector;
    fn add(self, rhs: &GF4Vector) -> GF4Vector {
        GF4Vector { entries: self.entries.iter().zip(&rhs.entries).map(|(&a, &b)| a + b).collect() }
    }
}

/// `λ(X) = 1`, `λ(Z) = ω`, `λ(Y) = ω²`.
pub fn gf4_word(word: u64, n: usize) -> GF4Vector {
    GF4Vector {
        entries: (0..n).map(|j| GF4(((word >> j) & 1) as u8 | (((word >> (n + j)) & 1) as u8) << 1)).collect(),
    }
}

/// GF(4) images of the generators.
pub fn gf4_image(g: &StabGroup) -> Vec<GF4Vector> {
    g.words().iter().map(|&w| gf4_word(w, g.n())).collect()
}

/// All invariants of one group in a single pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Properties {
    pub d: u32,
    pub weight_enumerator: WeightEnum,
    pub is_css: bool,
    pub is_gf4linear: bool,
    pub is_decomposable: bool,
    pub is_degenerate: bool,
    pub is_even: bool,
    pub length: usize,
}

/// The class flag `is_gf4linear` leaves out the trivial group (no
/// stabilizers), which passes the cycle test vacuously but is not counted
/// as a GF(4)-linear code.
pub fn properties(g: &StabGroup) -> Result<Properties, PauliError> {
    let dec = decompose(g);
    Ok(Properties {
        d: distance(g)?,
        weight_enumerator: weight_enumerator(g)?,
        is_css: css_representative(g).is_some(),
        is_gf4linear: g.rank() > 0 && gf4_representative(g).is_some(),
        is_decomposable: dec.is_decomposable(),
        is_degenerate: is_degenerate(g)?,
        is_even: is_even(g)?,
        length: dec.length,
    })
}
