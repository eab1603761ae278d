//! Bit-packed linear algebra over GF(2).
//!
//! Vectors are at most 64 bits long and live in a single `u64`; column `j`
//! of a matrix is bit `j` of each row word (little-endian within the row).
//! That is enough for symplectic vectors of length `2n` with `n <= 32`, well
//! past anything the enumerator can reach.

use std::fmt;

/// Widest vector a single word can hold.
pub const MAX_BITS: usize = 64;

#[inline]
pub(crate) fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Fixed-length bit vector, `len <= 64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVec {
    bits: u64,
    len: usize,
}

impl BitVec {
    /// All-zero vector of length `len`.
    ///
    /// # Panics
    /// If `len > 64`.
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_BITS, "BitVec length {len} exceeds {MAX_BITS}");
        BitVec { bits: 0, len }
    }

    /// Wraps the low `len` bits of `bits`; higher bits are discarded.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        assert!(len <= MAX_BITS, "BitVec length {len} exceeds {MAX_BITS}");
        BitVec { bits: bits & low_mask(len), len }
    }

    pub fn from_bools(values: &[bool]) -> Self {
        let mut v = BitVec::zeros(values.len());
        for (i, &b) in values.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.bits >> i) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    #[inline]
    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// GF(2) inner product.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        (self.bits & other.bits).count_ones() & 1 == 1
    }

    #[inline]
    pub fn xor(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec { bits: self.bits ^ other.bits, len: self.len }
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Dense row-major matrix over GF(2) with at most 64 columns.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<u64>,
    ncols: usize,
}

/// Output of [`BitMatrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: BitMatrix,
    pub pivots: Vec<usize>,
    /// Invertible `nrows x nrows` matrix with `transform * m == reduced`.
    pub transform: BitMatrix,
}

impl BitMatrix {
    pub fn new(ncols: usize) -> Self {
        assert!(ncols <= MAX_BITS, "BitMatrix width {ncols} exceeds {MAX_BITS}");
        BitMatrix { rows: Vec::new(), ncols }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        assert!(ncols <= MAX_BITS, "BitMatrix width {ncols} exceeds {MAX_BITS}");
        BitMatrix { rows: vec![0; nrows], ncols }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.rows[i] = 1 << i;
        }
        m
    }

    /// Builds a matrix from raw row words; bits at or above `ncols` are dropped.
    pub fn from_words(ncols: usize, words: impl IntoIterator<Item = u64>) -> Self {
        assert!(ncols <= MAX_BITS, "BitMatrix width {ncols} exceeds {MAX_BITS}");
        let mask = low_mask(ncols);
        BitMatrix { rows: words.into_iter().map(|w| w & mask).collect(), ncols }
    }

    /// Builds a matrix from `'0'`/`'1'` strings, column 0 leftmost. Test and
    /// fixture helper: panics on anything else.
    pub fn from_strs(ncols: usize, rows: &[&str]) -> Self {
        let mut m = BitMatrix::new(ncols);
        for r in rows {
            assert_eq!(r.len(), ncols);
            let mut w = 0u64;
            for (j, c) in r.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => w |= 1 << j,
                    _ => panic!("bad bit character {c:?}"),
                }
            }
            m.rows.push(w);
        }
        m
    }

    pub fn from_rows(ncols: usize, rows: &[BitVec]) -> Self {
        let mut m = BitMatrix::new(ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "row length mismatch");
            m.rows.push(r.bits());
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.rows
    }

    #[inline]
    pub fn row_word(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec::from_bits(self.rows[i], self.ncols)
    }

    pub fn rows(&self) -> impl Iterator<Item = BitVec> + '_ {
        self.rows.iter().map(move |&w| BitVec::from_bits(w, self.ncols))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(j < self.ncols);
        if value {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn push_word(&mut self, word: u64) {
        self.rows.push(word & low_mask(self.ncols));
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.ncols, "row length mismatch");
        self.rows.push(row.bits());
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&w| w == 0)
    }

    /// Matrix product `self * other` over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.ncols, other.nrows(), "dimension mismatch in product");
        let rows = self.rows.iter().map(|&w| {
            let mut acc = 0u64;
            let mut bits = w;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                acc ^= other.rows[j];
                bits &= bits - 1;
            }
            acc
        });
        BitMatrix { rows: rows.collect(), ncols: other.ncols }
    }

    pub fn transpose(&self) -> BitMatrix {
        assert!(self.nrows() <= MAX_BITS, "transpose would exceed {MAX_BITS} columns");
        let mut t = BitMatrix::zeros(self.ncols, self.nrows());
        for (i, &w) in self.rows.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                t.rows[j] |= 1 << i;
                bits &= bits - 1;
            }
        }
        t
    }

    /// GF(2) row rank.
    pub fn rank(&self) -> usize {
        let mut basis = EchelonBasis::new();
        self.rows.iter().filter(|&&w| basis.insert(w)).count()
    }

    /// Reduced row echelon form. Pivot rule: leftmost nonzero column, topmost
    /// candidate row among those not yet used.
    ///
    /// # Panics
    /// If the matrix has more than 64 rows (the transform would not fit).
    pub fn rref(&self) -> Rref {
        let nrows = self.nrows();
        assert!(nrows <= MAX_BITS, "rref transform needs at most {MAX_BITS} rows");
        let mut reduced = self.rows.clone();
        let mut transform: Vec<u64> = (0..nrows).map(|i| 1u64 << i).collect();
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..self.ncols {
            if top == nrows {
                break;
            }
            let bit = 1u64 << col;
            let Some(p) = (top..nrows).find(|&i| reduced[i] & bit != 0) else {
                continue;
            };
            reduced.swap(top, p);
            transform.swap(top, p);
            for i in 0..nrows {
                if i != top && reduced[i] & bit != 0 {
                    reduced[i] ^= reduced[top];
                    transform[i] ^= transform[top];
                }
            }
            pivots.push(col);
            top += 1;
        }
        Rref {
            reduced: BitMatrix { rows: reduced, ncols: self.ncols },
            pivots,
            transform: BitMatrix { rows: transform, ncols: nrows },
        }
    }

    /// Basis of the right null space `{x : self * x^T = 0}`, one basis vector
    /// per free column in increasing column order.
    pub fn kernel(&self) -> BitMatrix {
        let rref = self.rref();
        let mut pivot_row = vec![None; self.ncols];
        for (i, &p) in rref.pivots.iter().enumerate() {
            pivot_row[p] = Some(i);
        }
        let mut out = BitMatrix::new(self.ncols);
        for (free, row) in pivot_row.iter().enumerate() {
            if row.is_some() {
                continue;
            }
            let mut x = 1u64 << free;
            for (i, &p) in rref.pivots.iter().enumerate() {
                if rref.reduced.get(i, free) {
                    x |= 1 << p;
                }
            }
            out.rows.push(x);
        }
        out
    }

    /// True when both matrices span the same row space.
    pub fn same_row_space(&self, other: &BitMatrix) -> bool {
        if self.ncols != other.ncols {
            return false;
        }
        let a = self.rref();
        let b = other.rref();
        let nz = |m: &BitMatrix| m.rows.iter().copied().filter(|&w| w != 0).collect::<Vec<_>>();
        nz(&a.reduced) == nz(&b.reduced)
    }

    /// Nonzero rows of the RREF, i.e. the canonical basis of the row space.
    pub fn row_space_basis(&self) -> BitMatrix {
        let mut basis = EchelonBasis::new();
        for &w in &self.rows {
            basis.insert(w);
        }
        basis.into_matrix(self.ncols)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("BitMatrix[")?;
        for (i, r) in self.rows().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

/// Incrementally maintained reduced echelon basis of a row space.
///
/// Rows are kept fully reduced (every pivot column is zero in all other
/// rows), so `reduce` returns the canonical coset representative of a
/// vector and the basis itself is the RREF of the span.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: Vec<u64>,
    pivots: Vec<u32>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Mask of pivot columns.
    pub fn pivot_mask(&self) -> u64 {
        self.pivots.iter().fold(0, |m, &p| m | 1 << p)
    }

    /// Canonical representative of `v` modulo the span.
    #[inline]
    pub fn reduce(&self, mut v: u64) -> u64 {
        for (&r, &p) in self.rows.iter().zip(&self.pivots) {
            if (v >> p) & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    #[inline]
    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    /// Adds `v` to the span. Returns false when it was already there.
    pub fn insert(&mut self, v: u64) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let p = v.trailing_zeros();
        for r in &mut self.rows {
            if (*r >> p) & 1 == 1 {
                *r ^= v;
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        true
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn into_matrix(self, ncols: usize) -> BitMatrix {
        BitMatrix::from_words(ncols, self.rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_matrix() -> impl Strategy<Value = BitMatrix> {
        (1usize..=12, 0usize..=12).prop_flat_map(|(ncols, nrows)| {
            proptest::collection::vec(any::<u64>(), nrows)
                .prop_map(move |w| BitMatrix::from_words(ncols, w))
        })
    }

    // Row rank by enumerating the span: rank = log2 |span|.
    fn brute_rank(m: &BitMatrix) -> usize {
        let mut span = std::collections::HashSet::new();
        for mask in 0u32..(1 << m.nrows()) {
            let mut acc = 0u64;
            for i in 0..m.nrows() {
                if mask >> i & 1 == 1 {
                    acc ^= m.row_word(i);
                }
            }
            span.insert(acc);
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(2).rank(), 2);
        assert_eq!(BitMatrix::zeros(3, 4).rank(), 0);
        let m = BitMatrix::from_strs(4, &["1100", "0110", "1010"]);
        assert_eq!(m.rank(), 2);
        assert_eq!(brute_rank(&m), 2);
    }

    #[test]
    fn rref_examples() {
        let id = BitMatrix::identity(3);
        let r = id.rref();
        assert_eq!(r.reduced, id);
        assert_eq!(r.pivots, vec![0, 1, 2]);
        assert_eq!(r.transform, id);

        let dup = BitMatrix::from_strs(2, &["11", "11"]);
        let r = dup.rref();
        assert_eq!(r.reduced, BitMatrix::from_strs(2, &["11", "00"]));
        assert_eq!(r.pivots, vec![0]);

        let m = BitMatrix::from_strs(3, &["011", "110"]);
        let r = m.rref();
        assert_eq!(r.reduced, BitMatrix::from_strs(3, &["101", "011"]));
        assert_eq!(r.pivots, vec![0, 1]);
        assert!(r.reduced.same_row_space(&m));
        assert_eq!(r.transform.mul(&m), r.reduced);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(BitMatrix::identity(4).kernel().nrows(), 0);
        assert_eq!(BitMatrix::zeros(1, 3).kernel().nrows(), 3);
        let m = BitMatrix::from_strs(3, &["110"]);
        let k = m.kernel();
        assert_eq!(k.nrows(), 2);
        // Every vector orthogonal to 110 is in the span of the kernel rows.
        let row = m.row(0);
        let orthogonal: Vec<u64> = (0u64..8).filter(|&x| !row.dot(&BitVec::from_bits(x, 3))).collect();
        assert_eq!(orthogonal.len(), 4);
        let mut basis = EchelonBasis::new();
        for w in k.words() {
            basis.insert(*w);
        }
        assert!(orthogonal.iter().all(|&x| basis.contains(x)));
    }

    #[test]
    fn echelon_basis_matches_rref() {
        let m = BitMatrix::from_strs(5, &["01101", "11000", "10101", "01101"]);
        let rref = m.rref();
        let nonzero: Vec<u64> = rref.reduced.words().iter().copied().filter(|&w| w != 0).collect();
        assert_eq!(m.row_space_basis().words(), &nonzero[..]);
    }

    proptest! {
        #[test]
        fn rref_transform_is_invertible_and_exact(m in arb_matrix()) {
            let r = m.rref();
            prop_assert_eq!(r.transform.rank(), m.nrows());
            prop_assert_eq!(r.transform.mul(&m), r.reduced.clone());
            prop_assert!(r.pivots.windows(2).all(|w| w[0] < w[1]));
            // zero rows sit at the bottom
            let nz = r.pivots.len();
            prop_assert!(r.reduced.words()[nz..].iter().all(|&w| w == 0));
        }

        #[test]
        fn rank_nullity(m in arb_matrix()) {
            prop_assert_eq!(m.rank() + m.kernel().nrows(), m.ncols());
            prop_assert_eq!(m.rank(), brute_rank(&m));
            let k = m.kernel();
            for x in k.rows() {
                prop_assert!(m.rows().all(|r| !r.dot(&x)));
            }
        }

        #[test]
        fn rref_idempotent(m in arb_matrix()) {
            let once = m.rref().reduced;
            let twice = once.rref();
            prop_assert_eq!(&twice.reduced, &once);
        }
    }
}
