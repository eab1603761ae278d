//! Phase-free Pauli operators and stabilizer groups in symplectic form.
//!
//! A Pauli on `n` qubits is packed into one word: bits `0..n` hold the X
//! part and bits `n..2n` the Z part, so qubit `j` carries `(x_j, z_j)` with
//! `I/X/Z/Y = (0,0)/(1,0)/(0,1)/(1,1)`. Phases are dropped throughout; two
//! groups that differ only in signs have the same symplectic matrix and
//! land in the same class.

use std::fmt;

use thiserror::Error;

use crate::f2::{low_mask, BitMatrix, BitVec, EchelonBasis};

/// Largest qubit count a packed Pauli supports.
pub const MAX_QUBITS: usize = 32;

/// Largest generator count whose span we are willing to list (2^18 elements).
pub const MAX_SPAN_RANK: usize = 18;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("invalid character {found:?} at position {position}")]
    BadChar { position: usize, found: char },
    #[error("expected {expected} qubits, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("operators act on different qubit counts ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("{0} qubits exceeds the supported maximum of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("generators {0} and {1} anticommute")]
    Anticommuting(usize, usize),
    #[error("generators are not independent (rank {rank} < {rows})")]
    Dependent { rank: usize, rows: usize },
    #[error("group of rank {0} is too large to enumerate (limit {MAX_SPAN_RANK})")]
    SpanTooLarge(usize),
    #[error("empty generator list: qubit count cannot be inferred")]
    Empty,
    #[error("generator {index}: {source}")]
    InGenerator {
        index: usize,
        #[source]
        source: Box<PauliError>,
    },
}

/// Single-qubit letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const NON_IDENTITY: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    /// `(x, z)` bit pair.
    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Z => (false, true),
            Letter::Y => (true, true),
        }
    }

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (false, true) => Letter::Z,
            (true, true) => Letter::Y,
        }
    }

    /// 2-bit code `x | z << 1`: I=0, X=1, Z=2, Y=3.
    #[inline]
    pub fn code(self) -> u8 {
        let (x, z) = self.bits();
        x as u8 | (z as u8) << 1
    }

    #[inline]
    pub fn from_code(code: u8) -> Letter {
        Letter::from_bits(code & 1 == 1, code & 2 == 2)
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        Some(match c {
            'I' => Letter::I,
            'X' => Letter::X,
            'Y' => Letter::Y,
            'Z' => Letter::Z,
            _ => return None,
        })
    }
}

/// Packed symplectic product of two words on `n` qubits.
#[inline]
pub fn symplectic_word(a: u64, b: u64, n: usize) -> bool {
    let m = low_mask(n);
    let t = (a & m & (b >> n)) ^ ((a >> n) & b & m);
    t.count_ones() & 1 == 1
}

/// Number of qubits where the packed word is not the identity.
#[inline]
pub fn word_weight(w: u64, n: usize) -> u32 {
    ((w | (w >> n)) & low_mask(n)).count_ones()
}

/// Phase-free n-qubit Pauli operator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliOp {
    x: BitVec,
    z: BitVec,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS);
        PauliOp { x: BitVec::zeros(n), z: BitVec::zeros(n) }
    }

    pub fn new(x: BitVec, z: BitVec) -> Result<Self, PauliError> {
        if x.len() != z.len() {
            return Err(PauliError::LengthMismatch(x.len(), z.len()));
        }
        if x.len() > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(x.len()));
        }
        Ok(PauliOp { x, z })
    }

    /// Unpacks a `[x|z]` word.
    pub fn from_word(word: u64, n: usize) -> Self {
        assert!(n <= MAX_QUBITS);
        PauliOp { x: BitVec::from_bits(word, n), z: BitVec::from_bits(word >> n, n) }
    }

    #[inline]
    pub fn word(&self) -> u64 {
        self.x.bits() | self.z.bits() << self.n()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> BitVec {
        self.x
    }

    pub fn z(&self) -> BitVec {
        self.z
    }

    pub fn letter(&self, j: usize) -> Letter {
        Letter::from_bits(self.x.get(j), self.z.get(j))
    }

    pub fn set_letter(&mut self, j: usize, l: Letter) {
        let (x, z) = l.bits();
        self.x.set(j, x);
        self.z.set(j, z);
    }

    pub fn weight(&self) -> u32 {
        (self.x.bits() | self.z.bits()).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Phase-free product.
    pub fn mul(&self, other: &PauliOp) -> PauliOp {
        assert_eq!(self.n(), other.n());
        PauliOp { x: self.x.xor(&other.x), z: self.z.xor(&other.z) }
    }

    /// Parses `[IXYZ]{n}`, qubit 0 leftmost.
    pub fn parse(s: &str, n: usize) -> Result<Self, PauliError> {
        let p: PauliOp = s.parse()?;
        if p.n() != n {
            return Err(PauliError::WrongLength { expected: n, found: p.n() });
        }
        Ok(p)
    }
}

/// Symplectic form: `false` iff the operators commute.
pub fn symplectic_product(a: &PauliOp, b: &PauliOp) -> Result<bool, PauliError> {
    if a.n() != b.n() {
        return Err(PauliError::LengthMismatch(a.n(), b.n()));
    }
    Ok(a.x.dot(&b.z) ^ a.z.dot(&b.x))
}

impl std::str::FromStr for PauliOp {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = s.chars().count();
        if n > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n));
        }
        let mut p = PauliOp::identity(n);
        for (position, c) in s.chars().enumerate() {
            let l = Letter::from_char(c).ok_or(PauliError::BadChar { position, found: c })?;
            p.set_letter(position, l);
        }
        Ok(p)
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n() {
            write!(f, "{}", self.letter(j).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

/// Stabilizer group given by a minimal generating set.
///
/// Row `i` of `gens` is generator `i` packed as `[x|z]`; rows are linearly
/// independent and pairwise commuting.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StabGroup {
    n: usize,
    gens: BitMatrix,
}

impl StabGroup {
    /// The trivial group on `n` qubits (`k = n`).
    pub fn trivial(n: usize) -> Self {
        assert!(n <= MAX_QUBITS);
        StabGroup { n, gens: BitMatrix::new(2 * n) }
    }

    /// Validates independence and commutation.
    pub fn new(n: usize, gens: BitMatrix) -> Result<Self, PauliError> {
        if n > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n));
        }
        if gens.ncols() != 2 * n {
            return Err(PauliError::WrongLength { expected: n, found: gens.ncols() / 2 });
        }
        let w = gens.words();
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if symplectic_word(w[i], w[j], n) {
                    return Err(PauliError::Anticommuting(i, j));
                }
            }
        }
        let rank = gens.rank();
        if rank != gens.nrows() {
            return Err(PauliError::Dependent { rank, rows: gens.nrows() });
        }
        Ok(StabGroup { n, gens })
    }

    pub(crate) fn from_words_unchecked(n: usize, words: Vec<u64>) -> Self {
        let g = StabGroup { n, gens: BitMatrix::from_words(2 * n, words) };
        debug_assert!(StabGroup::new(n, g.gens.clone()).is_ok(), "invalid group {g:?}");
        g
    }

    pub fn from_paulis(n: usize, ops: &[PauliOp]) -> Result<Self, PauliError> {
        let mut m = BitMatrix::new(2 * n);
        for (index, p) in ops.iter().enumerate() {
            if p.n() != n {
                return Err(PauliError::InGenerator {
                    index,
                    source: Box::new(PauliError::WrongLength { expected: n, found: p.n() }),
                });
            }
            m.push_word(p.word());
        }
        StabGroup::new(n, m)
    }

    /// Parses a semicolon-separated generator list such as `"XXXX;ZZZZ"`.
    /// The qubit count is taken from the first generator.
    pub fn parse(s: &str) -> Result<Self, PauliError> {
        let parts: Vec<&str> = s.split(';').map(str::trim).filter(|p| !p.is_empty()).collect();
        let first = parts.first().ok_or(PauliError::Empty)?;
        let n = first.chars().count();
        Self::parse_strings(n, &parts)
    }

    /// Like [`StabGroup::parse`] with an explicit qubit count, so the empty
    /// string denotes the trivial group.
    pub fn parse_with_n(s: &str, n: usize) -> Result<Self, PauliError> {
        let parts: Vec<&str> = s.split(';').map(str::trim).filter(|p| !p.is_empty()).collect();
        Self::parse_strings(n, &parts)
    }

    pub fn parse_strings<S: AsRef<str>>(n: usize, parts: &[S]) -> Result<Self, PauliError> {
        if n > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n));
        }
        let ops = parts
            .iter()
            .enumerate()
            .map(|(index, p)| {
                PauliOp::parse(p.as_ref(), n)
                    .map_err(|e| PauliError::InGenerator { index, source: Box::new(e) })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_paulis(n, &ops)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of generators, `n - k`.
    #[inline]
    pub fn rank(&self) -> usize {
        self.gens.nrows()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.n - self.rank()
    }

    pub fn gens(&self) -> &BitMatrix {
        &self.gens
    }

    pub fn words(&self) -> &[u64] {
        self.gens.words()
    }

    pub fn generators(&self) -> Vec<PauliOp> {
        self.words().iter().map(|&w| PauliOp::from_word(w, self.n)).collect()
    }

    pub fn generator_strings(&self) -> Vec<String> {
        self.generators().iter().map(ToString::to_string).collect()
    }

    /// X block as an `r x n` matrix.
    pub fn x_part(&self) -> BitMatrix {
        BitMatrix::from_words(self.n, self.words().iter().copied())
    }

    /// Z block as an `r x n` matrix.
    pub fn z_part(&self) -> BitMatrix {
        BitMatrix::from_words(self.n, self.words().iter().map(|&w| w >> self.n))
    }

    pub(crate) fn basis(&self) -> EchelonBasis {
        let mut b = EchelonBasis::new();
        for &w in self.words() {
            b.insert(w);
        }
        b
    }

    /// Same group with RREF generator rows; equal groups give equal output.
    pub fn canonical(&self) -> StabGroup {
        StabGroup { n: self.n, gens: self.basis().into_matrix(2 * self.n) }
    }

    /// Group equality (same span), regardless of the chosen generators.
    pub fn same_group(&self, other: &StabGroup) -> bool {
        self.n == other.n && self.gens.same_row_space(&other.gens)
    }

    pub fn contains(&self, p: &PauliOp) -> bool {
        p.n() == self.n && self.basis().contains(p.word())
    }

    /// Adds a commuting operator outside the span.
    pub fn extended(&self, p: &PauliOp) -> Result<StabGroup, PauliError> {
        let mut m = self.gens.clone();
        m.push_word(p.word());
        StabGroup::new(self.n, m)
    }

    /// All `2^r` elements in Gray-code order of the generator-selection mask:
    /// element `i` differs from element `i-1` by generator `trailing_zeros(i)`.
    pub fn span_words(&self) -> Result<Vec<u64>, PauliError> {
        let r = self.rank();
        if r > MAX_SPAN_RANK {
            return Err(PauliError::SpanTooLarge(r));
        }
        let w = self.words();
        let mut out = Vec::with_capacity(1 << r);
        let mut acc = 0u64;
        out.push(acc);
        for i in 1usize..(1 << r) {
            acc ^= w[i.trailing_zeros() as usize];
            out.push(acc);
        }
        Ok(out)
    }

    pub fn span_elements(&self) -> Result<Vec<PauliOp>, PauliError> {
        Ok(self.span_words()?.into_iter().map(|w| PauliOp::from_word(w, self.n)).collect())
    }

    /// Basis of all phase-free Paulis commuting with every generator
    /// (dimension `n + k`), computed as the kernel of the X/Z-swapped
    /// generator matrix.
    pub fn centralizer(&self) -> BitMatrix {
        let n = self.n;
        let m = low_mask(n);
        let swapped = BitMatrix::from_words(2 * n, self.words().iter().map(|&w| (w >> n) | (w & m) << n));
        swapped.kernel()
    }

    /// `k` pairs `(logical X, logical Z)` completing the group to a
    /// symplectic basis of the centralizer: pairs anticommute with each
    /// other and commute with every other pair and with the group.
    pub fn logical_pairs(&self) -> Vec<(PauliOp, PauliOp)> {
        let n = self.n;
        let mut basis = self.basis();
        let mut rest: Vec<u64> = Vec::new();
        for &c in self.centralizer().words() {
            let r = basis.reduce(c);
            if r != 0 {
                basis.insert(r);
                rest.push(r);
            }
        }
        debug_assert_eq!(rest.len(), 2 * self.k());
        let mut pairs = Vec::new();
        while let Some(a) = rest.first().copied() {
            let bi = rest
                .iter()
                .position(|&b| symplectic_word(a, b, n))
                .expect("centralizer complement is symplectic");
            let b = rest[bi];
            rest.remove(bi);
            rest.remove(0);
            for c in &mut rest {
                let ca = symplectic_word(*c, a, n);
                let cb = symplectic_word(*c, b, n);
                if cb {
                    *c ^= a;
                }
                if ca {
                    *c ^= b;
                }
            }
            // a plays logical Z, b logical X
            pairs.push((PauliOp::from_word(b, n), PauliOp::from_word(a, n)));
        }
        pairs
    }
}

impl fmt::Display for StabGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.generator_strings();
        if s.is_empty() {
            write!(f, "<{}>", "I".repeat(self.n))
        } else {
            write!(f, "<{}>", s.join(","))
        }
    }
}

impl fmt::Debug for StabGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StabGroup(n={}, {self})", self.n)
    }
}

/// Smallest group containing every element: a minimal RREF generating set
/// for their span. Fails if two inputs anticommute.
pub fn minimal_generators(n: usize, elements: &[PauliOp]) -> Result<StabGroup, PauliError> {
    let mut basis = EchelonBasis::new();
    let mut kept: Vec<(usize, u64)> = Vec::new();
    for (i, p) in elements.iter().enumerate() {
        if p.n() != n {
            return Err(PauliError::InGenerator {
                index: i,
                source: Box::new(PauliError::WrongLength { expected: n, found: p.n() }),
            });
        }
        let w = p.word();
        // Commuting with a basis of the span is the same as commuting with
        // everything seen so far.
        if let Some(&(j, _)) = kept.iter().find(|&&(_, b)| symplectic_word(w, b, n)) {
            let (a, b) = if j < i { (j, i) } else { (i, j) };
            return Err(PauliError::Anticommuting(a, b));
        }
        if basis.insert(w) {
            kept.push((i, w));
        }
    }
    Ok(StabGroup { n, gens: basis.into_matrix(2 * n) })
}

/// Parses a generator file: one or more Pauli strings per line separated by
/// `;`, blank lines ignored, `#` starts a comment. The qubit count is taken
/// from the first generator.
pub fn parse_generator_file(text: &str) -> Result<StabGroup, PauliError> {
    let parts: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(';'))
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect();
    let first = parts.first().ok_or(PauliError::Empty)?;
    StabGroup::parse_strings(first.chars().count(), &parts)
}
