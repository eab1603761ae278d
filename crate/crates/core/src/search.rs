//! Class enumeration.
//!
//! Two independent strategies produce the same class sets:
//!
//! * iterative extension: start from the `[[n, n-1]]` groups generated by
//!   one Z string of each weight and repeatedly add one commuting Pauli to
//!   every class representative;
//! * codeword stabilized (CWS): pair each local-complementation orbit of
//!   graph states with every linear code and convert.
//!
//! Classes are deduplicated by canonical key. Indices are the rank of the
//! key within its `(n, k)` cell.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use dashmap::DashMap;
use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::canon::{canonical_form, class_key, class_key_with_aut, CanonicalKey, ColoredGraph, BLACK};
use crate::f2::{low_mask, BitMatrix};
use crate::pauli::{symplectic_word, PauliError, StabGroup};
use crate::transform::{apply_local_clifford, map_word, LetterPerm, LocalClifford};

/// Largest qubit count accepted by the enumerators.
pub const MAX_ENUM_QUBITS: usize = 12;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("search budget of {limit} canonical forms exhausted; levels k >= {completed_down_to} are complete")]
    Budget { limit: u64, completed_down_to: usize, completed: Box<Enumeration> },
    #[error("invalid level: n = {n}, k_min = {k_min}")]
    BadLevel { n: usize, k_min: usize },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("code rows are linearly dependent")]
    DependentCode,
    #[error("code matrix has {found} columns, expected {expected}")]
    CodeWidth { expected: usize, found: usize },
    #[error("bad graph: {0}")]
    BadGraph(String),
    #[error("bad code: {0}")]
    BadCode(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// One class of an `(n, k)` cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassEntry {
    pub key: CanonicalKey,
    pub rep: StabGroup,
    pub index: usize,
    pub aut_size: BigUint,
}

/// Enumeration output: classes per `k`, each list sorted by key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub n: usize,
    pub levels: BTreeMap<usize, Vec<ClassEntry>>,
}

impl Enumeration {
    pub fn level(&self, k: usize) -> Option<&[ClassEntry]> {
        self.levels.get(&k).map(Vec::as_slice)
    }

    /// `(k, count)` in increasing `k`.
    pub fn counts(&self) -> Vec<(usize, usize)> {
        self.levels.iter().map(|(&k, v)| (k, v.len())).collect()
    }

    pub fn total(&self) -> usize {
        self.levels.values().map(Vec::len).sum()
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Upper bound on canonical-form computations.
    pub budget: Option<u64>,
}

fn run_in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, SearchError> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| SearchError::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Counts canonical-form calls against an optional limit.
struct Budget {
    limit: Option<u64>,
    used: AtomicU64,
    exhausted: AtomicBool,
}

impl Budget {
    fn new(limit: Option<u64>) -> Self {
        Budget { limit, used: AtomicU64::new(0), exhausted: AtomicBool::new(false) }
    }

    fn take(&self) -> bool {
        let Some(limit) = self.limit else { return true };
        if self.used.fetch_add(1, Ordering::Relaxed) >= limit {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn exhausted(&self) -> bool {
        self.exhausted.load(Ordering::Relaxed)
    }
}

/// Concurrent dedup table. For each key the representative with the
/// smallest `(source, candidate)` position wins, so the result does not
/// depend on scheduling.
struct ClassTable {
    map: DashMap<CanonicalKey, ((usize, usize), StabGroup, BigUint)>,
}

impl ClassTable {
    fn new() -> Self {
        ClassTable { map: DashMap::new() }
    }

    fn offer(&self, key: CanonicalKey, order: (usize, usize), rep: StabGroup, aut: BigUint) {
        self.map
            .entry(key)
            .and_modify(|e| {
                if order < e.0 {
                    *e = (order, rep.clone(), aut.clone());
                }
            })
            .or_insert_with(|| (order, rep, aut));
    }

    fn into_sorted(self) -> Vec<ClassEntry> {
        let mut v: Vec<_> = self.map.into_iter().collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v.into_iter()
            .enumerate()
            .map(|(index, (key, (_, rep, aut_size)))| ClassEntry { key, rep, index, aut_size })
            .collect()
    }
}

fn trivial_entry(n: usize) -> Result<ClassEntry, PauliError> {
    let rep = StabGroup::trivial(n);
    let (key, aut_size) = class_key_with_aut(&rep)?;
    Ok(ClassEntry { key, rep, index: 0, aut_size })
}

/// Coset representatives of the extensions: one Pauli per nontrivial coset
/// of the group inside its centralizer, each reduced against the group's
/// echelon basis, in increasing integer order.
fn extension_words(rep: &StabGroup) -> Vec<u64> {
    let basis = rep.basis();
    let logicals: Vec<u64> = rep.logical_pairs().into_iter().flat_map(|(x, z)| [x.word(), z.word()]).collect();
    let mut out = Vec::with_capacity((1usize << logicals.len()).saturating_sub(1));
    let mut acc = 0u64;
    for i in 1u64..(1 << logicals.len()) {
        acc ^= logicals[i.trailing_zeros() as usize];
        out.push(basis.reduce(acc));
    }
    out.sort_unstable();
    debug_assert!(out.iter().all(|&w| rep.words().iter().all(|&r| !symplectic_word(w, r, rep.n()))));
    out
}

/// All distinct groups `<rep, P>` with `P` commuting with `rep` and outside
/// it: one per nontrivial coset of `rep` in its centralizer (`4^k - 1`).
pub fn extend_class(rep: &StabGroup) -> Vec<StabGroup> {
    extension_words(rep).into_iter().map(|w| extend_with(rep, w)).collect()
}

fn extend_with(rep: &StabGroup, w: u64) -> StabGroup {
    let mut words = rep.words().to_vec();
    words.push(w);
    StabGroup::from_words_unchecked(rep.n(), words)
}

/// `<Z^w I^(n-w)>` for `w = 1..=n`.
pub fn seed_groups(n: usize) -> Vec<StabGroup> {
    (1..=n).map(|w| StabGroup::from_words_unchecked(n, vec![low_mask(w) << n])).collect()
}

pub fn enumerate_classes(n: usize, k_min: usize) -> Result<Enumeration, SearchError> {
    enumerate_classes_with(n, k_min, &SearchOptions::default())
}

pub fn enumerate_classes_with(n: usize, k_min: usize, opts: &SearchOptions) -> Result<Enumeration, SearchError> {
    if n == 0 || n > MAX_ENUM_QUBITS || k_min > n {
        return Err(SearchError::BadLevel { n, k_min });
    }
    run_in_pool(opts.threads, || enumerate_inner(n, k_min, opts.budget))?
}

fn enumerate_inner(n: usize, k_min: usize, limit: Option<u64>) -> Result<Enumeration, SearchError> {
    let budget = Budget::new(limit);
    let mut out = Enumeration { n, levels: BTreeMap::new() };
    out.levels.insert(n, vec![trivial_entry(n)?]);
    let partial = |out: Enumeration, k: usize| SearchError::Budget {
        limit: limit.unwrap_or(0),
        completed_down_to: k,
        completed: Box::new(out),
    };
    if n == k_min {
        return Ok(out);
    }

    let table = ClassTable::new();
    let seeds = seed_groups(n);
    let failed: Result<(), PauliError> = seeds.into_par_iter().enumerate().try_for_each(|(i, s)| {
        if !budget.take() {
            return Ok(());
        }
        let (key, aut) = class_key_with_aut(&s)?;
        table.offer(key, (i, 0), s, aut);
        Ok(())
    });
    failed?;
    if budget.exhausted() {
        return Err(partial(out, n));
    }
    out.levels.insert(n - 1, table.into_sorted());

    for k in (k_min..n - 1).rev() {
        let bases = &out.levels[&(k + 1)];
        let table = ClassTable::new();
        let failed: Result<(), PauliError> = bases.par_iter().enumerate().try_for_each(|(bi, base)| {
            extension_words(&base.rep).into_par_iter().enumerate().try_for_each(|(ci, w)| {
                if !budget.take() {
                    return Ok(());
                }
                let g = extend_with(&base.rep, w);
                let (key, aut) = class_key_with_aut(&g)?;
                table.offer(key, (bi, ci), g, aut);
                Ok(())
            })
        });
        failed?;
        if budget.exhausted() {
            return Err(partial(out, k + 1));
        }
        out.levels.insert(k, table.into_sorted());
    }
    Ok(out)
}

/// Simple undirected graph on `n` vertices; `adjacency` is symmetric with
/// zero diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphState {
    adjacency: BitMatrix,
}

impl GraphState {
    pub fn empty(n: usize) -> Self {
        GraphState { adjacency: BitMatrix::zeros(n, n) }
    }

    pub fn from_adjacency(adjacency: BitMatrix) -> Result<Self, SearchError> {
        let n = adjacency.nrows();
        if adjacency.ncols() != n {
            return Err(SearchError::BadGraph("adjacency matrix is not square".into()));
        }
        for i in 0..n {
            if adjacency.get(i, i) {
                return Err(SearchError::BadGraph(format!("loop at vertex {i}")));
            }
            for j in 0..i {
                if adjacency.get(i, j) != adjacency.get(j, i) {
                    return Err(SearchError::BadGraph(format!("asymmetric entry ({i}, {j})")));
                }
            }
        }
        Ok(GraphState { adjacency })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, SearchError> {
        if n == 0 || n > MAX_ENUM_QUBITS * 2 {
            return Err(SearchError::BadGraph(format!("unsupported vertex count {n}")));
        }
        let mut g = GraphState::empty(n);
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(SearchError::BadGraph(format!("edge {a}-{b} out of range")));
            }
            if a == b {
                return Err(SearchError::BadGraph(format!("loop at vertex {a}")));
            }
            g.adjacency.set(a, b, true);
            g.adjacency.set(b, a, true);
        }
        Ok(g)
    }

    /// Parses `"0-1;1-2"`; the empty string is the empty graph.
    pub fn parse_edges(s: &str, n: usize) -> Result<Self, SearchError> {
        let mut edges = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (a, b) = part
                .split_once('-')
                .ok_or_else(|| SearchError::BadGraph(format!("expected 'a-b', found {part:?}")))?;
            let parse = |t: &str| {
                t.trim().parse::<usize>().map_err(|_| SearchError::BadGraph(format!("bad vertex {t:?}")))
            };
            edges.push((parse(a)?, parse(b)?));
        }
        GraphState::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adjacency
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency.get(a, b)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| self.has_edge(a, b)).collect()
    }

    pub fn edges_string(&self) -> String {
        self.edges().iter().map(|(a, b)| format!("{a}-{b}")).collect::<Vec<_>>().join(";")
    }

    /// Toggles every edge inside the neighbourhood of `v`.
    pub fn local_complement(&self, v: usize) -> GraphState {
        let nb = self.adjacency.row_word(v);
        let mut out = self.clone();
        for a in (0..self.n()).filter(|&a| nb >> a & 1 == 1) {
            let row = out.adjacency.row_word(a) ^ (nb & !(1 << a));
            for b in 0..self.n() {
                out.adjacency.set(a, b, row >> b & 1 == 1);
            }
        }
        out
    }

    /// `g_j = X_j Z_{N(j)}`.
    pub fn stabilizer_words(&self) -> Vec<u64> {
        let n = self.n();
        (0..n).map(|j| 1u64 << j | self.adjacency.row_word(j) << n).collect()
    }

    pub fn stabilizer(&self) -> StabGroup {
        StabGroup::from_words_unchecked(self.n(), self.stabilizer_words())
    }

    fn colored(&self) -> ColoredGraph {
        let n = self.n();
        let mut g = ColoredGraph::new(vec![BLACK; n]);
        for (a, b) in self.edges() {
            g.add_edge(a, b);
        }
        g
    }

    /// Isomorphism-class key of the graph.
    pub fn iso_key(&self) -> CanonicalKey {
        canonical_form(&self.colored()).key
    }
}

/// One graph per isomorphism class on `n` vertices, by vertex augmentation.
fn graph_iso_classes(n: usize) -> Vec<GraphState> {
    let mut classes = vec![GraphState::empty(1)];
    for m in 2..=n {
        let found: BTreeMap<CanonicalKey, GraphState> = classes
            .par_iter()
            .flat_map_iter(|g| {
                (0u64..1 << (m - 1)).map(move |mask| {
                    let mut edges = g.edges();
                    edges.extend((0..m - 1).filter(|&a| mask >> a & 1 == 1).map(|a| (a, m - 1)));
                    let h = GraphState::from_edges(m, &edges).expect("valid edges");
                    (h.iso_key(), h)
                })
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(BTreeMap::new(), |mut acc, (k, h)| {
                acc.entry(k).or_insert(h);
                acc
            });
        classes = found.into_values().collect();
    }
    classes
}

/// Representatives of graph classes under isomorphism and local
/// complementation, sorted by isomorphism key (each orbit is represented by
/// its smallest key).
pub fn graphstate_orbits(n: usize) -> Vec<GraphState> {
    assert!((1..=MAX_ENUM_QUBITS).contains(&n), "unsupported vertex count {n}");
    let mut classes: Vec<(CanonicalKey, GraphState)> =
        graph_iso_classes(n).into_iter().map(|g| (g.iso_key(), g)).collect();
    classes.sort_by(|a, b| a.0.cmp(&b.0));
    let index: BTreeMap<&CanonicalKey, usize> = classes.iter().enumerate().map(|(i, (k, _))| (k, i)).collect();
    let mut parent: Vec<usize> = (0..classes.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let links: Vec<(usize, usize)> = classes
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, (_, g))| {
            (0..n).map(move |v| (i, g.local_complement(v).iso_key())).collect::<Vec<_>>()
        })
        .map(|(i, key)| (i, index[&key]))
        .collect();
    for (i, j) in links {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        parent[a.max(b)] = a.min(b);
    }
    (0..classes.len()).filter(|&i| find(&mut parent, i) == i).map(|i| classes[i].1.clone()).collect()
}

/// Parses code rows such as `"10100;01010"` into a `k x n` matrix.
pub fn parse_code(s: &str, n: usize) -> Result<BitMatrix, SearchError> {
    let mut m = BitMatrix::new(n);
    for row in s.split(';').map(str::trim).filter(|r| !r.is_empty()) {
        if row.chars().count() != n {
            return Err(SearchError::CodeWidth { expected: n, found: row.chars().count() });
        }
        let mut w = 0u64;
        for (j, c) in row.chars().enumerate() {
            match c {
                '0' => {}
                '1' => w |= 1 << j,
                other => return Err(SearchError::BadCode(format!("unexpected character {other:?}"))),
            }
        }
        m.push_word(w);
    }
    Ok(m)
}

/// Stabilizer of the CWS code defined by a graph state and the word
/// operators `Z^c` for the rows `c` of `code`.
pub fn cws_to_stabilizer(gs: &GraphState, code: &BitMatrix) -> Result<StabGroup, SearchError> {
    let n = gs.n();
    if code.ncols() != n {
        return Err(SearchError::CodeWidth { expected: n, found: code.ncols() });
    }
    if code.nrows() > n || code.rank() != code.nrows() {
        return Err(SearchError::DependentCode);
    }
    let mut gens: Vec<Option<u64>> = gs.stabilizer_words().into_iter().map(Some).collect();
    for &c in code.words() {
        let zc = c << n;
        let omega: Vec<usize> = (0..n).filter(|&i| gens[i].is_some_and(|g| symplectic_word(g, zc, n))).collect();
        let (&first, rest) = omega.split_first().ok_or(SearchError::DependentCode)?;
        let g1 = gens[first].expect("selected generator is present");
        for &i in rest {
            gens[i] = gens[i].map(|g| g ^ g1);
        }
        gens[first] = None;
    }
    Ok(StabGroup::from_words_unchecked(n, gens.into_iter().flatten().collect()))
}

/// CWS description of a stabilizer group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CwsForm {
    pub graph: GraphState,
    /// `k x n`; row `l` is the word operator `Z^c` of logical qubit `l`.
    pub words: BitMatrix,
    /// Local Clifford taking the input group onto the CWS form.
    pub clifford: LocalClifford,
}

/// Converts a group to CWS form: completes it with logical Z operators to
/// a stabilizer state, brings that state to graph form by local Cliffords,
/// and expresses the transformed logical X operators as Z strings modulo
/// the graph stabilizer.
pub fn stabilizer_to_cws(g: &StabGroup) -> CwsForm {
    let n = g.n();
    let pairs = g.logical_pairs();
    let mut full = g.words().to_vec();
    full.extend(pairs.iter().map(|(_, z)| z.word()));
    let full = StabGroup::from_words_unchecked(n, full);
    let form = crate::transform::rsf(&full);
    debug_assert_eq!(form.r + form.middle, n);
    // Hadamard on the middle qubits makes the X block invertible.
    let mut perms = vec![LetterPerm::IDENTITY; n];
    for (q, &pos) in form.perm.image.iter().enumerate() {
        if pos >= form.r {
            perms[q] = LetterPerm::H;
        }
    }
    let after_h = apply_local_clifford(&full, &LocalClifford { perms: perms.clone() });
    let m = low_mask(n);
    let xs = BitMatrix::from_words(n, after_h.words().iter().map(|&w| w & m));
    let inv = xs.rref().transform;
    let rows: Vec<u64> = (0..n)
        .map(|i| {
            let sel = inv.row_word(i);
            after_h.words().iter().enumerate().filter(|(j, _)| sel >> j & 1 == 1).fold(0, |a, (_, &w)| a ^ w)
        })
        .collect();
    // Row i is now X_i Z^{Γ_i}; a Y on the diagonal is turned into X.
    let mut adjacency = BitMatrix::zeros(n, n);
    for (i, &w) in rows.iter().enumerate() {
        debug_assert_eq!(w & m, 1 << i);
        let z = w >> n;
        if z >> i & 1 == 1 {
            perms[i] = LetterPerm::S.after(perms[i]);
        }
        for j in (0..n).filter(|&j| j != i && z >> j & 1 == 1) {
            adjacency.set(i, j, true);
        }
    }
    let graph = GraphState::from_adjacency(adjacency).expect("commuting rows give a symmetric matrix");
    let clifford = LocalClifford { perms };
    debug_assert!(apply_local_clifford(&full, &clifford).same_group(&graph.stabilizer()));
    // X^a Z^b equals Z^(b + Γa) times graph generators.
    let mut words = BitMatrix::new(n);
    for (x, _) in &pairs {
        let w = map_word(x.word(), n, &clifford.perms);
        let (a, b) = (w & m, w >> n);
        let gamma_a = (0..n).filter(|&j| a >> j & 1 == 1).fold(0, |acc, j| acc ^ graph.adjacency.row_word(j));
        words.push_word(b ^ gamma_a);
    }
    CwsForm { graph, words, clifford }
}

/// All `k x n` matrices in reduced row echelon form with `k` nonzero rows.
pub fn rref_codes(n: usize, k: usize) -> Vec<BitMatrix> {
    let mut out = Vec::new();
    for pivots in 0u64..1 << n {
        if pivots.count_ones() as usize != k {
            continue;
        }
        let piv: Vec<usize> = (0..n).filter(|&j| pivots >> j & 1 == 1).collect();
        // free positions: non-pivot columns to the right of each pivot
        let free: Vec<(usize, usize)> = piv
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (p + 1..n).filter(|&j| pivots >> j & 1 == 0).map(move |j| (i, j)))
            .collect();
        for fill in 0u64..1 << free.len() {
            let mut rows: Vec<u64> = piv.iter().map(|&p| 1u64 << p).collect();
            for (b, &(i, j)) in free.iter().enumerate() {
                if fill >> b & 1 == 1 {
                    rows[i] |= 1 << j;
                }
            }
            out.push(BitMatrix::from_words(n, rows));
        }
    }
    out
}

/// Classes of one `(n, k)` cell from graph states and linear codes.
pub fn cws_enumerate(n: usize, k: usize) -> Result<Vec<ClassEntry>, SearchError> {
    cws_enumerate_with(n, k, &SearchOptions::default())
}

pub fn cws_enumerate_with(n: usize, k: usize, opts: &SearchOptions) -> Result<Vec<ClassEntry>, SearchError> {
    if n == 0 || n > MAX_ENUM_QUBITS || k > n {
        return Err(SearchError::BadLevel { n, k_min: k });
    }
    run_in_pool(opts.threads, || {
        let budget = Budget::new(opts.budget);
        let graphs = graphstate_orbits(n);
        let codes = rref_codes(n, k);
        let table = ClassTable::new();
        let pairs: Vec<(usize, usize)> =
            (0..graphs.len()).flat_map(|gi| (0..codes.len()).map(move |ci| (gi, ci))).collect();
        pairs.into_par_iter().try_for_each(|(gi, ci)| -> Result<(), SearchError> {
            if !budget.take() {
                return Ok(());
            }
            let g = cws_to_stabilizer(&graphs[gi], &codes[ci])?;
            let (key, aut) = class_key_with_aut(&g)?;
            table.offer(key, (gi, ci), g, aut);
            Ok(())
        })?;
        if budget.exhausted() {
            return Err(SearchError::Budget {
                limit: opts.budget.unwrap_or(0),
                completed_down_to: k + 1,
                completed: Box::new(Enumeration { n, levels: BTreeMap::new() }),
            });
        }
        Ok(table.into_sorted())
    })?
}

/// Keys of the classes reachable from `rep` by adding one generator.
pub fn children_of(rep: &StabGroup) -> Result<BTreeSet<CanonicalKey>, PauliError> {
    extend_class(rep).par_iter().map(class_key).collect()
}

/// Parent-child relations between consecutive levels: `(P, C)` when some
/// extension of the representative of `P` lies in `C`. Sorted, no
/// duplicates.
pub fn parent_child_edges(classes: &Enumeration) -> Result<Vec<(CanonicalKey, CanonicalKey)>, PauliError> {
    let mut edges = BTreeSet::new();
    for (&k, parents) in &classes.levels {
        if k == 0 || !classes.levels.contains_key(&(k - 1)) {
            continue;
        }
        for p in parents {
            for c in children_of(&p.rep)? {
                edges.insert((p.key.clone(), c));
            }
        }
    }
    Ok(edges.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::random_lcperm;

    fn g(s: &str) -> StabGroup {
        StabGroup::parse(s).unwrap()
    }

    #[test]
    fn extend_examples() {
        let ext = extend_class(&StabGroup::trivial(1));
        assert_eq!(ext.len(), 3);
        let keys: BTreeSet<_> = ext.iter().map(|e| class_key(e).unwrap()).collect();
        assert_eq!(keys.len(), 1);

        let zz = g("ZZ");
        let ext = extend_class(&zz);
        assert_eq!(ext.len(), 3);
        for e in &ext {
            assert_eq!(e.rank(), 2);
        }
        let keys: BTreeSet<_> = ext.iter().map(|e| class_key(e).unwrap()).collect();
        assert_eq!(keys.len(), 2);
    }

    #[test]
    fn extensions_cover_every_commuting_pauli() {
        for s in ["ZZI", "XXX;ZZI", "ZIXZ;YXYI;IZZX", "XZZXI;IXZZX"] {
            let base = g(s);
            let n = base.n();
            let ext = extend_class(&base);
            assert_eq!(ext.len(), (1 << (2 * base.k())) - 1);
            let canon: BTreeSet<_> = ext.iter().map(|e| e.canonical().words().to_vec()).collect();
            assert_eq!(canon.len(), ext.len());
            // brute force: every commuting Pauli outside the group gives one of them
            for w in 1u64..1 << (2 * n) {
                let commutes = base.words().iter().all(|&r| !symplectic_word(w, r, n));
                if commutes && !base.basis().contains(w) {
                    let e = extend_with(&base, w).canonical().words().to_vec();
                    assert!(canon.contains(&e));
                }
            }
        }
    }

    #[test]
    fn small_counts() {
        let e1 = enumerate_classes(1, 0).unwrap();
        assert_eq!(e1.counts(), vec![(0, 1), (1, 1)]);
        let e2 = enumerate_classes(2, 0).unwrap();
        assert_eq!(e2.counts(), vec![(0, 2), (1, 2), (2, 1)]);
        let e3 = enumerate_classes(3, 0).unwrap();
        assert_eq!(e3.counts(), vec![(0, 3), (1, 5), (2, 3), (3, 1)]);
        let e3 = enumerate_classes(3, 2).unwrap();
        assert_eq!(e3.counts(), vec![(2, 3), (3, 1)]);
        for lvl in e2.levels.values() {
            for (i, c) in lvl.iter().enumerate() {
                assert_eq!(c.index, i);
            }
            assert!(lvl.windows(2).all(|w| w[0].key < w[1].key));
        }
    }

    #[test]
    fn seeds_match_extension_of_trivial_group() {
        for n in 1..=4 {
            let from_seeds: BTreeSet<_> = seed_groups(n).iter().map(|s| class_key(s).unwrap()).collect();
            let from_trivial = children_of(&StabGroup::trivial(n)).unwrap();
            assert_eq!(from_seeds, from_trivial);
            assert_eq!(from_seeds.len(), n);
        }
    }

    #[test]
    fn budget_reports_partial_levels() {
        let err = enumerate_classes_with(3, 0, &SearchOptions { threads: Some(1), budget: Some(10) }).unwrap_err();
        match err {
            SearchError::Budget { completed, completed_down_to, .. } => {
                assert_eq!(completed_down_to, 2);
                assert_eq!(completed.counts(), vec![(2, 3), (3, 1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(enumerate_classes(2, 3), Err(SearchError::BadLevel { .. })));
    }

    #[test]
    fn local_complement_examples() {
        let path = GraphState::parse_edges("0-1;1-2", 3).unwrap();
        let tri = path.local_complement(1);
        assert_eq!(tri.edges(), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(tri.local_complement(1), path);
        assert!(GraphState::parse_edges("0-3", 3).is_err());
        assert!(GraphState::parse_edges("0-0", 3).is_err());
        assert!(GraphState::parse_edges("01", 3).is_err());
    }

    fn brute_orbits(n: usize) -> usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let graphs: Vec<GraphState> = (0u64..1 << pairs.len())
            .map(|m| {
                let e: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &p)| p).collect();
                GraphState::from_edges(n, &e).unwrap()
            })
            .collect();
        let idx = |g: &GraphState| graphs.iter().position(|h| h == g).unwrap();
        let perms = {
            let mut ps = vec![vec![]];
            for m in 0..n {
                ps = ps
                    .into_iter()
                    .flat_map(|p: Vec<usize>| {
                        (0..=p.len()).map(move |i| {
                            let mut q = p.clone();
                            q.insert(i, m);
                            q
                        })
                    })
                    .collect();
            }
            ps
        };
        let mut seen = vec![false; graphs.len()];
        let mut orbits = 0;
        for start in 0..graphs.len() {
            if seen[start] {
                continue;
            }
            orbits += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(i) = stack.pop() {
                let gr = &graphs[i];
                let mut next: Vec<GraphState> = (0..n).map(|v| gr.local_complement(v)).collect();
                for p in &perms {
                    let e: Vec<_> = gr.edges().iter().map(|&(a, b)| (p[a], p[b])).collect();
                    next.push(GraphState::from_edges(n, &e).unwrap());
                }
                for h in next {
                    let j = idx(&h);
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        orbits
    }

    #[test]
    fn graph_orbits_match_brute_force() {
        assert_eq!(graphstate_orbits(1).len(), 1);
        assert_eq!(graphstate_orbits(2).len(), 2);
        for n in 3..=4 {
            assert_eq!(graphstate_orbits(n).len(), brute_orbits(n), "{n}");
        }
        assert_eq!(graph_iso_classes(4).len(), 11);
        assert_eq!(graph_iso_classes(5).len(), 34);
    }

    #[test]
    fn cws_examples() {
        let empty = BitMatrix::new(2);
        let edge = GraphState::parse_edges("0-1", 2).unwrap();
        assert!(cws_to_stabilizer(&edge, &empty).unwrap().same_group(&g("XZ;ZX")));
        let ring = GraphState::parse_edges("0-1;1-2;2-3;3-4;4-0", 5).unwrap();
        let code = parse_code("11111", 5).unwrap();
        let five = cws_to_stabilizer(&ring, &code).unwrap();
        assert_eq!(five.k(), 1);
        assert_eq!(class_key(&five).unwrap(), class_key(&g("YYZZI;YZYIZ;XIZXZ;XZIZX")).unwrap());
        let dep = parse_code("11000;11000", 5).unwrap();
        assert!(matches!(cws_to_stabilizer(&ring, &dep), Err(SearchError::DependentCode)));
        assert!(parse_code("1100", 5).is_err());
        assert!(parse_code("11a00", 5).is_err());
    }

    #[test]
    fn stabilizer_to_cws_round_trip() {
        let bell = stabilizer_to_cws(&g("XX;ZZ"));
        assert_eq!(bell.graph.edges(), vec![(0, 1)]);
        let path = GraphState::parse_edges("0-1;1-2", 3).unwrap();
        let same = stabilizer_to_cws(&path.stabilizer());
        assert_eq!(same.graph, path);
        assert_eq!(same.clifford, LocalClifford::identity(3));
        let reps = ["YYZZI;YZYIZ;XIZXZ;XZIZX", "ZZZZ;XXXX", "ZIXZ;YXYI;IZZX", "XII;IZZ", "ZZI"];
        for (i, s) in reps.iter().enumerate() {
            for seed in 0..6u64 {
                let grp = random_lcperm(g(s).n(), seed * 3 + i as u64).apply(&g(s));
                let cws = stabilizer_to_cws(&grp);
                let back = cws_to_stabilizer(&cws.graph, &cws.words).unwrap();
                assert!(back.same_group(&apply_local_clifford(&grp, &cws.clifford)), "{s}");
                assert_eq!(class_key(&back).unwrap(), class_key(&grp).unwrap());
            }
        }
        let trivial = stabilizer_to_cws(&StabGroup::trivial(2));
        assert_eq!(cws_to_stabilizer(&trivial.graph, &trivial.words).unwrap().rank(), 0);
    }

    #[test]
    fn rref_code_counts() {
        assert_eq!(rref_codes(4, 2).len(), 35);
        assert_eq!(rref_codes(3, 0).len(), 1);
        assert_eq!(rref_codes(3, 3).len(), 1);
        for c in rref_codes(4, 2) {
            assert_eq!(c.rref().reduced, c);
        }
    }

    #[test]
    fn cws_matches_iterative_small() {
        let it = enumerate_classes(4, 0).unwrap();
        for k in 0..=4 {
            let a: Vec<_> = it.level(k).unwrap().iter().map(|c| c.key.clone()).collect();
            let b: Vec<_> = cws_enumerate(4, k).unwrap().into_iter().map(|c| c.key).collect();
            assert_eq!(a, b, "k = {k}");
        }
    }

    #[test]
    fn parent_child_examples() {
        let e1 = enumerate_classes(1, 0).unwrap();
        let edges = parent_child_edges(&e1).unwrap();
        assert_eq!(edges.len(), 1);
        assert_eq!(edges[0].1, class_key(&g("X")).unwrap());

        let kids = children_of(&g("ZZZZ;XXXX")).unwrap();
        assert!(kids.contains(&class_key(&g("ZIXZ;YXYI;IZZX")).unwrap()));
        assert!(kids.contains(&class_key(&g("ZZZZ;XXXX;XYZI")).unwrap()));
    }
}
