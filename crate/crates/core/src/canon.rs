//! Code graphs and canonical labeling.
//!
//! A stabilizer group becomes a two-coloured graph: one black vertex per
//! group element, one white triangle per qubit (vertices for X, Y, Z), and
//! an edge from each black vertex to the white vertex of every non-identity
//! letter it carries. Two groups are equivalent under local Cliffords and
//! qubit permutations exactly when their code graphs are isomorphic, and the
//! automorphism group of the graph is the stabilizer of the group.
//!
//! Canonical labeling is a partition-backtracking search: equitable
//! refinement, individualization of the first smallest non-singleton cell,
//! pruning by node invariants and by automorphisms found at equivalent
//! leaves.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::pauli::{PauliError, StabGroup};
use crate::transform::{LCPerm, LetterPerm, LocalClifford, QubitPerm};

pub const BLACK: u8 = 1;
pub const WHITE: u8 = 2;

/// Undirected vertex-coloured simple graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    colors: Vec<u8>,
    adj: Vec<Vec<u32>>,
}

impl ColoredGraph {
    pub fn new(colors: Vec<u8>) -> Self {
        assert!(colors.len() < u16::MAX as usize, "graph too large");
        let adj = vec![Vec::new(); colors.len()];
        ColoredGraph { colors, adj }
    }

    pub fn num_vertices(&self) -> usize {
        self.colors.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn color(&self, v: usize) -> u8 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    /// Adds `u - v`; loops and repeated edges are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            return;
        }
        if let Err(i) = self.adj[u].binary_search(&(v as u32)) {
            self.adj[u].insert(i, v as u32);
            let j = self.adj[v].binary_search(&(u as u32)).unwrap_err();
            self.adj[v].insert(j, u as u32);
        }
    }

    /// Edges `(u, v)` with `u < v`, in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().map(move |&v| (u, v as usize)).filter(|&(u, v)| u < v))
    }

    /// Graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[u32]) -> ColoredGraph {
        let mut colors = vec![0; self.num_vertices()];
        for (v, &c) in self.colors.iter().enumerate() {
            colors[perm[v] as usize] = c;
        }
        let mut out = ColoredGraph::new(colors);
        for (u, v) in self.edges() {
            out.add_edge(perm[u] as usize, perm[v] as usize);
        }
        out
    }

    /// Whether `perm` maps the graph onto itself.
    pub fn is_automorphism(&self, perm: &[u32]) -> bool {
        self.colors.iter().enumerate().all(|(v, &c)| self.colors[perm[v] as usize] == c)
            && self.edges().all(|(u, v)| self.has_edge(perm[u] as usize, perm[v] as usize))
    }
}

/// Code graph of a stabilizer group. Black vertices come first, in the
/// order of [`StabGroup::span_words`]; the white vertices of qubit `j`
/// follow at `2^r + 3j + {0, 1, 2}` for X, Y, Z.
pub fn build_code_graph(s: &StabGroup) -> Result<ColoredGraph, PauliError> {
    let n = s.n();
    let span = s.span_words()?;
    let t = span.len();
    let mut colors = vec![BLACK; t];
    colors.resize(t + 3 * n, WHITE);
    let mut g = ColoredGraph::new(colors);
    for j in 0..n {
        let w = t + 3 * j;
        g.add_edge(w, w + 1);
        g.add_edge(w + 1, w + 2);
        g.add_edge(w, w + 2);
    }
    for (b, &word) in span.iter().enumerate() {
        for j in 0..n {
            let x = (word >> j) & 1;
            let z = (word >> (n + j)) & 1;
            let offset = match (x, z) {
                (0, 0) => continue,
                (1, 0) => 0,
                (1, 1) => 1,
                _ => 2,
            };
            g.add_edge(b, t + 3 * j + offset);
        }
    }
    Ok(g)
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid canonical key: {0}")]
pub struct KeyError(String);

/// Byte string identifying an isomorphism class of coloured graphs.
///
/// Layout: vertex count (u16 BE), colour of each vertex in canonical
/// order, then every edge `(i, j)`, `i < j`, as two u16 BE labels in
/// increasing order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, KeyError> {
        let bytes = hex::decode(s).map_err(|e| KeyError(e.to_string()))?;
        if bytes.len() < 2 {
            return Err(KeyError("too short".into()));
        }
        let nv = u16::from_be_bytes([bytes[0], bytes[1]]) as usize;
        let rest = bytes.len().checked_sub(2 + nv).ok_or_else(|| KeyError("truncated colours".into()))?;
        if rest % 4 != 0 {
            return Err(KeyError("ragged edge list".into()));
        }
        Ok(CanonicalKey(bytes))
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for CanonicalKey {
    type Err = KeyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CanonicalKey::from_hex(s)
    }
}

/// Output of [`canonical_form`].
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    /// `labeling[v]` is the canonical index of vertex `v`.
    pub labeling: Vec<u32>,
    pub aut_size: BigUint,
    /// Automorphisms found during the search; they generate the group.
    pub generators: Vec<Vec<u32>>,
}

fn mix(h: u64, v: u64) -> u64 {
    let mut x = h ^ v.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x ^= x >> 29;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 32;
    x
}

/// Ordered partition of the vertex set.
#[derive(Clone)]
struct Partition {
    lab: Vec<u32>,
    pos: Vec<u32>,
    /// Start of the cell containing each position.
    start: Vec<u32>,
    /// End (exclusive) of the cell beginning at each start position.
    end: Vec<u32>,
    ncells: usize,
}

impl Partition {
    fn by_color(colors: &[u8]) -> Self {
        let n = colors.len();
        let mut lab: Vec<u32> = (0..n as u32).collect();
        lab.sort_by_key(|&v| (colors[v as usize], v));
        let mut pos = vec![0; n];
        for (p, &v) in lab.iter().enumerate() {
            pos[v as usize] = p as u32;
        }
        let mut start = vec![0; n];
        let mut end = vec![0; n];
        let mut ncells = 0;
        let mut p = 0;
        while p < n {
            let c = colors[lab[p] as usize];
            let mut e = p;
            while e < n && colors[lab[e] as usize] == c {
                start[e] = p as u32;
                e += 1;
            }
            end[p] = e as u32;
            ncells += 1;
            p = e;
        }
        Partition { lab, pos, start, end, ncells }
    }

    fn is_discrete(&self) -> bool {
        self.ncells == self.lab.len()
    }

    fn cell_starts(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.ncells);
        let mut p = 0;
        while p < self.lab.len() {
            out.push(p as u32);
            p = self.end[p] as usize;
        }
        out
    }

    /// First smallest cell with more than one vertex.
    fn target_cell(&self) -> Option<u32> {
        let mut best: Option<(u32, u32)> = None;
        let mut p = 0;
        while p < self.lab.len() {
            let e = self.end[p];
            let size = e - p as u32;
            if size > 1 && best.is_none_or(|(_, s)| size < s) {
                best = Some((p as u32, size));
            }
            p = e as usize;
        }
        best.map(|(p, _)| p)
    }

    /// Splits `v` off the front of its cell; returns the new singleton's
    /// position.
    fn individualize(&mut self, v: u32) -> u32 {
        let p = self.pos[v as usize];
        let c = self.start[p as usize];
        let e = self.end[c as usize];
        let w = self.lab[c as usize];
        self.lab.swap(c as usize, p as usize);
        self.pos[v as usize] = c;
        self.pos[w as usize] = p;
        self.end[c as usize] = c + 1;
        for q in c + 1..e {
            self.start[q as usize] = c + 1;
        }
        self.end[(c + 1) as usize] = e;
        self.ncells += 1;
        c
    }
}

struct Scratch {
    count: Vec<u32>,
    in_queue: Vec<bool>,
    touched: Vec<u32>,
    items: Vec<(u32, u32)>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { count: vec![0; n], in_queue: vec![false; n], touched: Vec::new(), items: Vec::new() }
    }
}

/// Equitable refinement. Returns an invariant of the refinement process.
fn refine(g: &ColoredGraph, part: &mut Partition, init: &[u32], sc: &mut Scratch) -> u64 {
    let n = part.lab.len();
    let mut h = 0x5354_4142_4442u64;
    let mut queue: VecDeque<u32> = VecDeque::new();
    for &s in init {
        if !sc.in_queue[s as usize] {
            sc.in_queue[s as usize] = true;
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        sc.in_queue[s as usize] = false;
        if part.ncells == n {
            continue;
        }
        let e = part.end[s as usize];
        sc.touched.clear();
        for p in s..e {
            let w = part.lab[p as usize];
            for &u in &g.adj[w as usize] {
                if sc.count[u as usize] == 0 {
                    sc.touched.push(u);
                }
                sc.count[u as usize] += 1;
            }
        }
        let mut cells: Vec<u32> = sc.touched.iter().map(|&u| part.start[part.pos[u as usize] as usize]).collect();
        cells.sort_unstable();
        cells.dedup();
        for c in cells {
            let ce = part.end[c as usize];
            if ce - c == 1 {
                continue;
            }
            sc.items.clear();
            sc.items.extend((c..ce).map(|p| {
                let v = part.lab[p as usize];
                (sc.count[v as usize], v)
            }));
            sc.items.sort_unstable();
            if sc.items[0].0 == sc.items[sc.items.len() - 1].0 {
                continue;
            }
            h = mix(mix(h, s as u64), c as u64);
            let mut groups: Vec<(u32, u32)> = Vec::new();
            let mut gs = c;
            for (i, &(cnt, v)) in sc.items.iter().enumerate() {
                let p = c + i as u32;
                part.lab[p as usize] = v;
                part.pos[v as usize] = p;
                if i > 0 && cnt != sc.items[i - 1].0 {
                    groups.push((gs, p));
                    h = mix(mix(h, sc.items[i - 1].0 as u64), (p - gs) as u64);
                    gs = p;
                }
            }
            groups.push((gs, ce));
            h = mix(mix(h, sc.items[sc.items.len() - 1].0 as u64), (ce - gs) as u64);
            for &(a, b) in &groups {
                for p in a..b {
                    part.start[p as usize] = a;
                }
                part.end[a as usize] = b;
            }
            part.ncells += groups.len() - 1;
            if sc.in_queue[c as usize] {
                for &(a, _) in &groups[1..] {
                    sc.in_queue[a as usize] = true;
                    queue.push_back(a);
                }
            } else {
                let mut largest = 0;
                for (i, &(a, b)) in groups.iter().enumerate() {
                    if b - a > groups[largest].1 - groups[largest].0 {
                        largest = i;
                    }
                }
                for (i, &(a, _)) in groups.iter().enumerate() {
                    if i != largest {
                        sc.in_queue[a as usize] = true;
                        queue.push_back(a);
                    }
                }
            }
        }
        for &u in &sc.touched {
            sc.count[u as usize] = 0;
        }
    }
    mix(h, part.ncells as u64)
}

struct Leaf {
    lab: Vec<u32>,
    path: Vec<u32>,
    traces: Vec<u64>,
    rows: Vec<u64>,
}

struct Search<'a> {
    g: &'a ColoredGraph,
    words: usize,
    sc: Scratch,
    first: Option<Leaf>,
    best: Option<Leaf>,
    gens: Vec<Vec<u32>>,
}

impl<'a> Search<'a> {
    fn rows_of(&self, part: &Partition) -> Vec<u64> {
        let n = part.lab.len();
        let mut rows = vec![0u64; n * self.words];
        for i in 0..n {
            let v = part.lab[i] as usize;
            let row = &mut rows[i * self.words..(i + 1) * self.words];
            for &u in &self.g.adj[v] {
                let q = part.pos[u as usize] as usize;
                row[q / 64] |= 1 << (q % 64);
            }
        }
        rows
    }

    /// Generators fixing every vertex of `path`.
    fn stabilizer_orbits(&self, path: &[u32]) -> Vec<u32> {
        let n = self.g.num_vertices();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(parent: &mut [u32], mut v: u32) -> u32 {
            while parent[v as usize] != v {
                parent[v as usize] = parent[parent[v as usize] as usize];
                v = parent[v as usize];
            }
            v
        }
        for gamma in self.gens.iter().filter(|gm| path.iter().all(|&v| gm[v as usize] == v)) {
            for v in 0..n as u32 {
                let (a, b) = (find(&mut parent, v), find(&mut parent, gamma[v as usize]));
                if a != b {
                    parent[a.max(b) as usize] = a.min(b);
                }
            }
        }
        (0..n as u32).map(|v| find(&mut parent, v)).collect()
    }

    /// Records `gamma` (current leaf to `target`) and returns the level to
    /// unwind to when the current subtree is an image of an explored one.
    fn record_automorphism(&mut self, lab: &[u32], path: &[u32], target_lab: &[u32], target_path: &[u32]) -> Option<usize> {
        let n = lab.len();
        let mut gamma = vec![0u32; n];
        for i in 0..n {
            gamma[lab[i] as usize] = target_lab[i];
        }
        debug_assert!(self.g.is_automorphism(&gamma));
        let c = path.iter().zip(target_path).take_while(|(a, b)| a == b).count();
        let jump = c < path.len()
            && c < target_path.len()
            && path[..c].iter().all(|&v| gamma[v as usize] == v)
            && gamma[path[c] as usize] == target_path[c];
        if gamma.iter().enumerate().any(|(v, &t)| v as u32 != t) {
            self.gens.push(gamma);
        }
        jump.then_some(c)
    }

    fn leaf(&mut self, part: &Partition, path: &[u32], traces: &[u64]) -> Option<usize> {
        let rows = self.rows_of(part);
        if self.first.is_none() {
            let leaf = Leaf { lab: part.lab.clone(), path: path.to_vec(), traces: traces.to_vec(), rows };
            self.best = Some(Leaf { lab: leaf.lab.clone(), path: leaf.path.clone(), traces: leaf.traces.clone(), rows: leaf.rows.clone() });
            self.first = Some(leaf);
            return None;
        }
        let first = self.first.as_ref().unwrap();
        if first.rows == rows {
            let (fl, fp) = (first.lab.clone(), first.path.clone());
            return self.record_automorphism(&part.lab, path, &fl, &fp);
        }
        let best = self.best.as_ref().unwrap();
        match (traces, &rows).cmp(&(best.traces.as_slice(), &best.rows)) {
            std::cmp::Ordering::Greater => {
                self.best = Some(Leaf { lab: part.lab.clone(), path: path.to_vec(), traces: traces.to_vec(), rows });
                None
            }
            _ if best.rows == rows => {
                let (bl, bp) = (best.lab.clone(), best.path.clone());
                self.record_automorphism(&part.lab, path, &bl, &bp)
            }
            _ => None,
        }
    }

    fn prune(&self, traces: &[u64]) -> bool {
        let (Some(first), Some(best)) = (&self.first, &self.best) else { return false };
        let d = traces.len();
        if first.traces.len() >= d && first.traces[..d] == *traces {
            return false;
        }
        let m = d.min(best.traces.len());
        traces[..m] < best.traces[..m]
    }

    fn explore(&mut self, part: Partition, path: &mut Vec<u32>, traces: &mut Vec<u64>) -> Option<usize> {
        if self.prune(traces) {
            return None;
        }
        if part.is_discrete() {
            return self.leaf(&part, path, traces);
        }
        let d = path.len();
        let c = part.target_cell().expect("non-discrete partition has a target cell");
        let cell: Vec<u32> = part.lab[c as usize..part.end[c as usize] as usize].to_vec();
        let mut explored: Vec<u32> = Vec::new();
        let mut orbits: Option<(usize, Vec<u32>)> = None;
        for &v in &cell {
            if !explored.is_empty() {
                if orbits.as_ref().is_none_or(|(ng, _)| *ng != self.gens.len()) {
                    orbits = Some((self.gens.len(), self.stabilizer_orbits(path)));
                }
                let orb = &orbits.as_ref().unwrap().1;
                if explored.iter().any(|&u| orb[u as usize] == orb[v as usize]) {
                    continue;
                }
            }
            let mut child = part.clone();
            let s = child.individualize(v);
            let t = refine(self.g, &mut child, &[s], &mut self.sc);
            path.push(v);
            traces.push(mix(t, s as u64));
            let r = self.explore(child, path, traces);
            path.pop();
            traces.pop();
            explored.push(v);
            if let Some(level) = r {
                if level < d {
                    return Some(level);
                }
            }
        }
        None
    }
}

/// Canonical labeling of a coloured graph together with its automorphism
/// group order.
pub fn canonical_form(g: &ColoredGraph) -> CanonicalForm {
    let n = g.num_vertices();
    let mut search = Search { g, words: n.div_ceil(64), sc: Scratch::new(n), first: None, best: None, gens: Vec::new() };
    let mut root = Partition::by_color(&g.colors);
    let init = root.cell_starts();
    let t = refine(g, &mut root, &init, &mut search.sc);
    let mut path = Vec::new();
    let mut traces = vec![t];
    search.explore(root, &mut path, &mut traces);

    let first = search.first.take().expect("search reaches a leaf");
    let mut aut_size = BigUint::one();
    for l in 0..first.path.len() {
        let orb = search.stabilizer_orbits(&first.path[..l]);
        let v = orb[first.path[l] as usize];
        aut_size *= BigUint::from(orb.iter().filter(|&&o| o == v).count());
    }
    let best = search.best.take().expect("search reaches a leaf");
    let mut labeling = vec![0u32; n];
    for (i, &v) in best.lab.iter().enumerate() {
        labeling[v as usize] = i as u32;
    }
    let mut bytes = Vec::with_capacity(2 + n + 4 * g.num_edges());
    bytes.extend_from_slice(&(n as u16).to_be_bytes());
    bytes.extend(best.lab.iter().map(|&v| g.colors[v as usize]));
    for (i, &v) in best.lab.iter().enumerate() {
        let mut ns: Vec<u32> = g.adj[v as usize].iter().map(|&u| labeling[u as usize]).filter(|&j| j as usize > i).collect();
        ns.sort_unstable();
        for j in ns {
            bytes.extend_from_slice(&(i as u16).to_be_bytes());
            bytes.extend_from_slice(&(j as u16).to_be_bytes());
        }
    }
    CanonicalForm { key: CanonicalKey(bytes), labeling, aut_size, generators: search.gens }
}

/// Canonical key of the equivalence class of `s`.
pub fn class_key(s: &StabGroup) -> Result<CanonicalKey, PauliError> {
    Ok(canonical_form(&build_code_graph(s)?).key)
}

/// Canonical key and stabilizer order in one search.
pub fn class_key_with_aut(s: &StabGroup) -> Result<(CanonicalKey, BigUint), PauliError> {
    let cf = canonical_form(&build_code_graph(s)?);
    Ok((cf.key, cf.aut_size))
}

/// Order of the subgroup of local Cliffords and qubit permutations that
/// maps `s` onto itself.
pub fn aut_size(s: &StabGroup) -> Result<BigUint, PauliError> {
    Ok(canonical_form(&build_code_graph(s)?).aut_size)
}

/// Returns a transformation taking `a` to `b` when the groups are
/// equivalent.
pub fn are_equivalent(a: &StabGroup, b: &StabGroup) -> Result<Option<LCPerm>, PauliError> {
    if a.n() != b.n() || a.rank() != b.rank() {
        return Ok(None);
    }
    let (ga, gb) = (build_code_graph(a)?, build_code_graph(b)?);
    let (ca, cb) = (canonical_form(&ga), canonical_form(&gb));
    if ca.key != cb.key {
        return Ok(None);
    }
    let n = a.n();
    let t = 1usize << a.rank();
    let mut from_canon = vec![0u32; gb.num_vertices()];
    for (v, &l) in cb.labeling.iter().enumerate() {
        from_canon[l as usize] = v as u32;
    }
    // Isomorphism a -> b, restricted to the white triangles.
    let phi = |v: usize| from_canon[ca.labeling[v] as usize] as usize - t;
    let mut image = vec![0; n];
    let mut perms = vec![LetterPerm::IDENTITY; n];
    for (j, slot) in image.iter_mut().enumerate() {
        let base = t + 3 * j;
        let tx = phi(base);
        let tz = phi(base + 2);
        let q = tx / 3;
        debug_assert_eq!(q, tz / 3);
        *slot = q;
        let letter = |off: usize| [crate::Letter::X, crate::Letter::Y, crate::Letter::Z][off];
        perms[q] = LetterPerm::from_images(letter(tx % 3), letter(tz % 3)).expect("triangles map to triangles");
    }
    let w = LCPerm { clifford: LocalClifford { perms }, perm: QubitPerm { image } };
    assert!(w.apply(a).same_group(b), "graph isomorphism did not induce an equivalence");
    Ok(Some(w))
}
