//! Colorings of d-out digraphs and the transformation semigroups they
//! generate: kernel structure, minimal ideals, maximal groups, stability,
//! and quotient graphs.
//!
//! Maps act on the right and compose left-to-right: for a word
//! `c1 c2 ... ck` over colors, `v` is sent to `v R_{c1} R_{c2} ... R_{ck}`.
//! Every product in this module follows that orientation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::digraph::{Digraph, Partition};
use crate::error::{Error, Result};

/// Default cap on generated semigroup size.
pub const DEFAULT_SEMIGROUP_CAP: usize = 200_000;

/// Total function on the vertex set `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexMap {
    images: Vec<usize>,
}

impl VertexMap {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::InvalidGraph("map on an empty vertex set".into()));
        }
        if images.iter().any(|&v| v >= n) {
            return Err(Error::InvalidGraph("map image out of range".into()));
        }
        Ok(VertexMap { images })
    }

    pub fn identity(n: usize) -> Self {
        VertexMap { images: (0..n).collect() }
    }

    pub fn constant(n: usize, target: usize) -> Self {
        assert!(target < n);
        VertexMap { images: vec![target; n] }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, v: usize) -> usize {
        self.images[v]
    }

    /// Applies `self` first, then `next` (left-to-right composition).
    pub fn then(&self, next: &VertexMap) -> VertexMap {
        VertexMap {
            images: self.images.iter().map(|&v| next.images[v]).collect(),
        }
    }

    /// Image of a vertex set, sorted and deduplicated.
    pub fn image_of(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&v| self.images[v]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Image set, sorted.
    pub fn range(&self) -> Vec<usize> {
        let mut r = self.images.clone();
        r.sort_unstable();
        r.dedup();
        r
    }

    pub fn rank(&self) -> usize {
        let mut seen = vec![false; self.images.len()];
        let mut count = 0;
        for &v in &self.images {
            if !seen[v] {
                seen[v] = true;
                count += 1;
            }
        }
        count
    }

    /// Partition of the domain into fibers (preimages of range points).
    pub fn kernel_partition(&self) -> Partition {
        let mut fibers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, &w) in self.images.iter().enumerate() {
            fibers.entry(w).or_default().push(v);
        }
        Partition::new(fibers.into_values().collect(), self.images.len())
            .expect("fibers form a partition")
    }

    pub fn is_idempotent(&self) -> bool {
        self.images.iter().all(|&v| self.images[v] == v)
    }
}

impl fmt::Debug for VertexMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<String> = self.images.iter().map(|v| (v + 1).to_string()).collect();
        write!(f, "[{}]", imgs.join(" "))
    }
}

/// True when the vertex set hits every block of the partition exactly once.
pub fn cross_section_check(set: &[usize], p: &Partition) -> bool {
    p.blocks().iter().all(|block| {
        set.iter().filter(|v| block.binary_search(v).is_ok()).count() == 1
    })
}

/// Decomposition of a d-out digraph into d vertex maps, one per color.
#[derive(Clone, PartialEq, Eq)]
pub struct Coloring {
    graph: Digraph,
    maps: Vec<VertexMap>,
}

impl Coloring {
    /// Validates that the color maps sum back to the adjacency matrix.
    pub fn new(graph: Digraph, maps: Vec<VertexMap>) -> Result<Self> {
        let n = graph.n();
        if maps.is_empty() {
            return Err(Error::InvalidColoring("no color maps".into()));
        }
        if maps.iter().any(|m| m.n() != n) {
            return Err(Error::InvalidColoring("map size differs from vertex count".into()));
        }
        let mut counts = vec![0u64; n * n];
        for m in &maps {
            for (v, &w) in m.images().iter().enumerate() {
                counts[v * n + w] += 1;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if counts[i * n + j] != graph.adj(i, j) {
                    return Err(Error::InvalidColoring(format!(
                        "color maps give multiplicity {} on edge {}->{}, adjacency says {}",
                        counts[i * n + j],
                        i + 1,
                        j + 1,
                        graph.adj(i, j)
                    )));
                }
            }
        }
        Ok(Coloring { graph, maps })
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn maps(&self) -> &[VertexMap] {
        &self.maps
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn d(&self) -> usize {
        self.maps.len()
    }

    /// Map of a color word (0-based color letters), composed left-to-right.
    pub fn word_map(&self, word: &[usize]) -> VertexMap {
        let mut m = VertexMap::identity(self.n());
        for &c in word {
            m = m.then(&self.maps[c]);
        }
        m
    }

    /// Text form: one line per color, `color i: v->w ...`, 1-based.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (c, m) in self.maps.iter().enumerate() {
            let entries: Vec<String> = m
                .images()
                .iter()
                .enumerate()
                .map(|(v, &w)| format!("{}->{}", v + 1, w + 1))
                .collect();
            out.push_str(&format!("color {}: {}\n", c + 1, entries.join(" ")));
        }
        out
    }

    pub fn from_text(graph: Digraph, input: &str) -> Result<Self> {
        let n = graph.n();
        let mut by_color: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for line in input.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let rest = line
                .strip_prefix("color")
                .ok_or_else(|| Error::Parse(format!("expected `color i: ...` but got `{line}`")))?;
            let (head, entries) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("missing `:` in `{line}`")))?;
            let c: usize = head
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad color index `{head}`")))?;
            if c == 0 {
                return Err(Error::Parse("color indices are 1-based".into()));
            }
            let mut images = vec![usize::MAX; n];
            for tok in entries.split_whitespace() {
                let (v, w) = tok
                    .split_once("->")
                    .ok_or_else(|| Error::Parse(format!("expected `v->w`, got `{tok}`")))?;
                let v: usize = v.parse().map_err(|_| Error::Parse(format!("bad vertex `{v}`")))?;
                let w: usize = w.parse().map_err(|_| Error::Parse(format!("bad vertex `{w}`")))?;
                if v == 0 || v > n || w == 0 || w > n {
                    return Err(Error::Parse(format!("vertex out of range in `{tok}`")));
                }
                if images[v - 1] != usize::MAX {
                    return Err(Error::Parse(format!("vertex {v} assigned twice in color {c}")));
                }
                images[v - 1] = w - 1;
            }
            if images.contains(&usize::MAX) {
                return Err(Error::Parse(format!("color {c} does not cover every vertex")));
            }
            if by_color.insert(c - 1, images).is_some() {
                return Err(Error::Parse(format!("duplicate line for color {c}")));
            }
        }
        let d = by_color.len();
        if d == 0 || by_color.keys().next_back() != Some(&(d - 1)) {
            return Err(Error::Parse("color indices must be 1..d with no gaps".into()));
        }
        let maps = by_color
            .into_values()
            .map(VertexMap::new)
            .collect::<Result<Vec<_>>>()?;
        Coloring::new(graph, maps)
    }

    /// JSON mirror of the coloring: `{"maps": [[...1-based images...], ...]}`.
    pub fn to_json(&self) -> String {
        let maps: Vec<Vec<usize>> = self
            .maps
            .iter()
            .map(|m| m.images().iter().map(|&w| w + 1).collect())
            .collect();
        serde_json::to_string(&ColoringJson { maps }).expect("coloring serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::from_str(&self.to_json()).expect("valid JSON")
    }

    pub fn from_json(graph: Digraph, input: &str) -> Result<Self> {
        let spec: ColoringJson =
            serde_json::from_str(input).map_err(|e| Error::Parse(format!("coloring JSON: {e}")))?;
        let n = graph.n();
        let maps = spec
            .maps
            .into_iter()
            .map(|imgs| {
                if imgs.len() != n {
                    return Err(Error::Parse("map length differs from vertex count".into()));
                }
                if imgs.iter().any(|&w| w == 0 || w > n) {
                    return Err(Error::Parse("map image out of range".into()));
                }
                VertexMap::new(imgs.into_iter().map(|w| w - 1).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Coloring::new(graph, maps)
    }

    pub fn parse(graph: Digraph, input: &str) -> Result<Self> {
        if input.trim_start().starts_with('{') {
            Self::from_json(graph, input)
        } else {
            Self::from_text(graph, input)
        }
    }
}

impl fmt::Debug for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coloring\n{}", self.to_text())
    }
}

#[derive(Serialize, Deserialize)]
struct ColoringJson {
    maps: Vec<Vec<usize>>,
}

/// Distinct permutations of a sorted multiset, in lexicographic order.
fn distinct_permutations(sorted: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = sorted.to_vec();
    let mut out = vec![cur.clone()];
    loop {
        // next_permutation
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
    out
}

/// Streams every coloring of a d-out regular graph exactly once, in
/// canonical order: each vertex's sorted out-neighbor multiset is assigned
/// to colors in all distinct permutations, vertex 0 most significant.
pub struct ColoringIter {
    graph: Digraph,
    per_vertex: Vec<Vec<Vec<usize>>>,
    choice: Vec<usize>,
    done: bool,
}

impl ColoringIter {
    fn current(&self) -> Coloring {
        let n = self.graph.n();
        let d = self.per_vertex[0][0].len();
        let maps: Vec<VertexMap> = (0..d)
            .map(|c| {
                VertexMap::new(
                    (0..n)
                        .map(|v| self.per_vertex[v][self.choice[v]][c])
                        .collect(),
                )
                .expect("valid map")
            })
            .collect();
        Coloring::new(self.graph.clone(), maps).expect("enumerated coloring decomposes adjacency")
    }
}

impl Iterator for ColoringIter {
    type Item = Coloring;

    fn next(&mut self) -> Option<Coloring> {
        if self.done {
            return None;
        }
        let item = self.current();
        // odometer increment, last vertex fastest
        let mut v = self.graph.n();
        loop {
            if v == 0 {
                self.done = true;
                break;
            }
            v -= 1;
            self.choice[v] += 1;
            if self.choice[v] < self.per_vertex[v].len() {
                break;
            }
            self.choice[v] = 0;
        }
        Some(item)
    }
}

/// Enumerates all colorings of a d-out regular graph in canonical order.
pub fn enumerate_colorings(g: &Digraph) -> Result<ColoringIter> {
    if g.regular_degree().is_none() {
        return Err(Error::NotRegular);
    }
    let per_vertex: Vec<Vec<Vec<usize>>> = (0..g.n())
        .map(|v| {
            let mut outs: Vec<usize> = (0..g.n())
                .flat_map(|w| std::iter::repeat(w).take(g.adj(v, w) as usize))
                .collect();
            outs.sort_unstable();
            distinct_permutations(&outs)
        })
        .collect();
    Ok(ColoringIter {
        graph: g.clone(),
        per_vertex,
        choice: vec![0; g.n()],
        done: false,
    })
}

/// Number of distinct colorings: product over vertices of d!/prod(mult!).
pub fn coloring_count(g: &Digraph) -> Result<u128> {
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    let factorial = |k: u64| -> u128 { (1..=k as u128).product::<u128>().max(1) };
    let mut total: u128 = 1;
    for v in 0..g.n() {
        let mut per = factorial(d);
        for w in 0..g.n() {
            per /= factorial(g.adj(v, w));
        }
        total *= per;
    }
    Ok(total)
}

/// Closed set of vertex maps generated by the color maps, with a shortest
/// witness word for every element.
///
/// Generation is breadth-first over word length; witness words are
/// length-minimal with ties broken lexicographically by color index.
pub struct Semigroup {
    n: usize,
    d: usize,
    generator_maps: Vec<VertexMap>,
    elements: Vec<VertexMap>,
    witnesses: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl Semigroup {
    pub fn generate(coloring: &Coloring) -> Result<Self> {
        Self::generate_capped(coloring, DEFAULT_SEMIGROUP_CAP)
    }

    pub fn generate_capped(coloring: &Coloring, cap: usize) -> Result<Self> {
        let n = coloring.n();
        let d = coloring.d();
        let mut s = Semigroup {
            n,
            d,
            generator_maps: coloring.maps().to_vec(),
            elements: Vec::new(),
            witnesses: Vec::new(),
            index: HashMap::new(),
        };
        let mut frontier: Vec<usize> = Vec::new();
        for (c, m) in coloring.maps().iter().enumerate() {
            if let Some(id) = s.insert(m.clone(), vec![c], cap)? {
                frontier.push(id);
            }
        }
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &id in &frontier {
                for c in 0..d {
                    let composed = s.elements[id].then(&s.generator_maps[c]);
                    if s.index.contains_key(composed.images()) {
                        continue;
                    }
                    let mut word = s.witnesses[id].clone();
                    word.push(c);
                    if let Some(new_id) = s.insert(composed, word, cap)? {
                        next.push(new_id);
                    }
                }
            }
            frontier = next;
        }
        Ok(s)
    }

    fn insert(&mut self, m: VertexMap, word: Vec<usize>, cap: usize) -> Result<Option<usize>> {
        if self.index.contains_key(m.images()) {
            return Ok(None);
        }
        if self.elements.len() >= cap {
            return Err(Error::SizeCapExceeded { cap });
        }
        let id = self.elements.len();
        self.index.insert(m.images().to_vec(), id);
        self.elements.push(m);
        self.witnesses.push(word);
        Ok(Some(id))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[VertexMap] {
        &self.elements
    }

    pub fn generator_maps(&self) -> &[VertexMap] {
        &self.generator_maps
    }

    /// Shortest witness word (0-based color letters) for element `id`.
    pub fn witness(&self, id: usize) -> &[usize] {
        &self.witnesses[id]
    }

    pub fn id_of(&self, m: &VertexMap) -> Option<usize> {
        self.index.get(m.images()).copied()
    }

    pub fn contains(&self, m: &VertexMap) -> bool {
        self.id_of(m).is_some()
    }

    pub fn min_rank(&self) -> usize {
        self.elements.iter().map(VertexMap::rank).min().expect("nonempty semigroup")
    }

    /// The kernel: all elements of minimal rank, with ranges, partitions,
    /// and idempotents populated.
    ///
    /// Uniform rank holds by construction; the ideal property is asserted
    /// on the generators (composition with every generator on either side
    /// stays in the minimal-rank stratum, which extends to all products by
    /// induction over word length).
    pub fn kernel(&self) -> Result<Kernel> {
        let rank = self.min_rank();
        let mut elements = Vec::new();
        let mut witnesses = Vec::new();
        for (id, m) in self.elements.iter().enumerate() {
            if m.rank() == rank {
                elements.push(m.clone());
                witnesses.push(self.witnesses[id].clone());
            }
        }
        for k in &elements {
            for g in &self.generator_maps {
                for composed in [k.then(g), g.then(k)] {
                    if composed.rank() != rank {
                        return Err(Error::Internal(format!(
                            "ideal property violated: {composed:?} has rank {} != {rank}",
                            composed.rank()
                        )));
                    }
                    if !self.contains(&composed) {
                        return Err(Error::Internal(format!(
                            "closure violated: {composed:?} escaped the semigroup"
                        )));
                    }
                }
            }
        }
        let mut ranges: Vec<Vec<usize>> = Vec::new();
        let mut partitions: Vec<Partition> = Vec::new();
        let mut idempotents = Vec::new();
        for (i, m) in elements.iter().enumerate() {
            let r = m.range();
            if !ranges.contains(&r) {
                ranges.push(r);
            }
            let p = m.kernel_partition();
            if !partitions.iter().any(|q| q.same_blocks(&p)) {
                partitions.push(p);
            }
            if m.is_idempotent() {
                idempotents.push(i);
            }
        }
        ranges.sort();
        Ok(Kernel {
            n: self.n,
            rank,
            elements,
            witnesses,
            ranges,
            partitions,
            idempotents,
        })
    }

    /// Theorem-backed F-clique test: the range of `witness` is an F-clique
    /// exactly when `witness` lies in the kernel, i.e. has minimal rank.
    ///
    /// `set` must equal the witness's range and the witness must be an
    /// element of this semigroup.
    pub fn is_f_clique(&self, set: &[usize], witness: &VertexMap) -> Result<bool> {
        let mut b = set.to_vec();
        b.sort_unstable();
        b.dedup();
        if witness.range() != b {
            return Err(Error::NotARange);
        }
        if !self.contains(witness) {
            return Err(Error::Internal("witness map is not an element of the semigroup".into()));
        }
        Ok(witness.rank() == self.min_rank())
    }
}

impl fmt::Debug for Semigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Semigroup(n={}, d={}, {} elements)", self.n, self.d, self.elements.len())
    }
}

/// Minimal ideal of a coloring semigroup: the minimal-rank stratum, with
/// its Rees data (ranges, partitions, idempotents).
pub struct Kernel {
    n: usize,
    rank: usize,
    elements: Vec<VertexMap>,
    witnesses: Vec<Vec<usize>>,
    ranges: Vec<Vec<usize>>,
    partitions: Vec<Partition>,
    idempotents: Vec<usize>,
}

impl Kernel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[VertexMap] {
        &self.elements
    }

    pub fn witness(&self, i: usize) -> &[usize] {
        &self.witnesses[i]
    }

    /// Distinct ranges, one per minimal left ideal.
    pub fn ranges(&self) -> &[Vec<usize>] {
        &self.ranges
    }

    /// Distinct kernel partitions, one per minimal right ideal.
    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// Indices (into `elements`) of the idempotents.
    pub fn idempotents(&self) -> &[usize] {
        &self.idempotents
    }

    pub fn contains(&self, m: &VertexMap) -> bool {
        self.elements.iter().any(|k| k == m)
    }

    /// Kernel element with the shortest witness word (ties: lexicographic).
    pub fn shortest_witness(&self) -> (&VertexMap, &[usize]) {
        let i = (0..self.elements.len())
            .min_by(|&a, &b| {
                let (wa, wb) = (&self.witnesses[a], &self.witnesses[b]);
                wa.len().cmp(&wb.len()).then_with(|| wa.cmp(wb))
            })
            .expect("nonempty kernel");
        (&self.elements[i], &self.witnesses[i])
    }

    /// Minimal left ideal through `m`: all kernel elements sharing its range.
    pub fn minimal_left_ideal(&self, m: &VertexMap) -> Result<Vec<VertexMap>> {
        if !self.contains(m) {
            return Err(Error::NotInKernel);
        }
        let r = m.range();
        Ok(self.elements.iter().filter(|k| k.range() == r).cloned().collect())
    }

    /// Minimal right ideal through `nmap`: all kernel elements sharing its
    /// partition of the vertices.
    pub fn minimal_right_ideal(&self, nmap: &VertexMap) -> Result<Vec<VertexMap>> {
        if !self.contains(nmap) {
            return Err(Error::NotInKernel);
        }
        let p = nmap.kernel_partition();
        Ok(self
            .elements
            .iter()
            .filter(|k| k.kernel_partition().same_blocks(&p))
            .cloned()
            .collect())
    }

    /// Maximal group determined by the partition of `nmap` and the range of
    /// `mmap`: the intersection of their minimal right and left ideals.
    pub fn maximal_group(&self, nmap: &VertexMap, mmap: &VertexMap) -> Result<MaximalGroup> {
        if !self.contains(nmap) || !self.contains(mmap) {
            return Err(Error::NotInKernel);
        }
        let p = nmap.kernel_partition();
        let r = mmap.range();
        let elements: Vec<VertexMap> = self
            .elements
            .iter()
            .filter(|k| k.range() == r && k.kernel_partition().same_blocks(&p))
            .cloned()
            .collect();
        if elements.is_empty() {
            return Err(Error::Internal("maximal group candidate set is empty".into()));
        }
        // one-to-one from the partition blocks onto the range
        for x in &elements {
            if x.rank() != p.num_blocks() {
                return Err(Error::Internal(
                    "group element is not a bijection from partition blocks".into(),
                ));
            }
        }
        let mut idempotent = None;
        for x in &elements {
            if x.is_idempotent() {
                if idempotent.is_some() {
                    return Err(Error::Internal("maximal group has two idempotents".into()));
                }
                // identity when restricted to the range
                if r.iter().any(|&v| x.apply(v) != v) {
                    return Err(Error::Internal(
                        "group idempotent is not the identity on the range".into(),
                    ));
                }
                idempotent = Some(x.clone());
            }
        }
        let idempotent =
            idempotent.ok_or_else(|| Error::Internal("maximal group has no idempotent".into()))?;
        // closure and invertibility
        for x in &elements {
            let mut has_inverse = false;
            for y in &elements {
                let xy = x.then(y);
                if !elements.contains(&xy) {
                    return Err(Error::Internal("maximal group is not closed".into()));
                }
                if xy == idempotent && y.then(x) == idempotent {
                    has_inverse = true;
                }
            }
            if !has_inverse {
                return Err(Error::Internal("maximal group element has no inverse".into()));
            }
        }
        let order = elements.len();
        let is_cyclic = elements.iter().any(|x| {
            let mut seen = vec![x.clone()];
            let mut cur = x.clone();
            loop {
                cur = cur.then(x);
                if seen.contains(&cur) {
                    break;
                }
                seen.push(cur.clone());
            }
            seen.len() == order
        });
        Ok(MaximalGroup { elements, order, is_cyclic, idempotent })
    }

    /// A right group has a single minimal right ideal, i.e. one distinct
    /// kernel partition.
    pub fn is_right_group(&self) -> bool {
        self.partitions.len() == 1
    }

    /// Stability classes: the meet of all distinct kernel partitions.
    pub fn stability_classes(&self) -> Partition {
        let mut acc = self.partitions[0].clone();
        for p in &self.partitions[1..] {
            acc = acc.meet(p);
        }
        // stability is an unordered congruence; drop any cyclic flag
        Partition::new(acc.blocks().to_vec(), self.n).expect("meet is a partition")
    }
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Kernel(rank={}, {} elements, {} ranges, {} partitions)",
            self.rank,
            self.elements.len(),
            self.ranges.len(),
            self.partitions.len()
        )
    }
}

/// Maximal group inside a kernel, as concrete vertex maps.
pub struct MaximalGroup {
    pub elements: Vec<VertexMap>,
    pub order: usize,
    pub is_cyclic: bool,
    pub idempotent: VertexMap,
}

/// Collapses a colored graph along its stability classes.
///
/// Vertices of the quotient are the stability blocks (ordered by least
/// member); each color map descends blockwise. Fails with
/// `DiscreteStability` when no reduction is possible, and with
/// `CongruenceViolation` if some block does not map into a single block
/// under some color (which cannot happen for a true congruence).
pub fn quotient_graph(coloring: &Coloring, stability: &Partition) -> Result<(Digraph, Coloring)> {
    if stability.is_discrete() {
        return Err(Error::DiscreteStability);
    }
    let idx = stability.block_indices();
    let t = stability.num_blocks();
    let mut q_maps = Vec::with_capacity(coloring.d());
    for (c, m) in coloring.maps().iter().enumerate() {
        let mut images = Vec::with_capacity(t);
        for block in stability.blocks() {
            let target = idx[m.apply(block[0])];
            for &v in block {
                if idx[m.apply(v)] != target {
                    return Err(Error::CongruenceViolation(format!(
                        "color {} maps block {{{}}} into two distinct blocks",
                        c + 1,
                        block.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(",")
                    )));
                }
            }
            images.push(target);
        }
        q_maps.push(VertexMap::new(images)?);
    }
    let lists: Vec<Vec<usize>> = (0..t)
        .map(|k| q_maps.iter().map(|m| m.apply(k)).collect())
        .collect();
    let q_graph = Digraph::from_out_lists(&lists)?;
    let q_coloring = Coloring::new(q_graph.clone(), q_maps)?;
    Ok((q_graph, q_coloring))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Digraph {
        Digraph::from_out_lists(&(0..n).map(|v| vec![(v + 1) % n]).collect::<Vec<_>>()).unwrap()
    }

    fn cycle_coloring(n: usize) -> Coloring {
        let g = cycle(n);
        enumerate_colorings(&g).unwrap().next().unwrap()
    }

    /// Shift-and-merge coloring of the classic 4-state automaton:
    /// a = (2 3 4 1), b = (1 2 3 1).
    fn cerny4_coloring() -> Coloring {
        let g = Digraph::from_out_lists(&[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 0]]).unwrap();
        let a = VertexMap::new(vec![1, 2, 3, 0]).unwrap();
        let b = VertexMap::new(vec![0, 1, 2, 0]).unwrap();
        Coloring::new(g, vec![a, b]).unwrap()
    }

    /// 2-out bipartite graph 1,2 -> {3,4}, 3,4 -> {1,2} with the blockwise
    /// coloring a = (3 3 1 1), b = (4 4 2 2).
    fn bipartite_coloring() -> Coloring {
        let g = Digraph::from_out_lists(&[vec![2, 3], vec![2, 3], vec![0, 1], vec![0, 1]]).unwrap();
        let a = VertexMap::new(vec![2, 2, 0, 0]).unwrap();
        let b = VertexMap::new(vec![3, 3, 1, 1]).unwrap();
        Coloring::new(g, vec![a, b]).unwrap()
    }

    #[test]
    fn vertex_map_basics() {
        let m = VertexMap::new(vec![1, 0, 0]).unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(m.range(), vec![0, 1]);
        assert_eq!(m.kernel_partition().blocks(), &[vec![0], vec![1, 2]]);
        assert!(!m.is_idempotent());
        assert!(VertexMap::constant(3, 1).then(&m).images() == [0, 0, 0]);
        assert!(VertexMap::identity(4).is_idempotent());
    }

    #[test]
    fn composition_is_left_to_right() {
        // v (a then b) = (v a) b
        let a = VertexMap::new(vec![1, 2, 0]).unwrap();
        let b = VertexMap::new(vec![0, 0, 2]).unwrap();
        assert_eq!(a.then(&b).images(), &[0, 2, 0]);
        assert_eq!(b.then(&a).images(), &[1, 1, 0]);
    }

    #[test]
    fn enumerate_single_coloring_of_cycle() {
        let g = cycle(3);
        let all: Vec<_> = enumerate_colorings(&g).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(coloring_count(&g).unwrap(), 1);
    }

    #[test]
    fn enumerate_counts_and_canonical_order() {
        // two vertices, both edges to both vertices: 2 x 2 colorings
        let g = Digraph::from_out_lists(&[vec![0, 1], vec![0, 1]]).unwrap();
        let all: Vec<_> = enumerate_colorings(&g).unwrap().collect();
        assert_eq!(all.len(), 4);
        assert_eq!(coloring_count(&g).unwrap(), 4);
        // canonical order: vertex 1's permutation is most significant, and
        // the first coloring takes sorted out-lists as-is
        assert_eq!(all[0].maps()[0].images(), &[0, 0]);
        assert_eq!(all[0].maps()[1].images(), &[1, 1]);
        assert_eq!(all[1].maps()[0].images(), &[0, 1]);
        assert_eq!(all[3].maps()[0].images(), &[1, 1]);
        // no duplicates
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                assert!(all[i] != all[j]);
            }
        }
    }

    #[test]
    fn double_edge_contributes_no_choice() {
        let g = Digraph::from_out_lists(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(coloring_count(&g).unwrap(), 2);
        assert_eq!(enumerate_colorings(&g).unwrap().count(), 2);
    }

    #[test]
    fn enumerate_rejects_irregular() {
        let g = Digraph::from_out_lists(&[vec![1], vec![0, 1]]).unwrap();
        assert!(matches!(enumerate_colorings(&g), Err(Error::NotRegular)));
    }

    #[test]
    fn cyclic_group_semigroup() {
        let s = Semigroup::generate(&cycle_coloring(3)).unwrap();
        assert_eq!(s.len(), 3);
        // closure: compose every pair, stay inside
        for a in s.elements() {
            for b in s.elements() {
                assert!(s.contains(&a.then(b)));
            }
        }
        let k = s.kernel().unwrap();
        assert_eq!(k.rank(), 3);
        assert_eq!(k.len(), 3);
        assert!(k.is_right_group());
    }

    #[test]
    fn shift_plus_constant_reaches_all_constants() {
        // generators: cyclic shift and a constant map
        let g = Digraph::from_out_lists(&[vec![1, 0], vec![2, 0], vec![0, 0]]).unwrap();
        let shift = VertexMap::new(vec![1, 2, 0]).unwrap();
        let c0 = VertexMap::constant(3, 0);
        let col = Coloring::new(g, vec![shift, c0]).unwrap();
        let s = Semigroup::generate(&col).unwrap();
        for v in 0..3 {
            assert!(s.contains(&VertexMap::constant(3, v)));
        }
        // brute-force closure table agrees with membership
        for a in s.elements() {
            for b in s.elements() {
                assert!(s.contains(&a.then(b)));
            }
        }
    }

    #[test]
    fn cerny_semigroup_has_rank_one_kernel() {
        let s = Semigroup::generate(&cerny4_coloring()).unwrap();
        let k = s.kernel().unwrap();
        assert_eq!(k.rank(), 1);
        assert_eq!(k.len(), 4);
        assert_eq!(k.ranges().len(), 4);
        assert_eq!(k.partitions().len(), 1);
        assert!(k.partitions()[0].is_single_block());
        assert!(k.is_right_group());
        // the classic bound: shortest merging word has length (n-1)^2 = 9
        let (m, w) = k.shortest_witness();
        assert_eq!(m.rank(), 1);
        assert!(w.len() <= 9, "witness length {} exceeds the classic bound", w.len());
    }

    #[test]
    fn witnesses_are_shortest_and_lex_minimal() {
        let col = cerny4_coloring();
        let s = Semigroup::generate(&col).unwrap();
        // brute-force all words up to length 4 and compare
        let mut best: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..4 {
            let mut next = Vec::new();
            for w in &words {
                for c in 0..2 {
                    let mut w2 = w.clone();
                    w2.push(c);
                    let m = col.word_map(&w2);
                    best.entry(m.images().to_vec()).or_insert_with(|| w2.clone());
                    next.push(w2);
                }
            }
            words = next;
        }
        for (images, word) in best {
            let id = s.id_of(&VertexMap::new(images).unwrap()).unwrap();
            assert_eq!(s.witness(id), &word[..]);
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        let col = cerny4_coloring();
        assert!(matches!(
            Semigroup::generate_capped(&col, 3),
            Err(Error::SizeCapExceeded { cap: 3 })
        ));
    }

    #[test]
    fn left_right_ideals_and_groups_in_constants_kernel() {
        let s = Semigroup::generate(&cerny4_coloring()).unwrap();
        let k = s.kernel().unwrap();
        let c = k
            .elements()
            .iter()
            .find(|m| m.range() == vec![0])
            .unwrap()
            .clone();
        // singleton range filter
        assert_eq!(k.minimal_left_ideal(&c).unwrap(), vec![c.clone()]);
        // single partition: the right ideal is the whole kernel
        assert_eq!(k.minimal_right_ideal(&c).unwrap().len(), k.len());
        let g = k.maximal_group(&c, &c).unwrap();
        assert_eq!(g.order, 1);
        assert!(g.is_cyclic);
        assert_eq!(g.idempotent, c);
        // maps outside the kernel are rejected
        let outside = VertexMap::identity(4);
        assert!(matches!(k.minimal_left_ideal(&outside), Err(Error::NotInKernel)));
        assert!(matches!(k.maximal_group(&outside, &c), Err(Error::NotInKernel)));
    }

    #[test]
    fn group_kernel_ideals_cover_everything() {
        let s = Semigroup::generate(&cycle_coloring(3)).unwrap();
        let k = s.kernel().unwrap();
        let id = VertexMap::identity(3);
        assert_eq!(k.minimal_left_ideal(&id).unwrap().len(), 3);
        assert_eq!(k.minimal_right_ideal(&id).unwrap().len(), 3);
        let g = k.maximal_group(&id, &id).unwrap();
        assert_eq!(g.order, 3);
        assert!(g.is_cyclic);
        assert_eq!(g.idempotent, id);
    }

    #[test]
    fn bipartite_kernel_is_order_two_right_group() {
        let s = Semigroup::generate(&bipartite_coloring()).unwrap();
        let k = s.kernel().unwrap();
        assert_eq!(k.rank(), 2);
        assert_eq!(k.len(), 4);
        assert!(k.is_right_group());
        let e = k.elements()[0].clone();
        let g = k.maximal_group(&e, &e).unwrap();
        assert_eq!(g.order, 2);
        assert!(g.is_cyclic);
    }

    #[test]
    fn right_ideals_partition_the_kernel() {
        for col in [cerny4_coloring(), bipartite_coloring(), cycle_coloring(4)] {
            let s = Semigroup::generate(&col).unwrap();
            let k = s.kernel().unwrap();
            let total: usize = k
                .partitions()
                .iter()
                .map(|p| {
                    k.elements()
                        .iter()
                        .filter(|m| m.kernel_partition().same_blocks(p))
                        .count()
                })
                .sum();
            assert_eq!(total, k.len());
        }
    }

    #[test]
    fn stability_meets_partitions() {
        // single partition {V}: one stability class
        let s = Semigroup::generate(&cerny4_coloring()).unwrap();
        let stab = s.kernel().unwrap().stability_classes();
        assert!(stab.is_single_block());
        // discrete partition: stability is discrete
        let s = Semigroup::generate(&cycle_coloring(3)).unwrap();
        assert!(s.kernel().unwrap().stability_classes().is_discrete());
        // meet across two partitions
        let a = Partition::new(vec![vec![0, 1], vec![2, 3]], 4).unwrap();
        let b = Partition::new(vec![vec![0, 1], vec![2], vec![3]], 4).unwrap();
        assert!(a.meet(&b).same_blocks(&b));
    }

    #[test]
    fn quotient_of_total_collapse() {
        let col = cerny4_coloring();
        let s = Semigroup::generate(&col).unwrap();
        let stab = s.kernel().unwrap().stability_classes();
        let (qg, qc) = quotient_graph(&col, &stab).unwrap();
        assert_eq!(qg.n(), 1);
        assert_eq!(qg.adj(0, 0), 2);
        assert_eq!(qc.d(), 2);
    }

    #[test]
    fn quotient_requires_nondiscrete_stability() {
        let col = cycle_coloring(3);
        assert!(matches!(
            quotient_graph(&col, &Partition::singletons(3)),
            Err(Error::DiscreteStability)
        ));
    }

    #[test]
    fn quotient_preserves_period() {
        let col = bipartite_coloring();
        let s = Semigroup::generate(&col).unwrap();
        let stab = s.kernel().unwrap().stability_classes();
        assert_eq!(stab.num_blocks(), 2);
        let (qg, _) = quotient_graph(&col, &stab).unwrap();
        assert_eq!(qg.n(), 2);
        assert!(qg.is_strongly_connected());
        assert_eq!(qg.regular_degree(), Some(2));
        assert_eq!(qg.period().unwrap(), col.graph().period().unwrap());
    }

    #[test]
    fn f_clique_checks() {
        let s = Semigroup::generate(&cerny4_coloring()).unwrap();
        let k = s.kernel().unwrap();
        let (m, _) = k.shortest_witness();
        assert!(s.is_f_clique(&m.range(), m).unwrap());
        // identity-like elements of higher rank are not F-cliques
        let not_min = s.elements().iter().find(|e| e.rank() == 4).unwrap();
        assert!(!s.is_f_clique(&not_min.range(), not_min).unwrap());
        assert!(matches!(s.is_f_clique(&[0, 1], not_min), Err(Error::NotARange)));
    }

    #[test]
    fn cross_sections() {
        let p = Partition::single_block(3);
        assert!(cross_section_check(&[0], &p));
        let p = Partition::new(vec![vec![0, 1], vec![2]], 3).unwrap();
        assert!(!cross_section_check(&[0, 1], &p));
        assert!(cross_section_check(&[1, 2], &p));
        // every kernel range crosses every kernel partition
        for col in [cerny4_coloring(), bipartite_coloring()] {
            let k = Semigroup::generate(&col).unwrap().kernel().unwrap();
            for r in k.ranges() {
                for p in k.partitions() {
                    assert!(cross_section_check(r, p));
                }
            }
        }
    }

    #[test]
    fn coloring_formats_round_trip() {
        let col = cerny4_coloring();
        let text = col.to_text();
        assert_eq!(Coloring::from_text(col.graph().clone(), &text).unwrap(), col);
        let json = col.to_json();
        assert_eq!(Coloring::from_json(col.graph().clone(), &json).unwrap(), col);
        assert_eq!(Coloring::parse(col.graph().clone(), &json).unwrap(), col);
    }

    #[test]
    fn coloring_validation_rejects_mismatch() {
        let g = cycle(3);
        let wrong = VertexMap::new(vec![2, 0, 1]).unwrap(); // reversed cycle
        assert!(matches!(
            Coloring::new(g, vec![wrong]),
            Err(Error::InvalidColoring(_))
        ));
    }
}
