//! Coded multicast delivery over a conflict graph.
//!
//! A vertex is a (packet, receiver) pair for every packet a receiver needs
//! and does not hold. Two vertices `(p1, u1)`, `(p2, u2)` conflict iff
//! `p1 != p2` and `p1` is not cached at `u2` or `p2` is not cached at `u1`.
//! A proper coloring turns every color class into one XOR symbol that each
//! member receiver can peel with its cache.
//!
//! The graph is dense, so it is stored implicitly: each vertex carries the
//! set of receivers caching its packet, and adjacency is evaluated on
//! demand.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::compressor::{CompressedLibrary, Role};
use crate::error::{Error, Result};
use crate::library::{BitLibrary, FileId, GroupedLibrary, Word};
use crate::placement::{CacheConfiguration, PacketId, PacketizedLibrary, ReceiverSet};
use crate::seed;

/// `f_u` for every receiver `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Demand(Vec<FileId>);

impl Demand {
    pub fn new(files: Vec<FileId>, m: usize) -> Result<Self> {
        if let Some(&f) = files.iter().find(|f| f.0 == 0 || f.index() >= m) {
            return Err(Error::UnknownFile(f));
        }
        Ok(Self(files))
    }

    /// i.i.d. draws from `q`, which must have a positive total.
    pub fn sample<R: Rng + ?Sized>(q: &[f64], n: usize, rng: &mut R) -> Self {
        let dist = WeightedIndex::new(q).expect("demand distribution with positive mass");
        Self((0..n).map(|_| FileId::from_index(dist.sample(rng))).collect())
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, u: usize) -> FileId {
        self.0[u]
    }

    pub fn files(&self) -> &[FileId] {
        &self.0
    }
}

/// Uncached packets `u` needs to rebuild `f_u`: those of `f_u` and, for a
/// P-file, those of its reference I-file.
pub fn required_packets(
    u: usize,
    f_u: FileId,
    clib: &CompressedLibrary,
    plib: &PacketizedLibrary,
    caches: &CacheConfiguration,
) -> Vec<PacketId> {
    let mut files = vec![f_u];
    if let Some(r) = clib.reference(f_u) {
        files.push(r);
    }
    files.sort();
    files.into_iter().flat_map(|f| plib.packets(f)).filter(|&p| !caches.contains(u, plib, p)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub packet: PacketId,
    /// 0-based receiver index.
    pub receiver: usize,
}

#[derive(Debug, Clone)]
pub struct ConflictGraph {
    vertices: Vec<Vertex>,
    globals: Vec<usize>,
    holders: Vec<ReceiverSet>,
    n: usize,
}

pub fn build_conflict_graph(
    demand: &Demand,
    caches: &CacheConfiguration,
    clib: &CompressedLibrary,
    plib: &PacketizedLibrary,
) -> Result<ConflictGraph> {
    let n = demand.n();
    if n > ReceiverSet::CAPACITY {
        return Err(Error::TooManyReceivers { max: ReceiverSet::CAPACITY, got: n });
    }
    if caches.n() != n {
        return Err(Error::OutOfRange(format!("{} caches for {n} receivers", caches.n())));
    }
    let mut vertices = Vec::new();
    for u in 0..n {
        for packet in required_packets(u, demand.get(u), clib, plib, caches) {
            vertices.push(Vertex { packet, receiver: u });
        }
    }
    let mut holder_cache: HashMap<usize, ReceiverSet> = HashMap::new();
    let globals: Vec<usize> = vertices.iter().map(|v| plib.global(v.packet)).collect();
    let holders = globals.iter().map(|&g| *holder_cache.entry(g).or_insert_with(|| caches.holders(g))).collect();
    Ok(ConflictGraph { vertices, globals, holders, n })
}

impl ConflictGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex(&self, v: usize) -> Vertex {
        self.vertices[v]
    }

    /// Receivers caching the packet of vertex `v`.
    pub fn holders(&self, v: usize) -> ReceiverSet {
        self.holders[v]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn conflicts(&self, a: usize, b: usize) -> bool {
        if a == b || self.globals[a] == self.globals[b] {
            return false;
        }
        let (ua, ub) = (self.vertices[a].receiver, self.vertices[b].receiver);
        !(self.holders[a].contains(ub) && self.holders[b].contains(ua))
    }

    /// All edges `(a, b)` with `a < b`. Quadratic; meant for small graphs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                if self.conflicts(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Number of distinct packets over all vertices.
    pub fn distinct_packets(&self) -> usize {
        let mut g = self.globals.clone();
        g.sort_unstable();
        g.dedup();
        g.len()
    }

    /// Conflict degree of every vertex, in `O(V n)`.
    pub fn degrees(&self) -> Vec<usize> {
        let n = self.n;
        // cached_need[x][y]: vertices of receiver y whose packet x holds
        let mut cached_need = vec![0usize; n * n];
        let mut requesters: HashMap<usize, usize> = HashMap::new();
        for (v, vert) in self.vertices.iter().enumerate() {
            for x in self.holders[v].iter() {
                cached_need[x * n + vert.receiver] += 1;
            }
            *requesters.entry(self.globals[v]).or_default() += 1;
        }
        let total = self.len();
        (0..total)
            .map(|a| {
                let ua = self.vertices[a].receiver;
                let same_packet = requesters[&self.globals[a]] - 1;
                let mutual: usize = self.holders[a].iter().map(|y| cached_need[ua * n + y]).sum();
                total - 1 - same_packet - mutual
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColoringPolicy {
    /// Full coded groups first, then refined first-fit; see [`grouped_color`].
    #[default]
    Grouped,
    /// Descending degree, ties by packet then receiver.
    LargestDegreeFirst,
    /// Uniformly shuffled vertex order.
    Random(u64),
}

/// Refinement rounds used by [`ColoringPolicy::Grouped`].
pub const GROUPED_ROUNDS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    color: Vec<usize>,
    num_colors: usize,
}

impl Coloring {
    pub fn from_colors(color: Vec<usize>) -> Self {
        let num_colors = color.iter().map(|&c| c + 1).max().unwrap_or(0);
        Self { color, num_colors }
    }

    pub fn color(&self, v: usize) -> usize {
        self.color[v]
    }

    pub fn colors(&self) -> &[usize] {
        &self.color
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    /// Vertex indices of every color class, classes in color order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.num_colors];
        for (v, &c) in self.color.iter().enumerate() {
            classes[c].push(v);
        }
        classes
    }

    pub fn verify(&self, graph: &ConflictGraph) -> Result<()> {
        if self.color.len() != graph.len() {
            return Err(Error::OutOfRange(format!("coloring covers {} of {} vertices", self.color.len(), graph.len())));
        }
        for class in self.classes() {
            for (i, &a) in class.iter().enumerate() {
                for &b in &class[i + 1..] {
                    if graph.conflicts(a, b) {
                        return Err(Error::ImproperColoring(a, b));
                    }
                }
            }
        }
        Ok(())
    }
}

struct ColorClass {
    receivers: ReceiverSet,
    // receivers caching every member packet
    common: ReceiverSet,
}

/// Greedy coloring under `policy`.
pub fn greedy_color(graph: &ConflictGraph, policy: ColoringPolicy) -> Coloring {
    let mut order: Vec<usize> = (0..graph.len()).collect();
    match policy {
        ColoringPolicy::Grouped => return grouped_color(graph, GROUPED_ROUNDS),
        ColoringPolicy::LargestDegreeFirst => {
            let deg = graph.degrees();
            order.sort_by(|&a, &b| {
                deg[b]
                    .cmp(&deg[a])
                    .then(graph.vertices[a].packet.cmp(&graph.vertices[b].packet))
                    .then(graph.vertices[a].receiver.cmp(&graph.vertices[b].receiver))
            });
        }
        ColoringPolicy::Random(s) => {
            let mut rng = seed::stream(s, &[0x4752]);
            order.shuffle(&mut rng);
        }
    }
    first_fit(graph, &order)
}

/// First-fit coloring visiting vertices in `order`.
pub fn first_fit(graph: &ConflictGraph, order: &[usize]) -> Coloring {
    let mut color = vec![usize::MAX; graph.len()];
    let mut classes: Vec<ColorClass> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut classes_with_packet: HashMap<usize, Vec<usize>> = HashMap::new();

    for &v in order {
        let u = graph.vertices[v].receiver;
        let holders = graph.holders[v];
        let g = graph.globals[v];
        // a class holding a copy of g always fails this test, because the
        // copy's receiver needs g and so is not among its holders
        let mut chosen = classes.iter().position(|c| c.receivers.is_subset(holders) && c.common.contains(u));
        if let Some(candidates) = classes_with_packet.get(&g) {
            for &c in candidates {
                if chosen.is_some_and(|best| best <= c) {
                    continue;
                }
                let fits = members[c].iter().all(|&w| {
                    graph.globals[w] == g
                        || (holders.contains(graph.vertices[w].receiver) && graph.holders[w].contains(u))
                });
                if fits {
                    chosen = Some(c);
                }
            }
        }
        let c = match chosen {
            Some(c) => c,
            None => {
                classes.push(ColorClass {
                    receivers: ReceiverSet::empty(),
                    common: ReceiverSet::full(ReceiverSet::CAPACITY),
                });
                members.push(Vec::new());
                classes.len() - 1
            }
        };
        classes[c].receivers.insert(u);
        classes[c].common = classes[c].common.intersection(holders);
        members[c].push(v);
        let with_g = classes_with_packet.entry(g).or_default();
        if !with_g.contains(&c) {
            with_g.push(c);
        }
        color[v] = c;
    }
    Coloring { color, num_colors: classes.len() }
}

/// Vertices sorted by label (receiver plus holders), larger labels first.
fn label_order(graph: &ConflictGraph) -> Vec<usize> {
    let label = |v: usize| {
        let mut l = graph.holders[v];
        l.insert(graph.vertices[v].receiver);
        l
    };
    let mut order: Vec<usize> = (0..graph.len()).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (label(a), label(b));
        lb.len()
            .cmp(&la.len())
            .then(la.cmp(&lb))
            .then(graph.vertices[a].packet.cmp(&graph.vertices[b].packet))
            .then(graph.vertices[a].receiver.cmp(&graph.vertices[b].receiver))
    });
    order
}

/// Re-runs first-fit with the vertices of each class kept together, which
/// never increases the number of colors.
pub fn iterate_greedy(graph: &ConflictGraph, start: Coloring, rounds: usize) -> Coloring {
    let mut best = start;
    for r in 0..rounds {
        let mut classes = best.classes();
        if r % 2 == 0 {
            classes.reverse();
        } else {
            classes.sort_by_key(|c| std::cmp::Reverse(c.len()));
        }
        let order: Vec<usize> = classes.into_iter().flatten().collect();
        let next = first_fit(graph, &order);
        if next.num_colors() <= best.num_colors() {
            best = next;
        }
    }
    best
}

const MAX_SUBSETS_PER_LEVEL: usize = 4096;

fn binomial_at_most(n: usize, k: usize, cap: usize) -> bool {
    let mut c: u128 = 1;
    for i in 0..k.min(n - k) {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > cap as u128 {
            return false;
        }
    }
    true
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets_of_size(n: usize, k: usize) -> Vec<ReceiverSet> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut set = ReceiverSet::empty();
        for &i in &idx {
            set.insert(i);
        }
        out.push(set);
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Coloring built from full coded groups first: for receiver sets `S` from
/// largest to smallest, a class takes one vertex of every `u` in `S` whose
/// packet is cached by all of `S` except `u`, choosing the vertex with the
/// fewest holders. Leftovers are colored first-fit and the result is
/// refined by `rounds` of class-ordered first-fit.
pub fn grouped_color(graph: &ConflictGraph, rounds: usize) -> Coloring {
    let n = graph.n;
    let mut color = vec![usize::MAX; graph.len()];
    let mut next_color = 0;

    // per receiver: (holders, uncolored vertices), fewest holders first
    let mut buckets: Vec<Vec<(ReceiverSet, Vec<usize>)>> = vec![Vec::new(); n];
    {
        let mut keyed: Vec<BTreeMap<(usize, ReceiverSet), Vec<usize>>> = vec![BTreeMap::new(); n];
        for v in (0..graph.len()).rev() {
            let h = graph.holders[v];
            keyed[graph.vertices[v].receiver].entry((h.len(), h)).or_default().push(v);
        }
        for (u, map) in keyed.into_iter().enumerate() {
            buckets[u] = map.into_iter().map(|((_, h), vs)| (h, vs)).collect();
        }
    }

    for size in (2..=n).rev() {
        let subsets = if binomial_at_most(n, size, MAX_SUBSETS_PER_LEVEL) {
            subsets_of_size(n, size)
        } else {
            let labels: BTreeSet<ReceiverSet> = buckets
                .iter()
                .enumerate()
                .flat_map(|(u, bs)| {
                    bs.iter().filter(|(h, vs)| h.len() + 1 == size && !vs.is_empty()).map(move |(h, _)| {
                        let mut l = *h;
                        l.insert(u);
                        l
                    })
                })
                .collect();
            labels.into_iter().collect()
        };
        let mut live = subsets;
        while !live.is_empty() {
            live.retain(|&set| {
                let mut picks = Vec::with_capacity(size);
                for u in set.iter() {
                    let mut others = set;
                    others.remove(u);
                    match buckets[u].iter().position(|(h, vs)| !vs.is_empty() && others.is_subset(*h)) {
                        Some(b) => picks.push((u, b)),
                        None => break,
                    }
                }
                if picks.len() < size {
                    return false;
                }
                for (u, b) in picks {
                    let v = buckets[u][b].1.pop().expect("non-empty bucket");
                    color[v] = next_color;
                }
                next_color += 1;
                true
            });
        }
    }

    let rest: Vec<usize> = label_order(graph).into_iter().filter(|&v| color[v] == usize::MAX).collect();
    let tail = first_fit(graph, &rest);
    for &v in &rest {
        color[v] = next_color + tail.color(v);
    }
    iterate_greedy(graph, Coloring::from_colors(color), rounds)
}

/// One color per distinct packet: uncoded multicast of the union of
/// requests.
pub fn naive_color(graph: &ConflictGraph) -> Coloring {
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut sorted: Vec<usize> = graph.globals.clone();
    sorted.sort_unstable();
    sorted.dedup();
    for (i, g) in sorted.into_iter().enumerate() {
        ids.insert(g, i);
    }
    Coloring::from_colors(graph.globals.iter().map(|g| ids[g]).collect())
}

/// Greedy coloring, replaced by [`naive_color`] whenever the latter uses
/// fewer colors, so coding never costs more than uncoded multicast.
pub fn color_for_delivery(graph: &ConflictGraph, policy: ColoringPolicy) -> Coloring {
    let greedy = greedy_color(graph, policy);
    if greedy.num_colors() > graph.distinct_packets() {
        naive_color(graph)
    } else {
        greedy
    }
}

/// Compressed payloads of every file, as held by the sender.
#[derive(Debug, Clone)]
pub struct SenderContents {
    payloads: Vec<Vec<Word>>,
}

impl SenderContents {
    pub fn new(lib: &GroupedLibrary, bits: &BitLibrary, clib: &CompressedLibrary) -> Self {
        let payloads = lib.files().map(|f| clib.payload(lib, bits, f)).collect();
        Self { payloads }
    }

    pub fn packet(&self, plib: &PacketizedLibrary, p: PacketId) -> &[Word] {
        &self.payloads[p.file.index()][plib.unit_range(p)]
    }

    /// Cache contents of receiver `u`.
    pub fn receiver_store(&self, plib: &PacketizedLibrary, caches: &CacheConfiguration, u: usize) -> ReceiverStore {
        let packets = caches
            .cached_globals(u)
            .map(|g| {
                let p = plib.from_global(g);
                (p, self.packet(plib, p).to_vec())
            })
            .collect();
        ReceiverStore { packets }
    }
}

/// Packets held by one receiver.
#[derive(Debug, Clone, Default)]
pub struct ReceiverStore {
    packets: HashMap<PacketId, Vec<Word>>,
}

impl ReceiverStore {
    pub fn get(&self, p: PacketId) -> Option<&[Word]> {
        self.packets.get(&p).map(Vec::as_slice)
    }

    pub fn contains(&self, p: PacketId) -> bool {
        self.packets.contains_key(&p)
    }

    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedSymbol {
    /// Distinct packets XORed into this symbol, sorted.
    pub packets: Vec<PacketId>,
    pub payload: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticastCodeword {
    pub symbols: Vec<CodedSymbol>,
    pub b_units: u64,
    pub file_units: u64,
}

impl MulticastCodeword {
    /// Codeword length in units.
    pub fn len_units(&self) -> u64 {
        self.symbols.len() as u64 * self.b_units
    }

    /// Length normalized by the file size.
    pub fn rate(&self) -> f64 {
        self.len_units() as f64 / self.file_units as f64
    }
}

fn xor_into(acc: &mut [Word], other: &[Word]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= *b;
    }
}

/// One XOR symbol per color class.
pub fn encode(
    graph: &ConflictGraph,
    coloring: &Coloring,
    contents: &SenderContents,
    plib: &PacketizedLibrary,
) -> Result<MulticastCodeword> {
    coloring.verify(graph)?;
    let symbols = coloring
        .classes()
        .into_iter()
        .map(|class| {
            let mut packets: Vec<PacketId> = class.iter().map(|&v| graph.vertices[v].packet).collect();
            packets.sort();
            packets.dedup();
            let mut payload = vec![0; plib.b_units() as usize];
            for &p in &packets {
                xor_into(&mut payload, contents.packet(plib, p));
            }
            CodedSymbol { packets, payload }
        })
        .collect();
    Ok(MulticastCodeword { symbols, b_units: plib.b_units(), file_units: plib.file_units() })
}

/// Rebuilds the original contents of `f_u` at receiver `u` from the
/// codeword and the receiver's cache.
pub fn decode(
    u: usize,
    f_u: FileId,
    codeword: &MulticastCodeword,
    store: &ReceiverStore,
    clib: &CompressedLibrary,
    plib: &PacketizedLibrary,
) -> Result<Vec<Word>> {
    let mut index: HashMap<PacketId, Vec<usize>> = HashMap::new();
    for (s, sym) in codeword.symbols.iter().enumerate() {
        for &p in &sym.packets {
            index.entry(p).or_default().push(s);
        }
    }
    let recover = |p: PacketId| -> Result<Vec<Word>> {
        if let Some(bits) = store.get(p) {
            return Ok(bits.to_vec());
        }
        let missing = || Error::MissingSideInformation { receiver: u + 1, packet: p.to_string() };
        let candidates = index.get(&p).ok_or_else(missing)?;
        for &s in candidates {
            let sym = &codeword.symbols[s];
            if sym.packets.iter().all(|&q| q == p || store.contains(q)) {
                let mut out = sym.payload.clone();
                for &q in sym.packets.iter().filter(|&&q| q != p) {
                    xor_into(&mut out, store.get(q).expect("checked above"));
                }
                return Ok(out);
            }
        }
        Err(missing())
    };
    let assemble = |f: FileId| -> Result<Vec<Word>> {
        let mut out = Vec::with_capacity(clib.compressed_units(f) as usize);
        for p in plib.packets(f) {
            out.extend(recover(p)?);
        }
        Ok(out)
    };
    let compressed = assemble(f_u)?;
    match clib.role(f_u) {
        Role::I => Ok(compressed),
        Role::P => {
            let r = clib.reference(f_u).expect("P-files have a reference");
            let reference = assemble(r)?;
            Ok(clib.reconstruct(f_u, &compressed, &reference))
        }
    }
}

/// Graph, coloring and rate of one delivery instance.
#[derive(Debug, Clone)]
pub struct DeliveryPlan {
    pub graph: ConflictGraph,
    pub coloring: Coloring,
    pub b_units: u64,
    pub file_units: u64,
}

impl DeliveryPlan {
    pub fn new(
        demand: &Demand,
        caches: &CacheConfiguration,
        clib: &CompressedLibrary,
        plib: &PacketizedLibrary,
        policy: ColoringPolicy,
    ) -> Result<Self> {
        let graph = build_conflict_graph(demand, caches, clib, plib)?;
        let coloring = color_for_delivery(&graph, policy);
        Ok(Self { graph, coloring, b_units: plib.b_units(), file_units: plib.file_units() })
    }

    pub fn rate(&self) -> f64 {
        (self.coloring.num_colors() as u64 * self.b_units) as f64 / self.file_units as f64
    }

    /// Line-oriented dump: vertices, edges, color classes and rate.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.graph.vertices().iter().enumerate() {
            let _ = writeln!(out, "vertex {i} {}@{}", v.packet, v.receiver + 1);
        }
        for (a, b) in self.graph.edges() {
            let _ = writeln!(out, "edge {a} {b}");
        }
        for (c, class) in self.coloring.classes().iter().enumerate() {
            let ids: Vec<String> = class.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "color {c} {}", ids.join(" "));
        }
        let _ = writeln!(out, "rate {:.6}", self.rate());
        out
    }
}
