//! Random fractional caching of a compressed library.
//!
//! Every compressed file is cut into packets of `b_units`. Receiver `u`
//! stores `floor(p_f M count_f)` packets of file `f`, drawn uniformly without
//! replacement from a stream keyed by `(seed, u, f)`. The caching
//! distribution must satisfy
//!
//! ```text
//! sum_{f in I} p_f + delta sum_{f in P} p_f = 1,   0 <= p_f <= 1/M
//! ```
//!
//! where `delta` is the P-file size relative to `F`.

use std::fmt;
use std::fmt::Write as _;

use rand::seq::index;

use crate::bounds;
use crate::compressor::{CompressedLibrary, Role};
use crate::error::{Error, Result};
use crate::library::FileId;
use crate::seed;

/// Packet `index` (1-based) of compressed file `file`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PacketId {
    pub file: FileId,
    pub index: u32,
}

impl PacketId {
    pub fn new(file: u32, index: u32) -> Self {
        Self { file: FileId(file), index }
    }
}

impl fmt::Display for PacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketizedLibrary {
    b_units: u64,
    file_units: u64,
    counts: Vec<u32>,
    offsets: Vec<usize>,
}

pub fn packetize(clib: &CompressedLibrary, b_units: u64) -> Result<PacketizedLibrary> {
    if b_units == 0 {
        return Err(Error::OutOfRange("packet length must be positive".into()));
    }
    let mut counts = Vec::with_capacity(clib.m());
    let mut offsets = Vec::with_capacity(clib.m() + 1);
    let mut total = 0usize;
    for i in 0..clib.m() {
        let f = FileId::from_index(i);
        let units = clib.compressed_units(f);
        if !units.is_multiple_of(b_units) {
            return Err(Error::NotDivisible { file: f, b_units });
        }
        let count = (units / b_units) as u32;
        offsets.push(total);
        counts.push(count);
        total += count as usize;
    }
    offsets.push(total);
    Ok(PacketizedLibrary { b_units, file_units: clib.file_units(), counts, offsets })
}

impl PacketizedLibrary {
    pub fn b_units(&self) -> u64 {
        self.b_units
    }

    pub fn m(&self) -> usize {
        self.counts.len()
    }

    /// Uncompressed file size `F`.
    pub fn file_units(&self) -> u64 {
        self.file_units
    }

    pub fn packet_count(&self, f: FileId) -> u32 {
        self.counts[f.index()]
    }

    pub fn total_packets(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    /// Dense index of a packet across the whole library.
    pub fn global(&self, p: PacketId) -> usize {
        self.offsets[p.file.index()] + p.index as usize - 1
    }

    pub fn from_global(&self, g: usize) -> PacketId {
        let file = self.offsets.partition_point(|&o| o <= g) - 1;
        PacketId { file: FileId::from_index(file), index: (g - self.offsets[file] + 1) as u32 }
    }

    pub fn packets(&self, f: FileId) -> impl Iterator<Item = PacketId> {
        (1..=self.packet_count(f)).map(move |i| PacketId { file: f, index: i })
    }

    pub fn contains(&self, p: PacketId) -> bool {
        p.file.0 >= 1 && p.file.index() < self.m() && p.index >= 1 && p.index <= self.packet_count(p.file)
    }

    /// Unit range of packet `p` inside its compressed file.
    pub fn unit_range(&self, p: PacketId) -> std::ops::Range<usize> {
        let b = self.b_units as usize;
        let start = (p.index as usize - 1) * b;
        start..start + b
    }
}

/// Per-file caching fractions `p_f`.
#[derive(Debug, Clone, PartialEq)]
pub struct CachingDistribution {
    p: Vec<f64>,
}

impl CachingDistribution {
    pub fn new(p: Vec<f64>) -> Self {
        Self { p }
    }

    /// Uniform `p_f = 1/m`.
    pub fn uniform(m: usize) -> Self {
        Self { p: vec![1.0 / m as f64; m] }
    }

    /// `p_I` on every I-file, `p_P` on every P-file.
    pub fn two_level(clib: &CompressedLibrary, i_share: f64, p_share: f64) -> Self {
        let p = (0..clib.m())
            .map(|i| match clib.role(FileId::from_index(i)) {
                Role::I => i_share,
                Role::P => p_share,
            })
            .collect();
        Self { p }
    }

    /// `p_f = 1/M` everywhere: every file cached in full.
    pub fn saturated(m: usize, memory: f64) -> Self {
        Self { p: vec![1.0 / memory; m] }
    }

    pub fn get(&self, f: FileId) -> f64 {
        self.p[f.index()]
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }
}

/// Outcome of [`validate_distribution`].
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionReport {
    pub range_violations: Vec<FileId>,
    pub weighted_sum: f64,
    pub sum_ok: bool,
    /// Every file is cached in full, so the sum may fall short of 1.
    pub saturated: bool,
}

impl DistributionReport {
    pub fn is_ok(&self) -> bool {
        self.range_violations.is_empty() && (self.sum_ok || self.saturated)
    }
}

impl fmt::Display for DistributionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        if !self.range_violations.is_empty() {
            let ids: Vec<String> = self.range_violations.iter().map(|f| f.to_string()).collect();
            write!(f, "p_f outside [0, 1/M] for files {}", ids.join(","))?;
            if !self.sum_ok {
                write!(f, "; ")?;
            }
        }
        if !self.sum_ok && !self.saturated {
            write!(f, "cache constraint sums to {} instead of 1", self.weighted_sum)?;
        }
        Ok(())
    }
}

const SUM_TOL: f64 = 1e-9;

/// Checks `0 <= p_f <= 1/M` and the size-weighted cache constraint.
pub fn validate_distribution(p: &CachingDistribution, clib: &CompressedLibrary, memory: f64) -> DistributionReport {
    let upper = if memory > 0.0 { 1.0 / memory } else { f64::INFINITY };
    let mut range_violations = Vec::new();
    let mut weighted_sum = 0.0;
    let mut saturated = memory > 0.0 && p.values().len() == clib.m();
    for i in 0..clib.m() {
        let f = FileId::from_index(i);
        let pf = p.values().get(i).copied().unwrap_or(f64::NAN);
        if !(pf >= -SUM_TOL && pf <= upper * (1.0 + SUM_TOL)) {
            range_violations.push(f);
        }
        if (pf * memory - 1.0).abs() > SUM_TOL {
            saturated = false;
        }
        weighted_sum += pf * clib.size_ratio(f);
    }
    if p.values().len() != clib.m() {
        saturated = false;
    }
    DistributionReport { range_violations, weighted_sum, sum_ok: (weighted_sum - 1.0).abs() <= SUM_TOL, saturated }
}

/// Minimizer of `expected_coded_rate` along the two-level constraint
/// `p_I + delta (kappa-1) p_P = kappa/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformPlacement {
    pub i_share: f64,
    pub p_share: f64,
    pub expected_coded_rate: f64,
    /// `min{expected_coded_rate, expected_distinct_requests}`.
    pub objective: f64,
    /// `(p_P, expected_coded_rate)` samples of the grid search, when requested.
    pub trace: Vec<(f64, f64)>,
}

impl UniformPlacement {
    pub fn distribution(&self, clib: &CompressedLibrary) -> CachingDistribution {
        CachingDistribution::two_level(clib, self.i_share, self.p_share)
    }
}

const GRID_POINTS: usize = 10_000;
const GOLDEN_ITERS: usize = 100;

pub fn optimize_distribution_uniform(
    n: usize,
    m: usize,
    memory: f64,
    delta: f64,
    kappa: usize,
) -> Result<UniformPlacement> {
    optimize_distribution_uniform_traced(n, m, memory, delta, kappa, false)
}

pub fn optimize_distribution_uniform_traced(
    n: usize,
    m: usize,
    memory: f64,
    delta: f64,
    kappa: usize,
    trace: bool,
) -> Result<UniformPlacement> {
    if !(memory >= 0.0 && memory <= m as f64) {
        return Err(Error::OutOfRange(format!("M={memory} must lie in [0, {m}]")));
    }
    if kappa == 0 || n == 0 || m == 0 {
        return Err(Error::OutOfRange("n, m and kappa must be at least 1".into()));
    }
    let mbar = bounds::expected_distinct_requests(n, m);
    let cap = if memory > 0.0 { 1.0 / memory } else { f64::INFINITY };
    let target = kappa as f64 / m as f64;

    if kappa == 1 || delta == 0.0 {
        // no P-files: the constraint pins p_I
        if target > cap * (1.0 + 1e-12) {
            return Err(Error::Infeasible(format!("p_I = {target} exceeds 1/M = {cap}")));
        }
        let i_share = target.min(cap);
        let expected_coded_rate = bounds::expected_coded_rate(0.0, i_share, 0.0, memory, n)?;
        return Ok(UniformPlacement {
            i_share,
            p_share: 0.0,
            expected_coded_rate,
            objective: expected_coded_rate.min(mbar),
            trace: Vec::new(),
        });
    }

    let slope = delta * (kappa as f64 - 1.0);
    let hi = cap.min(target / slope);
    let lo = ((target - cap) / slope).max(0.0);
    if lo > hi * (1.0 + 1e-12) + 1e-15 {
        return Err(Error::Infeasible(format!(
            "no p_P in [0, {hi}] keeps p_I = {target} - {slope} p_P within [0, 1/M]"
        )));
    }
    let lo = lo.min(hi);
    let eval = |p_share: f64| -> Result<f64> {
        let i_share = (target - slope * p_share).clamp(0.0, cap);
        bounds::expected_coded_rate(delta, i_share, p_share.clamp(0.0, cap), memory, n)
    };

    let mut samples = Vec::with_capacity(if trace { GRID_POINTS + 1 } else { 0 });
    let step = (hi - lo) / GRID_POINTS as f64;
    let mut best_k = 0;
    let mut best_val = f64::INFINITY;
    for k in 0..=GRID_POINTS {
        let x = lo + step * k as f64;
        let v = eval(x)?;
        if trace {
            samples.push((x, v));
        }
        if v < best_val {
            best_val = v;
            best_k = k;
        }
    }
    let mut best_x = lo + step * best_k as f64;

    // golden-section refinement inside the neighbouring grid cells
    let mut a = lo + step * best_k.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_k + 1) as f64).min(hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    for _ in 0..GOLDEN_ITERS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?;
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best_val {
            best_val = v;
            best_x = x;
        }
    }

    let i_share = (target - slope * best_x).clamp(0.0, cap);
    Ok(UniformPlacement {
        i_share,
        p_share: best_x,
        expected_coded_rate: best_val,
        objective: best_val.min(mbar),
        trace: samples,
    })
}

/// Small set of receivers, one bit each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct ReceiverSet(u128);

impl ReceiverSet {
    pub const CAPACITY: usize = 128;

    pub fn empty() -> Self {
        Self(0)
    }

    pub fn insert(&mut self, u: usize) {
        self.0 |= 1 << u;
    }

    pub fn remove(&mut self, u: usize) {
        self.0 &= !(1 << u);
    }

    pub fn contains(self, u: usize) -> bool {
        self.0 >> u & 1 == 1
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn full(n: usize) -> Self {
        if n >= 128 {
            Self(u128::MAX)
        } else {
            Self((1u128 << n) - 1)
        }
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(u)
        })
    }
}

/// The cached packet ids `{Z_u}` of `n` receivers.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheConfiguration {
    memory: f64,
    total_packets: usize,
    bits: Vec<Vec<u64>>,
}

impl CacheConfiguration {
    pub fn empty(n: usize, plib: &PacketizedLibrary, memory: f64) -> Self {
        let words = plib.total_packets().div_ceil(64);
        Self { memory, total_packets: plib.total_packets(), bits: vec![vec![0; words]; n] }
    }

    /// Explicit configuration, one packet list per receiver.
    pub fn from_sets(plib: &PacketizedLibrary, memory: f64, sets: &[Vec<PacketId>]) -> Result<Self> {
        let mut cfg = Self::empty(sets.len(), plib, memory);
        for (u, set) in sets.iter().enumerate() {
            for &p in set {
                if !plib.contains(p) {
                    return Err(Error::OutOfRange(format!("packet {p} does not exist")));
                }
                cfg.insert(u, plib.global(p));
            }
        }
        let capacity = memory * plib.file_units() as f64;
        if let Some(u) = (0..cfg.n()).find(|&u| cfg.cached_units(u, plib) as f64 > capacity + 1e-9) {
            return Err(Error::OutOfRange(format!("receiver {} exceeds its capacity", u + 1)));
        }
        Ok(cfg)
    }

    fn insert(&mut self, u: usize, g: usize) {
        self.bits[u][g / 64] |= 1 << (g % 64);
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn memory(&self) -> f64 {
        self.memory
    }

    pub fn contains_global(&self, u: usize, g: usize) -> bool {
        self.bits[u][g / 64] >> (g % 64) & 1 == 1
    }

    pub fn contains(&self, u: usize, plib: &PacketizedLibrary, p: PacketId) -> bool {
        self.contains_global(u, plib.global(p))
    }

    /// Receivers holding packet `g`.
    pub fn holders(&self, g: usize) -> ReceiverSet {
        let mut set = ReceiverSet::empty();
        for u in 0..self.n() {
            if self.contains_global(u, g) {
                set.insert(u);
            }
        }
        set
    }

    pub fn cached_globals(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.total_packets).filter(move |&g| self.contains_global(u, g))
    }

    pub fn cached_packets(&self, u: usize, plib: &PacketizedLibrary) -> Vec<PacketId> {
        self.cached_globals(u).map(|g| plib.from_global(g)).collect()
    }

    pub fn cached_units(&self, u: usize, plib: &PacketizedLibrary) -> u64 {
        self.bits[u].iter().map(|w| w.count_ones() as u64).sum::<u64>() * plib.b_units()
    }

    /// One line per receiver: `u: f:i f:i ...`, sorted by packet.
    pub fn dump(&self, plib: &PacketizedLibrary) -> String {
        let mut out = String::new();
        for u in 0..self.n() {
            let _ = write!(out, "{}:", u + 1);
            for p in self.cached_packets(u, plib) {
                let _ = write!(out, " {p}");
            }
            out.push('\n');
        }
        out
    }
}

const FILL_STREAM: u64 = 0x4341;

/// Number of packets of `f` each receiver stores.
pub fn packets_to_cache(plib: &PacketizedLibrary, p: &CachingDistribution, memory: f64, f: FileId) -> usize {
    let count = plib.packet_count(f) as usize;
    let exact = p.get(f) * memory * count as f64;
    ((exact + 1e-9).floor().max(0.0) as usize).min(count)
}

/// Independent random fractional caching at `n` receivers.
pub fn fill_caches(
    plib: &PacketizedLibrary,
    p: &CachingDistribution,
    memory: f64,
    n: usize,
    seed: u64,
) -> Result<CacheConfiguration> {
    if n > ReceiverSet::CAPACITY {
        return Err(Error::TooManyReceivers { max: ReceiverSet::CAPACITY, got: n });
    }
    if p.values().len() != plib.m() {
        return Err(Error::InvalidDistribution(format!("{} fractions for {} files", p.values().len(), plib.m())));
    }
    let mut cfg = CacheConfiguration::empty(n, plib, memory);
    for u in 0..n {
        for i in 0..plib.m() {
            let f = FileId::from_index(i);
            let k = packets_to_cache(plib, p, memory, f);
            if k == 0 {
                continue;
            }
            let count = plib.packet_count(f) as usize;
            let mut rng = seed::stream(seed, &[FILL_STREAM, u as u64, f.0 as u64]);
            for j in index::sample(&mut rng, count, k) {
                cfg.insert(u, plib.global(PacketId { file: f, index: j as u32 + 1 }));
            }
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compressor::partition_library;
    use crate::library::GroupedLibrary;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    fn four_file_library() -> (GroupedLibrary, CompressedLibrary) {
        let lib = GroupedLibrary::uniform(4, 2, 0.25, 8).unwrap();
        let reference: BTreeMap<_, _> = [(FileId(1), FileId(2)), (FileId(3), FileId(4))].into_iter().collect();
        let i_files = [FileId(2), FileId(4)].into_iter().collect();
        let clib = CompressedLibrary::from_parts(&lib, i_files, reference, 0.25).unwrap();
        (lib, clib)
    }

    #[test]
    fn packetize_four_files() {
        let (_, clib) = four_file_library();
        let plib = packetize(&clib, 2).unwrap();
        assert_eq!(plib.packet_count(FileId(2)), 4);
        assert_eq!(plib.packet_count(FileId(1)), 1);
        assert_eq!(plib.total_packets(), 10);
        for g in 0..plib.total_packets() {
            assert_eq!(plib.global(plib.from_global(g)), g);
        }
        assert_eq!(packetize(&clib, 3), Err(Error::NotDivisible { file: FileId(1), b_units: 3 }));
    }

    #[test]
    fn packetize_single_packet_per_file() {
        let lib = GroupedLibrary::uniform(3, 1, 1.0, 6).unwrap();
        let plib = packetize(&CompressedLibrary::uncompressed(&lib), 6).unwrap();
        assert!((1..=3).all(|f| plib.packet_count(FileId(f)) == 1));
    }

    #[test]
    fn packetize_reference_library() {
        let lib = GroupedLibrary::uniform(100, 2, 0.2, 20).unwrap();
        let clib = partition_library(&lib, 10, 0.2).unwrap();
        let plib = packetize(&clib, 1).unwrap();
        for f in clib.i_files() {
            assert_eq!(plib.packet_count(*f), 20);
        }
        for f in clib.p_files() {
            assert_eq!(plib.packet_count(*f), 4);
        }
    }

    #[test]
    fn validate_four_file_distribution() {
        let (_, clib) = four_file_library();
        let p = CachingDistribution::new(vec![1.0, 0.25, 1.0, 0.25]);
        let report = validate_distribution(&p, &clib, 1.0);
        assert!(report.is_ok(), "{report}");
        assert_abs_diff_eq!(report.weighted_sum, 1.0, epsilon = 1e-15);

        let zeros = CachingDistribution::new(vec![0.0; 4]);
        let report = validate_distribution(&zeros, &clib, 1.0);
        assert!(!report.sum_ok && report.range_violations.is_empty());

        let big = CachingDistribution::new(vec![2.0, 0.25, 0.0, 0.25]);
        let report = validate_distribution(&big, &clib, 1.0);
        assert_eq!(report.range_violations, vec![FileId(1)]);
    }

    #[test]
    fn saturated_distribution_is_valid() {
        let lib = GroupedLibrary::uniform(100, 2, 0.2, 10).unwrap();
        let clib = partition_library(&lib, 10, 0.2).unwrap();
        let p = CachingDistribution::saturated(100, 80.0);
        let report = validate_distribution(&p, &clib, 80.0);
        assert!(report.saturated && report.is_ok());
    }

    #[test]
    fn optimizer_independent_library() {
        let opt = optimize_distribution_uniform(10, 100, 20.0, 0.2, 1).unwrap();
        assert_abs_diff_eq!(opt.i_share, 0.01, epsilon = 1e-15);
        assert_eq!(opt.p_share, 0.0);
    }

    #[test]
    fn optimizer_meets_constraint_and_grid_oracle() {
        let opt = optimize_distribution_uniform_traced(10, 100, 20.0, 0.2, 2, true).unwrap();
        assert_abs_diff_eq!(opt.i_share + 0.2 * opt.p_share, 0.02, epsilon = 1e-12);
        let naive = 0.02 / 1.2;
        let naive_psi = bounds::expected_coded_rate(0.2, naive, naive, 20.0, 10).unwrap();
        assert!(opt.expected_coded_rate <= naive_psi);
        assert!(opt.trace.iter().all(|&(_, v)| opt.expected_coded_rate <= v + 1e-12));
        assert!(opt.i_share * 20.0 <= 1.0 + 1e-12 && opt.p_share * 20.0 <= 1.0 + 1e-12);
    }

    #[test]
    fn optimizer_full_memory() {
        // m/kappa (1 + (kappa-1) delta) = 60 for the reference library
        let opt = optimize_distribution_uniform(10, 100, 60.0, 0.2, 2).unwrap();
        assert!(opt.expected_coded_rate < 1e-9);
        assert!(matches!(optimize_distribution_uniform(10, 100, 70.0, 0.2, 2), Err(Error::Infeasible(_))));
        let opt = optimize_distribution_uniform(4, 10, 10.0, 0.5, 1).unwrap();
        assert_eq!(opt.expected_coded_rate, 0.0);
    }

    #[test]
    fn per_group_constraint_implies_cache_constraint() {
        let lib = GroupedLibrary::uniform(12, 3, 0.25, 8).unwrap();
        let clib = partition_library(&lib, 4, 0.25).unwrap();
        for &memory in &[1.0, 2.5, 4.0] {
            let opt = optimize_distribution_uniform(4, 12, memory, 0.25, 3).unwrap();
            let report = validate_distribution(&opt.distribution(&clib), &clib, memory);
            assert!(report.sum_ok, "M={memory}: {report}");
        }
    }

    #[test]
    fn fill_caches_edges() {
        let (_, clib) = four_file_library();
        let plib = packetize(&clib, 2).unwrap();
        let p = CachingDistribution::new(vec![1.0, 0.25, 1.0, 0.25]);
        let cfg = fill_caches(&plib, &p, 1.0, 2, 11).unwrap();
        for u in 0..2 {
            let cached = cfg.cached_packets(u, &plib);
            assert_eq!(cached.len(), 4);
            assert!(cfg.contains(u, &plib, PacketId::new(1, 1)));
            assert!(cfg.contains(u, &plib, PacketId::new(3, 1)));
            assert_eq!(cached.iter().filter(|p| p.file == FileId(2)).count(), 1);
            assert_eq!(cfg.cached_units(u, &plib), 8);
        }
        assert_eq!(cfg, fill_caches(&plib, &p, 1.0, 2, 11).unwrap());

        let empty = fill_caches(&plib, &p, 0.0, 2, 11).unwrap();
        assert!((0..2).all(|u| empty.cached_packets(u, &plib).is_empty()));

        let all = CachingDistribution::new(vec![0.25; 4]);
        let cfg = fill_caches(&plib, &all, 4.0, 3, 5).unwrap();
        assert!((0..3).all(|u| cfg.cached_packets(u, &plib).len() == 10));
    }

    #[test]
    fn dump_format() {
        let (_, clib) = four_file_library();
        let plib = packetize(&clib, 2).unwrap();
        let cfg = CacheConfiguration::from_sets(
            &plib,
            1.0,
            &[
                vec![PacketId::new(1, 1), PacketId::new(2, 1), PacketId::new(3, 1), PacketId::new(4, 1)],
                vec![PacketId::new(1, 1), PacketId::new(2, 2), PacketId::new(3, 1), PacketId::new(4, 2)],
            ],
        )
        .unwrap();
        assert_eq!(cfg.dump(&plib), "1: 1:1 2:1 3:1 4:1\n2: 1:1 2:2 3:1 4:2\n");
        assert_eq!(cfg.holders(plib.global(PacketId::new(2, 2))).iter().collect::<Vec<_>>(), vec![1]);
    }
}
