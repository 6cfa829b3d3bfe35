//! Correlation-unaware reference schemes.
//!
//! All three operate on the uncompressed library (every file an I-file)
//! with caches filled under the uniform distribution `p_f = 1/m`.

use std::collections::{BTreeMap, BTreeSet};

use crate::compressor::CompressedLibrary;
use crate::delivery::{ColoringPolicy, DeliveryPlan, Demand};
use crate::error::Result;
use crate::placement::{CacheConfiguration, PacketizedLibrary};

fn missing(u: usize, demand: &Demand, caches: &CacheConfiguration, plib: &PacketizedLibrary) -> Vec<usize> {
    plib.packets(demand.get(u)).map(|p| plib.global(p)).filter(|&g| !caches.contains_global(u, g)).collect()
}

/// Local caching, one unicast stream per receiver.
pub fn rate_lcu(demand: &Demand, caches: &CacheConfiguration, plib: &PacketizedLibrary) -> f64 {
    let packets: usize = (0..demand.n()).map(|u| missing(u, demand, caches, plib).len()).sum();
    packets as f64 * plib.b_units() as f64 / plib.file_units() as f64
}

/// Local caching, each missing packet of each requested file multicast
/// once, uncoded.
pub fn rate_lcnm(demand: &Demand, caches: &CacheConfiguration, plib: &PacketizedLibrary) -> f64 {
    let mut per_file: BTreeMap<_, BTreeSet<usize>> = BTreeMap::new();
    for u in 0..demand.n() {
        per_file.entry(demand.get(u)).or_default().extend(missing(u, demand, caches, plib));
    }
    let packets: usize = per_file.values().map(BTreeSet::len).sum();
    packets as f64 * plib.b_units() as f64 / plib.file_units() as f64
}

/// Random popularity-based caching with coded multicast: the conflict-graph
/// delivery applied to the uncompressed library.
pub fn scheme_rapcm(
    demand: &Demand,
    caches: &CacheConfiguration,
    uncompressed: &CompressedLibrary,
    plib: &PacketizedLibrary,
    policy: ColoringPolicy,
) -> Result<f64> {
    Ok(DeliveryPlan::new(demand, caches, uncompressed, plib, policy)?.rate())
}
