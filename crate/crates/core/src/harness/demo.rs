//! The four-file, two-receiver walkthrough: grouped library, compressed
//! library, random cache fill and one coded delivery.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::baselines;
use crate::compressor::CompressedLibrary;
use crate::delivery::{decode, encode, ColoringPolicy, DeliveryPlan, Demand, SenderContents};
use crate::error::Result;
use crate::library::{BitLibrary, FileId, FileSet, GroupedLibrary};
use crate::placement::{fill_caches, packetize, CacheConfiguration, CachingDistribution, PacketizedLibrary};

/// Cache seed under which Comp-CACM places packet 1 of files 2 and 4 at
/// receiver 1 and packet 2 at receiver 2.
pub const COMPRESSED_CACHE_SEED: u64 = 76;
/// Cache seed under which the uncompressed placement gives receiver 1
/// packet 1 and receiver 2 packet 2 of every file.
pub const UNCOMPRESSED_CACHE_SEED: u64 = 8540;
pub const BITS_SEED: u64 = 2024;

const FILE_UNITS: u64 = 8;
const MEMORY: f64 = 1.0;

pub struct SmallInstance {
    pub lib: GroupedLibrary,
    pub clib: CompressedLibrary,
    pub plib: PacketizedLibrary,
    pub caches: CacheConfiguration,
}

/// Files {1, 2} and {3, 4} share three quarters of their content; files 2
/// and 4 are kept whole and 1 and 3 are stored as their private quarter.
pub fn compressed_instance() -> Result<SmallInstance> {
    let lib = GroupedLibrary::uniform(4, 2, 0.25, FILE_UNITS)?;
    let i_files: FileSet = [FileId(2), FileId(4)].into_iter().collect();
    let reference: BTreeMap<_, _> = [(FileId(1), FileId(2)), (FileId(3), FileId(4))].into_iter().collect();
    let clib = CompressedLibrary::from_parts(&lib, i_files, reference, lib.delta())?;
    let plib = packetize(&clib, FILE_UNITS / 4)?;
    let p = CachingDistribution::two_level(&clib, 0.25, 1.0);
    let caches = fill_caches(&plib, &p, MEMORY, 2, COMPRESSED_CACHE_SEED)?;
    Ok(SmallInstance { lib, clib, plib, caches })
}

/// Same files compressed separately, a quarter of each cached.
pub fn uncompressed_instance() -> Result<SmallInstance> {
    let lib = GroupedLibrary::uniform(4, 2, 0.25, FILE_UNITS)?;
    let clib = CompressedLibrary::uncompressed(&lib);
    let plib = packetize(&clib, FILE_UNITS / 4)?;
    let caches = fill_caches(&plib, &CachingDistribution::uniform(4), MEMORY, 2, UNCOMPRESSED_CACHE_SEED)?;
    Ok(SmallInstance { lib, clib, plib, caches })
}

/// Printable walkthrough for demand `(1, 2)`.
pub fn demo_report() -> Result<String> {
    let comp = compressed_instance()?;
    let plain = uncompressed_instance()?;
    let demand = Demand::new(vec![FileId(1), FileId(2)], 4)?;
    let mut out = String::new();

    let _ = writeln!(out, "library: m=4 files, groups {{1,2}} {{3,4}}, F={FILE_UNITS} units, delta=0.25");
    let _ = writeln!(out, "compressed library (id role ref units):");
    out.push_str(&comp.clib.manifest());
    let _ = writeln!(out, "cache configuration (M=1, b=F/4):");
    out.push_str(&comp.caches.dump(&comp.plib));
    let _ = writeln!(out, "demand: u1 -> 1, u2 -> 2");

    let plan = DeliveryPlan::new(&demand, &comp.caches, &comp.clib, &comp.plib, ColoringPolicy::default())?;
    let bits = BitLibrary::realize(&comp.lib, BITS_SEED);
    let contents = SenderContents::new(&comp.lib, &bits, &comp.clib);
    let codeword = encode(&plan.graph, &plan.coloring, &contents, &comp.plib)?;
    let _ = writeln!(out, "codeword:");
    for symbol in &codeword.symbols {
        let names: Vec<String> = symbol.packets.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "  {}", names.join(" ^ "));
    }
    for u in 0..demand.n() {
        let store = contents.receiver_store(&comp.plib, &comp.caches, u);
        let file = decode(u, demand.get(u), &codeword, &store, &comp.clib, &comp.plib)?;
        let ok = file == bits.file(&comp.lib, demand.get(u));
        let _ = writeln!(out, "u{} decodes file {}: {}", u + 1, demand.get(u), if ok { "exact" } else { "MISMATCH" });
    }
    let _ = writeln!(out, "comp-cacm rate {}", plan.rate());
    let rap = baselines::scheme_rapcm(&demand, &plain.caches, &plain.clib, &plain.plib, ColoringPolicy::default())?;
    let _ = writeln!(out, "rap-cm rate {rap}");
    Ok(out)
}
