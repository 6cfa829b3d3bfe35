#![allow(dead_code)]

use cacm::compressor::{partition_library, CompressedLibrary};
use cacm::delivery::{decode, encode, ColoringPolicy, DeliveryPlan, Demand, SenderContents};
use cacm::harness::experiment::comp_cacm_distribution;
use cacm::library::{BitLibrary, GroupedLibrary};
use cacm::placement::{fill_caches, packetize, CacheConfiguration, CachingDistribution, PacketizedLibrary};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub lib: GroupedLibrary,
    pub clib: CompressedLibrary,
    pub plib: PacketizedLibrary,
    pub caches: CacheConfiguration,
    pub demand: Demand,
    pub bits: BitLibrary,
    pub policy: ColoringPolicy,
}

/// Random library, partition, placement, demand and coloring policy. Every
/// random choice is drawn from `seed`.
pub fn random_instance(m: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kappas: Vec<usize> = [1, 2, 4, 5].into_iter().filter(|k| m.is_multiple_of(*k)).collect();
    let kappa = kappas[rng.gen_range(0..kappas.len())];
    let delta = [0.25, 0.5, 0.75][rng.gen_range(0..3)];
    let file_units = 16;
    let n = rng.gen_range(1..=6);
    let lib = GroupedLibrary::uniform(m, kappa, delta, file_units).unwrap();
    let compress = kappa > 1 && rng.gen_bool(0.8);
    let clib =
        if compress { partition_library(&lib, n, lib.delta()).unwrap() } else { CompressedLibrary::uncompressed(&lib) };
    let b_units = [1, 2, 4][rng.gen_range(0..3)];
    let plib = packetize(&clib, b_units).unwrap();
    let memory = rng.gen_range(0..=2 * m) as f64 / 2.0;
    let p = if compress {
        comp_cacm_distribution(&lib, &clib, n, memory).unwrap()
    } else {
        CachingDistribution::uniform(m)
    };
    let caches = fill_caches(&plib, &p, memory, n, rng.gen()).unwrap();
    let demand = Demand::sample(lib.demand_pmf(), n, &mut rng);
    let bits = BitLibrary::realize(&lib, rng.gen());
    let policy = match rng.gen_range(0..3) {
        0 => ColoringPolicy::Grouped,
        1 => ColoringPolicy::LargestDegreeFirst,
        _ => ColoringPolicy::Random(rng.gen()),
    };
    Instance { lib, clib, plib, caches, demand, bits, policy }
}

/// Delivers the instance's demand and checks every receiver's output
/// against the source bits.
pub fn round_trip(inst: &Instance) -> Result<(), String> {
    let plan = DeliveryPlan::new(&inst.demand, &inst.caches, &inst.clib, &inst.plib, inst.policy)
        .map_err(|e| e.to_string())?;
    let contents = SenderContents::new(&inst.lib, &inst.bits, &inst.clib);
    let codeword = encode(&plan.graph, &plan.coloring, &contents, &inst.plib).map_err(|e| e.to_string())?;
    for u in 0..inst.demand.n() {
        let store = contents.receiver_store(&inst.plib, &inst.caches, u);
        let f = inst.demand.get(u);
        let out = decode(u, f, &codeword, &store, &inst.clib, &inst.plib).map_err(|e| e.to_string())?;
        if out != inst.bits.file(&inst.lib, f) {
            return Err(format!("receiver {} decoded file {f} wrongly", u + 1));
        }
    }
    Ok(())
}
