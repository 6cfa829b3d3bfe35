//! Correlation-aware library compression.
//!
//! Files are split greedily into I-files, kept at full entropy, and P-files,
//! stored conditionally on one I-file of their δ-ensemble. Each round picks
//! the active file whose ensemble has the largest aggregate popularity
//! (lowest index on ties), then retires the whole ensemble.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::library::{BitLibrary, FileId, FileSet, GroupedLibrary, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    I,
    P,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressedLibrary {
    i_files: FileSet,
    p_files: FileSet,
    reference: BTreeMap<FileId, FileId>,
    compressed_units: Vec<u64>,
    file_units: u64,
    delta_used: f64,
}

/// Probability that at least one of `n` receivers requests a file of the
/// δ-ensemble of `f` within `active`.
pub fn aggregate_popularity(
    lib: &GroupedLibrary,
    n: usize,
    delta_thresh: f64,
    active: &FileSet,
    f: FileId,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    let mass: f64 = lib.delta_ensemble(f, delta_thresh, active)?.iter().map(|&g| lib.q(g)).sum();
    Ok(1.0 - (1.0 - mass.min(1.0)).powi(n as i32))
}

/// Greedy I/P partition of the whole library.
pub fn partition_library(lib: &GroupedLibrary, n: usize, delta_thresh: f64) -> Result<CompressedLibrary> {
    if !(delta_thresh > 0.0 && delta_thresh <= 1.0) {
        return Err(Error::OutOfRange(format!("delta threshold {delta_thresh} must lie in (0, 1]")));
    }
    let mut active = lib.all_files();
    let mut reference = BTreeMap::new();
    let mut i_files = FileSet::new();
    while !active.is_empty() {
        let mut best: Option<(FileId, f64)> = None;
        for &f in &active {
            let pop = aggregate_popularity(lib, n, delta_thresh, &active, f)?;
            // strict comparison keeps the lowest index on ties
            if best.is_none_or(|(_, b)| pop > b + 1e-15) {
                best = Some((f, pop));
            }
        }
        let (chosen, _) = best.expect("active set is nonempty");
        let ensemble = lib.delta_ensemble(chosen, delta_thresh, &active)?;
        i_files.insert(chosen);
        for &f in &ensemble {
            if f != chosen {
                reference.insert(f, chosen);
            }
            active.remove(&f);
        }
    }
    CompressedLibrary::from_parts(lib, i_files, reference, delta_thresh)
}

impl CompressedLibrary {
    /// Builds a compressed library from an explicit partition.
    ///
    /// Every file must be either an I-file or a key of `reference`, and
    /// references must point at I-files.
    pub fn from_parts(
        lib: &GroupedLibrary,
        i_files: FileSet,
        reference: BTreeMap<FileId, FileId>,
        delta_used: f64,
    ) -> Result<Self> {
        let mut compressed_units = vec![0; lib.m()];
        for f in lib.files() {
            let is_i = i_files.contains(&f);
            match (is_i, reference.get(&f)) {
                (true, None) => compressed_units[f.index()] = lib.file_units(),
                (false, Some(&r)) => {
                    if !i_files.contains(&r) {
                        return Err(Error::InvalidLibrary(format!(
                            "P-file {f} references {r}, which is not an I-file"
                        )));
                    }
                    compressed_units[f.index()] = lib.conditional_entropy(f, r)?;
                }
                (true, Some(_)) => return Err(Error::InvalidLibrary(format!("file {f} is both I and P"))),
                (false, None) => return Err(Error::InvalidLibrary(format!("file {f} is unassigned"))),
            }
        }
        for &f in i_files.iter().chain(reference.keys()) {
            lib.check_file(f)?;
        }
        let p_files = reference.keys().copied().collect();
        Ok(Self { i_files, p_files, reference, compressed_units, file_units: lib.file_units(), delta_used })
    }

    /// Every file compressed separately (all I-files). Used by the
    /// correlation-unaware baselines.
    pub fn uncompressed(lib: &GroupedLibrary) -> Self {
        Self::from_parts(lib, lib.all_files(), BTreeMap::new(), 0.0).expect("all-I partition is always valid")
    }

    pub fn m(&self) -> usize {
        self.compressed_units.len()
    }

    pub fn file_units(&self) -> u64 {
        self.file_units
    }

    pub fn i_files(&self) -> &FileSet {
        &self.i_files
    }

    pub fn p_files(&self) -> &FileSet {
        &self.p_files
    }

    pub fn delta_used(&self) -> f64 {
        self.delta_used
    }

    pub fn role(&self, f: FileId) -> Role {
        if self.i_files.contains(&f) {
            Role::I
        } else {
            Role::P
        }
    }

    /// The I-file a P-file is compressed against; `None` for I-files.
    pub fn reference(&self, f: FileId) -> Option<FileId> {
        self.reference.get(&f).copied()
    }

    pub fn compressed_units(&self, f: FileId) -> u64 {
        self.compressed_units[f.index()]
    }

    pub fn total_units(&self) -> u64 {
        self.compressed_units.iter().sum()
    }

    /// Compressed size relative to `F`.
    pub fn size_ratio(&self, f: FileId) -> f64 {
        self.compressed_units(f) as f64 / self.file_units as f64
    }

    /// Compressed form of `f`: the whole file for I-files, the private
    /// segment for P-files.
    pub fn payload(&self, lib: &GroupedLibrary, bits: &BitLibrary, f: FileId) -> Vec<Word> {
        match self.role(f) {
            Role::I => bits.file(lib, f),
            Role::P => bits.private(f).to_vec(),
        }
    }

    /// Inverse of [`payload`](Self::payload) for a P-file, given the
    /// reference I-file's full contents.
    pub fn reconstruct(&self, f: FileId, compressed: &[Word], reference_bits: &[Word]) -> Vec<Word> {
        match self.role(f) {
            Role::I => compressed.to_vec(),
            Role::P => {
                let shared = self.file_units - self.compressed_units(f);
                let mut out = reference_bits[..shared as usize].to_vec();
                out.extend_from_slice(compressed);
                out
            }
        }
    }

    /// One line per file: `id role reference units`, with `-` for I-file
    /// references.
    pub fn manifest(&self) -> String {
        let mut out = String::new();
        for i in 0..self.m() {
            let f = FileId::from_index(i);
            let (role, r) = match self.role(f) {
                Role::I => ("I", "-".to_string()),
                Role::P => ("P", self.reference[&f].to_string()),
            };
            let _ = writeln!(out, "{f} {role} {r} {}", self.compressed_units(f));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> FileSet {
        v.iter().map(|&i| FileId(i)).collect()
    }

    #[test]
    fn aggregate_popularity_examples() {
        let lib = GroupedLibrary::uniform(4, 2, 0.25, 8).unwrap();
        let all = lib.all_files();
        let p = aggregate_popularity(&lib, 2, 0.25, &all, FileId(2)).unwrap();
        assert!((p - 0.75).abs() < 1e-15);

        let skewed = GroupedLibrary::new(2, 1, 1.0, 4, Some(vec![1.0, 0.0])).unwrap();
        let all = skewed.all_files();
        assert_eq!(aggregate_popularity(&skewed, 3, 0.5, &all, FileId(2)).unwrap(), 0.0);
        assert_eq!(aggregate_popularity(&skewed, 1, 0.5, &all, FileId(1)).unwrap(), 1.0);

        let lib = GroupedLibrary::uniform(10, 2, 0.5, 8).unwrap();
        let all = lib.all_files();
        let p = aggregate_popularity(&lib, 1, 0.5, &all, FileId(3)).unwrap();
        assert!((p - 0.2).abs() < 1e-15);
        assert_eq!(aggregate_popularity(&lib, 1, 0.5, &ids(&[1]), FileId(3)), Err(Error::NotActive(FileId(3))));
    }

    #[test]
    fn partition_prefers_lowest_index() {
        let lib = GroupedLibrary::uniform(4, 2, 0.25, 8).unwrap();
        let c = partition_library(&lib, 2, 0.25).unwrap();
        assert_eq!(c.i_files(), &ids(&[1, 3]));
        assert_eq!(c.p_files(), &ids(&[2, 4]));
        assert_eq!(c.reference(FileId(2)), Some(FileId(1)));
        assert_eq!(c.reference(FileId(4)), Some(FileId(3)));
        assert_eq!(c.compressed_units(FileId(1)), 8);
        assert_eq!(c.compressed_units(FileId(2)), 2);
        assert_eq!(c.manifest(), "1 I - 8\n2 P 1 2\n3 I - 8\n4 P 3 2\n");
    }

    #[test]
    fn explicit_partition_is_accepted() {
        let lib = GroupedLibrary::uniform(4, 2, 0.25, 8).unwrap();
        let reference = [(FileId(1), FileId(2)), (FileId(3), FileId(4))].into_iter().collect();
        let c = CompressedLibrary::from_parts(&lib, ids(&[2, 4]), reference, 0.25).unwrap();
        assert_eq!(c.total_units(), 20);
        let chained = [(FileId(1), FileId(2)), (FileId(3), FileId(1))].into_iter().collect();
        assert!(CompressedLibrary::from_parts(&lib, ids(&[2, 4]), chained, 0.25).is_err());
    }

    #[test]
    fn independent_library_is_not_compressed() {
        let lib = GroupedLibrary::uniform(6, 1, 1.0, 5).unwrap();
        let c = partition_library(&lib, 3, 0.5).unwrap();
        assert_eq!(c.i_files().len(), 6);
        assert!(c.p_files().is_empty());
        assert_eq!(c.manifest(), CompressedLibrary::uncompressed(&lib).manifest());
    }

    #[test]
    fn reference_partition() {
        let lib = GroupedLibrary::uniform(100, 2, 0.2, 10).unwrap();
        let c = partition_library(&lib, 10, 0.2).unwrap();
        assert_eq!(c.i_files().len(), 50);
        assert_eq!(c.p_files().len(), 50);
        assert_eq!(c.total_units(), 600);
        assert_eq!(c.total_units(), lib.library_entropy());
    }

    #[test]
    fn popular_group_member_is_chosen_as_reference() {
        let q = vec![0.1, 0.4, 0.25, 0.25];
        let lib = GroupedLibrary::new(4, 2, 0.25, 8, Some(q)).unwrap();
        let c = partition_library(&lib, 2, 0.25).unwrap();
        // both ensembles have the same mass, so the lowest index wins
        assert_eq!(c.i_files(), &ids(&[1, 3]));
        let c = partition_library(&lib, 2, 0.1).unwrap();
        assert_eq!(c.i_files().len(), 4);
    }

    #[test]
    fn payload_roundtrip() {
        let lib = GroupedLibrary::uniform(4, 2, 0.25, 8).unwrap();
        let bits = BitLibrary::realize(&lib, 3);
        let c = partition_library(&lib, 2, 0.25).unwrap();
        let reference = c.payload(&lib, &bits, FileId(1));
        let p = c.payload(&lib, &bits, FileId(2));
        assert_eq!(p.len(), 2);
        assert_eq!(c.reconstruct(FileId(2), &p, &reference), bits.file(&lib, FileId(2)));
    }
}
