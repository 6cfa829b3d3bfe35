//! Correlated file libraries.
//!
//! A [`GroupedLibrary`] partitions `m` files into equal, disjoint groups of
//! `kappa` files. Every file in a group is the concatenation of a segment
//! shared by the whole group and a private segment of `delta * F` units, so
//!
//! ```text
//! H(W_f)          = F
//! H(W_f | W_f')   = delta * F      (same group)
//! H(W_f, W_f')    = 2F             (different groups)
//! ```
//!
//! Entropies are exact integers in "units". A [`BitLibrary`] realizes each
//! unit as one 64-bit word drawn from a seeded stream.

use std::collections::BTreeSet;
use std::fmt;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::seed;

/// One realized entropy unit.
pub type Word = u64;

/// A 1-based file index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FileId(pub u32);

impl FileId {
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(i: usize) -> Self {
        FileId(i as u32 + 1)
    }
}

impl fmt::Display for FileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type FileSet = BTreeSet<FileId>;

const EPS: f64 = 1e-9;

/// Statistical model of a grouped, correlated library.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedLibrary {
    m: usize,
    kappa: usize,
    delta: f64,
    file_units: u64,
    private_units: u64,
    q: Vec<f64>,
}

impl GroupedLibrary {
    /// Builds a library with groups `{1..kappa}, {kappa+1..2kappa}, ...`.
    ///
    /// `q = None` selects uniform demand. With `kappa = 1` the value of
    /// `delta` is ignored and all files are independent.
    pub fn new(m: usize, kappa: usize, delta: f64, file_units: u64, q: Option<Vec<f64>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidLibrary("m must be at least 1".into()));
        }
        if kappa == 0 || !m.is_multiple_of(kappa) {
            return Err(Error::InvalidLibrary(format!("kappa={kappa} must be >= 1 and divide m={m}")));
        }
        if file_units == 0 {
            return Err(Error::InvalidLibrary("file_units must be positive".into()));
        }
        let private_units = if kappa == 1 {
            file_units
        } else {
            if !(delta > 0.0 && delta <= 1.0) {
                return Err(Error::InvalidLibrary(format!("delta={delta} must lie in (0, 1]")));
            }
            let raw = delta * file_units as f64;
            let rounded = raw.round();
            if (raw - rounded).abs() > 1e-9 * file_units as f64 || rounded < 1.0 {
                return Err(Error::InvalidLibrary(format!(
                    "delta*F = {raw} is not a positive integer number of units"
                )));
            }
            rounded as u64
        };
        let q = match q {
            None => vec![1.0 / m as f64; m],
            Some(q) => {
                if q.len() != m {
                    return Err(Error::InvalidLibrary(format!(
                        "demand distribution has {} entries, expected {m}",
                        q.len()
                    )));
                }
                let sum: f64 = q.iter().sum();
                if q.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (sum - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidLibrary(format!("demand distribution must be a pmf (sum {sum})")));
                }
                q
            }
        };
        Ok(Self { m, kappa, delta: if kappa == 1 { 1.0 } else { delta }, file_units, private_units, q })
    }

    /// Uniform-demand shorthand.
    pub fn uniform(m: usize, kappa: usize, delta: f64, file_units: u64) -> Result<Self> {
        Self::new(m, kappa, delta, file_units, None)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn group_size(&self) -> usize {
        self.kappa
    }

    /// Generation parameter; `1.0` for independent (`kappa = 1`) libraries.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn file_units(&self) -> u64 {
        self.file_units
    }

    /// Length of each file's private segment.
    pub fn private_units(&self) -> u64 {
        self.private_units
    }

    /// Length of each group's shared segment.
    pub fn shared_units(&self) -> u64 {
        self.file_units - self.private_units
    }

    pub fn demand_pmf(&self) -> &[f64] {
        &self.q
    }

    pub fn q(&self, f: FileId) -> f64 {
        self.q[f.index()]
    }

    pub fn num_groups(&self) -> usize {
        self.m / self.kappa
    }

    pub fn files(&self) -> impl Iterator<Item = FileId> + '_ {
        (0..self.m).map(FileId::from_index)
    }

    pub fn all_files(&self) -> FileSet {
        self.files().collect()
    }

    pub fn group_of(&self, f: FileId) -> usize {
        f.index() / self.kappa
    }

    pub fn group_members(&self, group: usize) -> impl Iterator<Item = FileId> {
        let start = group * self.kappa;
        (start..start + self.kappa).map(FileId::from_index)
    }

    pub fn check_file(&self, f: FileId) -> Result<()> {
        if f.0 == 0 || f.index() >= self.m {
            Err(Error::UnknownFile(f))
        } else {
            Ok(())
        }
    }

    /// `H({W_f : f in subset})` in units.
    pub fn joint_entropy<I>(&self, subset: I) -> Result<u64>
    where
        I: IntoIterator<Item = FileId>,
    {
        let mut per_group: Vec<u64> = Vec::new();
        let mut seen = FileSet::new();
        for f in subset {
            self.check_file(f)?;
            if seen.insert(f) {
                let g = self.group_of(f);
                if per_group.len() <= g {
                    per_group.resize(g + 1, 0);
                }
                per_group[g] += 1;
            }
        }
        if seen.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(per_group.iter().filter(|&&c| c > 0).map(|&c| self.shared_units() + c * self.private_units).sum())
    }

    /// `H(W_f | W_given)` in units.
    pub fn conditional_entropy(&self, f: FileId, given: FileId) -> Result<u64> {
        Ok(self.joint_entropy([f, given])? - self.joint_entropy([given])?)
    }

    /// True iff `H(W_f, W_f') <= (1 + delta_thresh) F`.
    pub fn is_delta_correlated(&self, f: FileId, f_prime: FileId, delta_thresh: f64) -> Result<bool> {
        if f == f_prime {
            return Err(Error::SameFile(f));
        }
        let joint = self.joint_entropy([f, f_prime])? as f64;
        let limit = (1.0 + delta_thresh) * self.file_units as f64;
        Ok(joint <= limit + EPS * self.file_units as f64)
    }

    /// `f` together with every file of `active` that is δ-correlated with it.
    pub fn delta_ensemble(&self, f: FileId, delta_thresh: f64, active: &FileSet) -> Result<FileSet> {
        if !active.contains(&f) {
            return Err(Error::NotActive(f));
        }
        let mut ensemble = FileSet::new();
        ensemble.insert(f);
        for &other in active {
            if other != f && self.is_delta_correlated(f, other, delta_thresh)? {
                ensemble.insert(other);
            }
        }
        Ok(ensemble)
    }

    /// Smallest δ-ensemble size over all files, counting the file itself.
    pub fn min_ensemble_size(&self, delta_thresh: f64) -> usize {
        let all = self.all_files();
        self.files()
            .map(|f| self.delta_ensemble(f, delta_thresh, &all).map(|e| e.len()).unwrap_or(1))
            .min()
            .unwrap_or(0)
    }

    /// Entropy of the whole library, `(m/kappa) F (1 + (kappa-1) delta)`.
    pub fn library_entropy(&self) -> u64 {
        self.num_groups() as u64 * (self.shared_units() + self.kappa as u64 * self.private_units)
    }
}

/// A realization of a [`GroupedLibrary`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitLibrary {
    shared: Vec<Vec<Word>>,
    private: Vec<Vec<Word>>,
}

const SHARED_STREAM: u64 = 0x5348;
const PRIVATE_STREAM: u64 = 0x5052;

fn random_words(master: u64, path: &[u64], len: u64) -> Vec<Word> {
    let mut rng = seed::stream(master, path);
    (0..len).map(|_| rng.next_u64()).collect()
}

impl BitLibrary {
    /// Draws i.i.d. uniform segments keyed by `(seed, group)` and `(seed, file)`.
    pub fn realize(lib: &GroupedLibrary, seed: u64) -> Self {
        let shared =
            (0..lib.num_groups()).map(|g| random_words(seed, &[SHARED_STREAM, g as u64], lib.shared_units())).collect();
        let private =
            lib.files().map(|f| random_words(seed, &[PRIVATE_STREAM, f.0 as u64], lib.private_units())).collect();
        Self { shared, private }
    }

    pub fn num_files(&self) -> usize {
        self.private.len()
    }

    pub fn shared(&self, group: usize) -> &[Word] {
        &self.shared[group]
    }

    pub fn private(&self, f: FileId) -> &[Word] {
        &self.private[f.index()]
    }

    /// `shared(group(f)) ++ private(f)`.
    pub fn file(&self, lib: &GroupedLibrary, f: FileId) -> Vec<Word> {
        let mut bits = self.shared[lib.group_of(f)].clone();
        bits.extend_from_slice(self.private(f));
        bits
    }
}

/// Free-function form of [`GroupedLibrary::new`].
pub fn build_grouped_library(
    m: usize,
    kappa: usize,
    delta: f64,
    file_units: u64,
    q: Option<Vec<f64>>,
) -> Result<GroupedLibrary> {
    GroupedLibrary::new(m, kappa, delta, file_units, q)
}

pub fn realize_bits(lib: &GroupedLibrary, seed: u64) -> BitLibrary {
    BitLibrary::realize(lib, seed)
}
