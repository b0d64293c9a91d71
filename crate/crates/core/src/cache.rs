//! Append-only JSON-lines store of computed `ν` values keyed by `(m, n, t, p, e)`.
//!
//! Later lines win over earlier ones with the same key. Lines that do not
//! parse, or whose witness does not fit the key, are ignored on read.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::formula::MatrixShape;
use crate::frobenius::{nu_determinantal, prime_power, Budget, NuOutcome, NuRecord};
use crate::polyfp::MinorSpec;
use crate::witness::{FactorJson, ProductOfMinors};

pub type CacheKey = (usize, usize, usize, u64, u32);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheRecord {
    pub m: usize,
    pub n: usize,
    pub t: usize,
    pub p: u64,
    pub e: u32,
    pub nu: u64,
    pub witness: Vec<FactorJson>,
}

impl CacheRecord {
    pub fn from_record(rec: &NuRecord) -> Self {
        CacheRecord {
            m: rec.shape.m,
            n: rec.shape.n,
            t: rec.shape.t,
            p: rec.p,
            e: rec.e,
            nu: rec.nu,
            witness: rec.witness.to_factor_json(),
        }
    }

    pub fn key(&self) -> CacheKey {
        (self.m, self.n, self.t, self.p, self.e)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("cache record serializes")
    }

    /// Rebuilds a record, checking that the witness consists of `nu` minors
    /// of size `t`.
    pub fn to_record(&self) -> Result<NuRecord> {
        let shape = MatrixShape::new(self.m, self.n, self.t)?;
        let q = prime_power(self.p, self.e)?;
        let mut factors = Vec::with_capacity(self.witness.len());
        for f in &self.witness {
            let spec = MinorSpec::new(f.rows.clone(), f.cols.clone())?;
            if spec.size() != self.t || f.mult == 0 {
                return Err(crate::Error::InvalidArgument(format!(
                    "cached witness factor {spec} is not a size-{} minor",
                    self.t
                )));
            }
            factors.push((spec, f.mult));
        }
        let witness = ProductOfMinors::new(shape, factors)?;
        if witness.count() != self.nu {
            return Err(crate::Error::InvalidArgument(format!(
                "cached witness has {} minors, expected nu = {}",
                witness.count(),
                self.nu
            )));
        }
        Ok(NuRecord {
            shape,
            p: self.p,
            e: self.e,
            q,
            nu: self.nu,
            witness,
            elapsed: Duration::ZERO,
            nodes: 0,
            from_cache: true,
        })
    }
}

#[derive(Clone, Debug)]
pub struct NuCache {
    path: PathBuf,
}

impl NuCache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        NuCache { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Current contents, last writer winning per key. A missing file is empty.
    pub fn load(&self) -> Result<BTreeMap<CacheKey, CacheRecord>> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(BTreeMap::new()),
            Err(e) => return Err(e.into()),
        };
        file.lock_shared()?;
        let mut out = BTreeMap::new();
        for line in BufReader::new(&file).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if let Ok(rec) = serde_json::from_str::<CacheRecord>(&line) {
                out.insert(rec.key(), rec);
            }
        }
        Ok(out)
    }

    pub fn get(&self, shape: MatrixShape, p: u64, e: u32) -> Result<Option<NuRecord>> {
        let key = (shape.m, shape.n, shape.t, p, e);
        Ok(self.load()?.get(&key).and_then(|rec| rec.to_record().ok()))
    }

    /// Appends one line under an exclusive lock.
    pub fn append(&self, rec: &NuRecord) -> Result<()> {
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        file.lock()?;
        let mut line = CacheRecord::from_record(rec).to_json_line();
        line.push('\n');
        file.write_all(line.as_bytes())?;
        file.flush()?;
        Ok(())
    }
}

/// `nu_determinantal` behind an optional cache: hits skip the search, fresh
/// exact results are appended. Unknown outcomes are never cached.
pub fn nu_cached(
    cache: Option<&NuCache>,
    shape: MatrixShape,
    p: u64,
    e: u32,
    budget: Budget,
) -> Result<NuOutcome> {
    if let Some(cache) = cache {
        if let Some(rec) = cache.get(shape, p, e)? {
            return Ok(NuOutcome::Known(rec));
        }
    }
    let outcome = nu_determinantal(shape, p, e, budget)?;
    if let (Some(cache), NuOutcome::Known(rec)) = (cache, &outcome) {
        cache.append(rec)?;
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn known(o: NuOutcome) -> NuRecord {
        match o {
            NuOutcome::Known(r) => r,
            NuOutcome::Unknown(ex) => panic!("{ex}"),
        }
    }

    #[test]
    fn line_layout() {
        let s = MatrixShape::new(2, 2, 2).unwrap();
        let rec = known(nu_determinantal(s, 3, 1, Budget::default()).unwrap());
        assert_eq!(
            CacheRecord::from_record(&rec).to_json_line(),
            r#"{"m":2,"n":2,"t":2,"p":3,"e":1,"nu":2,"witness":[{"rows":[1,2],"cols":[1,2],"mult":2}]}"#
        );
    }

    #[test]
    fn hit_miss_and_last_writer_wins() {
        let dir = tempfile::tempdir().unwrap();
        let cache = NuCache::new(dir.path().join("sub").join("nu.jsonl"));
        let s = MatrixShape::new(2, 3, 2).unwrap();
        assert!(cache.get(s, 2, 1).unwrap().is_none());

        let fresh = known(nu_cached(Some(&cache), s, 2, 1, Budget::default()).unwrap());
        assert!(!fresh.from_cache);
        let hit = known(nu_cached(Some(&cache), s, 2, 1, Budget::default()).unwrap());
        assert!(hit.from_cache);
        assert_eq!((hit.nu, &hit.witness), (fresh.nu, &fresh.witness));

        // A later, different line for the same key replaces the first; junk
        // lines are skipped.
        let mut other = fresh.clone();
        other.nu = 1;
        other.witness = ProductOfMinors::new(s, [(MinorSpec::contiguous(1, 1, 2), 1)]).unwrap();
        let mut f = OpenOptions::new().append(true).open(cache.path()).unwrap();
        writeln!(f, "{{not json").unwrap();
        drop(f);
        cache.append(&other).unwrap();
        assert_eq!(cache.get(s, 2, 1).unwrap().unwrap().nu, 1);
        assert_eq!(cache.load().unwrap().len(), 1);
    }

    #[test]
    fn rejects_inconsistent_records() {
        let bad = CacheRecord {
            m: 2,
            n: 2,
            t: 2,
            p: 2,
            e: 1,
            nu: 3,
            witness: vec![FactorJson {
                rows: vec![1, 2],
                cols: vec![1, 2],
                mult: 1,
            }],
        };
        assert!(bad.to_record().is_err());
        let wrong_size = CacheRecord {
            nu: 1,
            witness: vec![FactorJson {
                rows: vec![1],
                cols: vec![1],
                mult: 1,
            }],
            ..bad
        };
        assert!(wrong_size.to_record().is_err());
    }
}
