//! Persisted collections of tongues.
//!
//! File format: one JSON object per line. The first line is a header
//!
//! ```text
//! {"format_version":1,"family":"sine-l","l":3,"tol":..,"generator":{..},
//!  "count":N,"fingerprint":"<sha256>","records_digest":"<sha256>"}
//! ```
//!
//! followed by `N` records `{"num":p,"den":q,"t_lo":..,"t_hi":..,"center":..}`
//! sorted by `p/q`. Floats carry 17 significant digits. `t_lo`/`t_hi` are
//! `null` for records that only resolve a center.
//!
//! The fingerprint hashes the generating parameters; the records digest
//! hashes the record lines, so a file that was edited or truncated fails to
//! load.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::family::{CriticalFamily, FamilySpec};
use crate::farey::{farey_sequence, FareyDomain, Rational};
use crate::rotation::{center, locking_interval_from_center, RotationConfig, Tongue};

pub const FORMAT_VERSION: u32 = 1;

/// How the set of rationals in an atlas was chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Generator {
    /// Every rational in `[0, 1]` with denominator `<= q_max`.
    Farey { q_max: u64 },
    /// Endpoints of all harmonic cells `D(n_1..n_r)` of `domain` with
    /// `r <= depth` and `|n_i| <= cutoff`. Locking intervals are resolved
    /// for endpoints introduced at levels `<= locking_depth`.
    Harmonic {
        domain: String,
        depth: usize,
        cutoff: i64,
        locking_depth: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtlasRecord {
    pub rho: Rational,
    pub locking: Option<(f64, f64)>,
    pub center: f64,
}

impl AtlasRecord {
    pub fn tongue(&self, tol: f64) -> Option<Tongue> {
        self.locking.map(|(t_lo, t_hi)| Tongue {
            rho: self.rho.clone(),
            t_lo,
            t_hi,
            center: self.center,
            tol,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TongueAtlas {
    family: FamilySpec,
    tol: f64,
    generator: Generator,
    records: Vec<AtlasRecord>,
    fingerprint: String,
}

/// Parameters of [`build_atlas`].
#[derive(Debug, Clone, PartialEq)]
pub struct AtlasSpec {
    pub family: FamilySpec,
    pub tol: f64,
    pub generator: Generator,
}

pub fn fingerprint(family: &FamilySpec, tol: f64, generator: &Generator) -> String {
    let gen = serde_json::to_string(generator).expect("generator serializes");
    let canon = format!(
        "v{FORMAT_VERSION}|{}|{}|{:.16e}|{gen}",
        family.name, family.l, tol
    );
    hex::encode(Sha256::digest(canon.as_bytes()))
}

impl TongueAtlas {
    /// Sorts the records and checks the atlas invariants.
    pub fn new(
        family: FamilySpec,
        tol: f64,
        generator: Generator,
        mut records: Vec<AtlasRecord>,
    ) -> Result<Self> {
        records.sort_by(|a, b| a.rho.cmp(&b.rho));
        validate(&records)?;
        let fingerprint = fingerprint(&family, tol, &generator);
        Ok(TongueAtlas {
            family,
            tol,
            generator,
            records,
            fingerprint,
        })
    }

    pub fn family(&self) -> &FamilySpec {
        &self.family
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn records(&self) -> &[AtlasRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, rho: &Rational) -> Option<&AtlasRecord> {
        self.records
            .binary_search_by(|r| r.rho.cmp(rho))
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn center(&self, rho: &Rational) -> Result<f64> {
        self.get(rho)
            .map(|r| r.center)
            .ok_or_else(|| Error::MissingCenter(rho.to_string()))
    }

    pub fn tongue(&self, rho: &Rational) -> Result<Tongue> {
        self.get(rho)
            .and_then(|r| r.tongue(self.tol))
            .ok_or_else(|| Error::MissingLocking(rho.to_string()))
    }

    /// All records with a resolved locking interval, in rational order.
    pub fn tongues(&self) -> Vec<Tongue> {
        self.records
            .iter()
            .filter_map(|r| r.tongue(self.tol))
            .collect()
    }

    /// Largest denominator among records with a locking interval.
    pub fn max_locked_den(&self) -> u64 {
        self.records
            .iter()
            .filter(|r| r.locking.is_some())
            .filter_map(|r| r.rho.to_u64_pair().map(|(_, q)| q))
            .max()
            .unwrap_or(0)
    }

    fn record_lines(&self) -> Vec<String> {
        self.records.iter().map(record_line).collect()
    }

    pub fn to_jsonl(&self) -> String {
        let lines = self.record_lines();
        let digest = digest_lines(&lines);
        let header = serde_json::json!({
            "format_version": FORMAT_VERSION,
            "family": self.family.name,
            "l": self.family.l,
            "tol": self.tol,
            "generator": self.generator,
            "count": lines.len(),
            "fingerprint": self.fingerprint,
            "records_digest": digest,
        });
        let mut out = String::new();
        writeln!(out, "{header}").expect("write to string");
        for line in lines {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let corrupt = |m: &str| Error::CorruptAtlas(m.to_string());
        let mut lines = text.lines();
        let header: Value = serde_json::from_str(lines.next().ok_or_else(|| corrupt("empty file"))?)
            .map_err(|e| Error::CorruptAtlas(format!("header: {e}")))?;
        let version = header["format_version"]
            .as_u64()
            .ok_or_else(|| corrupt("header lacks format_version"))?;
        if version != FORMAT_VERSION as u64 {
            return Err(Error::VersionMismatch(version as u32));
        }
        let family = FamilySpec {
            name: header["family"]
                .as_str()
                .ok_or_else(|| corrupt("header lacks family"))?
                .to_string(),
            l: header["l"].as_u64().ok_or_else(|| corrupt("header lacks l"))? as u32,
        };
        let tol = header["tol"].as_f64().ok_or_else(|| corrupt("header lacks tol"))?;
        let generator: Generator = serde_json::from_value(header["generator"].clone())
            .map_err(|e| Error::CorruptAtlas(format!("generator: {e}")))?;
        let count = header["count"].as_u64().ok_or_else(|| corrupt("header lacks count"))? as usize;
        let stored_fp = header["fingerprint"].as_str().unwrap_or_default();
        let stored_digest = header["records_digest"].as_str().unwrap_or_default();

        let record_lines: Vec<&str> = lines.filter(|l| !l.trim().is_empty()).collect();
        if record_lines.len() != count {
            return Err(Error::CorruptAtlas(format!(
                "expected {count} records, found {}",
                record_lines.len()
            )));
        }
        let owned: Vec<String> = record_lines.iter().map(|s| s.to_string()).collect();
        if digest_lines(&owned) != stored_digest {
            return Err(corrupt("records digest mismatch"));
        }
        if fingerprint(&family, tol, &generator) != stored_fp {
            return Err(corrupt("fingerprint mismatch"));
        }
        let records = record_lines
            .iter()
            .enumerate()
            .map(|(i, l)| parse_record(l).map_err(|e| Error::CorruptAtlas(format!("record {i}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if records.windows(2).any(|w| w[0].rho >= w[1].rho) {
            return Err(corrupt("records not sorted"));
        }
        TongueAtlas::new(family, tol, generator, records).map_err(|e| match e {
            Error::CorruptAtlas(m) => Error::CorruptAtlas(m),
            other => Error::CorruptAtlas(other.to_string()),
        })
    }
}

fn validate(records: &[AtlasRecord]) -> Result<()> {
    for w in records.windows(2) {
        if w[0].rho == w[1].rho {
            return Err(Error::CorruptAtlas(format!("duplicate rational {}", w[0].rho)));
        }
        if w[0].center >= w[1].center {
            return Err(Error::CorruptAtlas(format!(
                "centers of {} and {} are out of order",
                w[0].rho, w[1].rho
            )));
        }
    }
    let mut prev: Option<&AtlasRecord> = None;
    for r in records {
        if !r.center.is_finite() {
            return Err(Error::CorruptAtlas(format!("non-finite center for {}", r.rho)));
        }
        if let Some((lo, hi)) = r.locking {
            if !(lo <= r.center && r.center <= hi) {
                return Err(Error::CorruptAtlas(format!(
                    "center of {} lies outside its locking interval",
                    r.rho
                )));
            }
            if let Some(p) = prev {
                let (_, phi) = p.locking.expect("prev has locking");
                if phi >= lo {
                    return Err(Error::CorruptAtlas(format!(
                        "tongues of {} and {} overlap",
                        p.rho, r.rho
                    )));
                }
            }
            prev = Some(r);
        }
    }
    Ok(())
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn record_line(r: &AtlasRecord) -> String {
    let (lo, hi) = match r.locking {
        Some((a, b)) => (fmt_f64(a), fmt_f64(b)),
        None => ("null".to_string(), "null".to_string()),
    };
    format!(
        "{{\"num\":{},\"den\":{},\"t_lo\":{lo},\"t_hi\":{hi},\"center\":{}}}",
        r.rho.num(),
        r.rho.den(),
        fmt_f64(r.center)
    )
}

fn parse_record(line: &str) -> Result<AtlasRecord> {
    let v: Value = serde_json::from_str(line).map_err(|e| Error::CorruptAtlas(e.to_string()))?;
    let int = |k: &str| {
        v[k].as_u64()
            .ok_or_else(|| Error::CorruptAtlas(format!("bad `{k}`")))
    };
    let rho = Rational::new(int("num")?, int("den")?)?;
    let center = v["center"]
        .as_f64()
        .ok_or_else(|| Error::CorruptAtlas("bad `center`".into()))?;
    let locking = match (&v["t_lo"], &v["t_hi"]) {
        (Value::Null, Value::Null) => None,
        (a, b) => Some((
            a.as_f64().ok_or_else(|| Error::CorruptAtlas("bad `t_lo`".into()))?,
            b.as_f64().ok_or_else(|| Error::CorruptAtlas("bad `t_hi`".into()))?,
        )),
    };
    Ok(AtlasRecord {
        rho,
        locking,
        center,
    })
}

fn digest_lines(lines: &[String]) -> String {
    let mut h = Sha256::new();
    for l in lines {
        h.update(l.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

pub fn save_atlas(atlas: &TongueAtlas, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(atlas.to_jsonl().as_bytes())?;
    Ok(())
}

pub fn load_atlas(path: &Path) -> Result<TongueAtlas> {
    TongueAtlas::from_jsonl(&fs::read_to_string(path)?)
}

/// Rationals required by a generator, each with the level at which it first
/// appears (0 for the base endpoints).
pub fn required_rationals(generator: &Generator) -> Result<Vec<(Rational, usize)>> {
    match generator {
        Generator::Farey { q_max } => {
            if *q_max < 1 {
                return Err(Error::InvalidArgument("q_max must be at least 1".into()));
            }
            Ok(farey_sequence(*q_max).into_iter().map(|r| (r, 0)).collect())
        }
        Generator::Harmonic {
            domain,
            depth,
            cutoff,
            ..
        } => {
            let base: FareyDomain = domain.parse()?;
            if *cutoff < 1 {
                return Err(Error::InvalidArgument("cutoff must be at least 1".into()));
            }
            let mut out = vec![(base.lo().clone(), 0), (base.hi().clone(), 0)];
            let mut level = vec![base];
            for r in 1..=*depth {
                let mut next = Vec::with_capacity(level.len() * (2 * *cutoff as usize + 1));
                for d in &level {
                    for n in -*cutoff..=*cutoff + 1 {
                        let u = d.harmonic_endpoint(n);
                        if n.abs() <= *cutoff {
                            next.push(d.harmonic_refine(n));
                        }
                        out.push((u, r));
                    }
                }
                level = next;
            }
            out.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
            out.dedup_by(|a, b| a.0 == b.0);
            Ok(out)
        }
    }
}

/// Computes centers (and locking intervals where required) for every
/// rational of the spec. The result does not depend on `jobs`.
pub fn build_atlas(spec: &AtlasSpec, jobs: usize, cfg: &RotationConfig) -> Result<TongueAtlas> {
    let fam = CriticalFamily::from_spec(&spec.family)?;
    let wanted = required_rationals(&spec.generator)?;
    let locking_depth = match spec.generator {
        Generator::Farey { .. } => usize::MAX,
        Generator::Harmonic { locking_depth, .. } => locking_depth,
    };
    let work = |(rho, level): &(Rational, usize)| -> Result<AtlasRecord> {
        let c = center(&fam, rho, cfg)?;
        let locking = if *level <= locking_depth {
            let (lo, hi) = locking_interval_from_center(&fam, rho, c, spec.tol, cfg)?;
            Some((lo.min(c), hi.max(c)))
        } else {
            None
        };
        Ok(AtlasRecord {
            rho: rho.clone(),
            locking,
            center: c,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    // Expensive (large-denominator) items first for better balance; the
    // merge below restores rational order.
    let mut order: Vec<usize> = (0..wanted.len()).collect();
    order.sort_by(|&a, &b| wanted[b].0.den().cmp(wanted[a].0.den()).then(a.cmp(&b)));
    let results: Vec<(usize, Result<AtlasRecord>)> = pool.install(|| {
        order
            .par_iter()
            .map(|&i| (i, work(&wanted[i])))
            .collect()
    });
    let mut slots: Vec<Option<AtlasRecord>> = vec![None; wanted.len()];
    let mut first_err: Option<(usize, Error)> = None;
    for (i, r) in results {
        match r {
            Ok(rec) => slots[i] = Some(rec),
            Err(e) => {
                if first_err.as_ref().is_none_or(|(j, _)| i < *j) {
                    first_err = Some((i, e));
                }
            }
        }
    }
    if let Some((_, e)) = first_err {
        return Err(e);
    }
    let records = slots.into_iter().map(|r| r.expect("filled")).collect();
    TongueAtlas::new(spec.family.clone(), spec.tol, spec.generator.clone(), records)
}
