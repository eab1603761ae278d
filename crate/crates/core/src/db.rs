//! Flat-file class database: one JSON-lines file per `(n, k)` cell.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{class_key, CanonicalKey};
use crate::pauli::{PauliError, StabGroup};
use crate::properties::properties;
use crate::search::{ClassEntry, Enumeration};

#[derive(Debug, Error)]
pub enum DbError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
    #[error("invalid record [[{n},{k}]] index {index}: {reason}")]
    Invalid { n: usize, k: usize, index: usize, reason: String },
    #[error("unknown query filter {0:?}")]
    UnknownFilter(String),
    #[error("bad value {value:?} for filter {name}")]
    BadFilterValue { name: String, value: String },
    #[error("database incomplete for n = {n}: missing {path}")]
    Incomplete { n: usize, path: PathBuf },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DbError + '_ {
    move |source| DbError::Io { path: path.to_path_buf(), source }
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(D::Error::custom(format!("expected a decimal string, found {s:?}")));
        }
        BigUint::parse_bytes(s.as_bytes(), 10).ok_or_else(|| D::Error::custom("bad decimal"))
    }
}

/// One class with its invariants. Field order is the on-disk key order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeRecord {
    pub n: usize,
    pub k: usize,
    pub d: u32,
    pub index: usize,
    pub generators: Vec<String>,
    #[serde(with = "decimal")]
    pub aut_group_size: BigUint,
    pub is_css: bool,
    pub is_decomposable: bool,
    pub is_degenerate: bool,
    pub is_gf4linear: bool,
    pub is_even: bool,
    pub length: usize,
    pub weight_enumerator: Vec<u64>,
    pub canonical_key: String,
}

impl CodeRecord {
    pub fn from_class(entry: &ClassEntry) -> Result<CodeRecord, PauliError> {
        let g = &entry.rep;
        let p = properties(g)?;
        Ok(CodeRecord {
            n: g.n(),
            k: g.k(),
            d: p.d,
            index: entry.index,
            generators: g.generator_strings(),
            aut_group_size: entry.aut_size.clone(),
            is_css: p.is_css,
            is_decomposable: p.is_decomposable,
            is_degenerate: p.is_degenerate,
            is_gf4linear: p.is_gf4linear,
            is_even: p.is_even,
            length: p.length,
            weight_enumerator: p.weight_enumerator.coeffs,
            canonical_key: entry.key.to_hex(),
        })
    }

    /// Parses one JSON line.
    pub fn from_json_line(line: &str) -> Result<CodeRecord, serde_json::Error> {
        serde_json::from_str(line)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn group(&self) -> Result<StabGroup, PauliError> {
        StabGroup::parse_strings(self.n, &self.generators)
    }

    fn invalid(&self, reason: impl Into<String>) -> DbError {
        DbError::Invalid { n: self.n, k: self.k, index: self.index, reason: reason.into() }
    }

    /// Structural checks that do not need a canonical-form computation.
    pub fn validate(&self) -> Result<(), DbError> {
        if self.k > self.n {
            return Err(self.invalid("k exceeds n"));
        }
        let g = self.group().map_err(|e| self.invalid(e.to_string()))?;
        if g.rank() != self.n - self.k || self.generators.len() != self.n - self.k {
            return Err(self.invalid(format!("expected {} independent generators", self.n - self.k)));
        }
        if self.weight_enumerator.len() != self.n + 1 {
            return Err(self.invalid("weight enumerator must have n + 1 entries"));
        }
        if self.weight_enumerator.iter().sum::<u64>() != 1u64 << (self.n - self.k) || self.weight_enumerator[0] != 1 {
            return Err(self.invalid("weight enumerator does not count the group"));
        }
        if self.aut_group_size == BigUint::default() {
            return Err(self.invalid("automorphism group order is zero"));
        }
        CanonicalKey::from_hex(&self.canonical_key).map_err(|e| self.invalid(e.to_string()))?;
        Ok(())
    }

    /// Whether the generators re-canonicalize to the stored key.
    pub fn key_matches(&self) -> Result<bool, DbError> {
        Ok(class_key(&self.group()?)?.to_hex() == self.canonical_key)
    }
}

/// Records for every class of an enumeration, keyed by `k`.
pub fn build_records(e: &Enumeration) -> Result<BTreeMap<usize, Vec<CodeRecord>>, PauliError> {
    e.levels
        .iter()
        .map(|(&k, classes)| {
            let recs = classes.par_iter().map(CodeRecord::from_class).collect::<Result<Vec<_>, _>>()?;
            Ok((k, recs))
        })
        .collect()
}

pub fn db_file_name(n: usize, k: usize) -> String {
    format!("codes_n{n}_k{k}.jsonl")
}

/// Writes one cell. Records are validated and written in index order;
/// indices must be unique. An empty list still creates the file.
pub fn write_level(dir: &Path, n: usize, k: usize, records: &[CodeRecord]) -> Result<PathBuf, DbError> {
    let mut sorted: Vec<&CodeRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.index);
    for (i, r) in sorted.iter().enumerate() {
        if (r.n, r.k) != (n, k) {
            return Err(r.invalid(format!("record belongs to [[{},{}]], not [[{n},{k}]]", r.n, r.k)));
        }
        if i > 0 && sorted[i - 1].index == r.index {
            return Err(r.invalid("duplicate index"));
        }
        r.validate()?;
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(db_file_name(n, k));
    let mut out = String::new();
    for r in sorted {
        out.push_str(&r.to_json_line());
        out.push('\n');
    }
    let mut f = fs::File::create(&path).map_err(io_err(&path))?;
    f.write_all(out.as_bytes()).map_err(io_err(&path))?;
    Ok(path)
}

/// Writes every cell in `levels` for `n` qubits.
pub fn write_db(dir: &Path, n: usize, levels: &BTreeMap<usize, Vec<CodeRecord>>) -> Result<Vec<PathBuf>, DbError> {
    levels.iter().map(|(&k, recs)| write_level(dir, n, k, recs)).collect()
}

/// Parses the text of one cell file. `validate` re-parses generators and
/// checks record invariants.
pub fn parse_level(text: &str, path: &Path, validate: bool) -> Result<Vec<CodeRecord>, DbError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let corrupt = |message: String| DbError::Corrupt { path: path.to_path_buf(), line: i + 1, message };
        let rec = CodeRecord::from_json_line(line).map_err(|e| corrupt(e.to_string()))?;
        if validate {
            rec.validate().map_err(|e| corrupt(e.to_string()))?;
        }
        out.push(rec);
    }
    out.sort_by_key(|r| r.index);
    Ok(out)
}

pub fn read_level(dir: &Path, n: usize, k: usize, validate: bool) -> Result<Vec<CodeRecord>, DbError> {
    let path = dir.join(db_file_name(n, k));
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    parse_level(&text, &path, validate)
}

/// Validated records of one cell, in index order.
pub fn read_db(dir: &Path, n: usize, k: usize) -> Result<Vec<CodeRecord>, DbError> {
    read_level(dir, n, k, true)
}

/// Cells `(n, k)` present in a directory.
pub fn list_cells(dir: &Path) -> Result<Vec<(usize, usize)>, DbError> {
    let mut cells = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let name = entry.map_err(io_err(dir))?.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some(rest) = name.strip_prefix("codes_n").and_then(|r| r.strip_suffix(".jsonl")) else { continue };
        let Some((a, b)) = rest.split_once("_k") else { continue };
        if let (Ok(n), Ok(k)) = (a.parse(), b.parse()) {
            cells.push((n, k));
        }
    }
    cells.sort_unstable();
    Ok(cells)
}

/// Conjunctive filters over record fields.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Query {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub d: Option<u32>,
    pub index: Option<usize>,
    pub aut_group_size: Option<BigUint>,
    pub is_css: Option<bool>,
    pub is_decomposable: Option<bool>,
    pub is_degenerate: Option<bool>,
    pub is_gf4linear: Option<bool>,
    pub is_even: Option<bool>,
    pub length: Option<usize>,
    pub weight_enumerator: Option<Vec<u64>>,
    pub canonical_key: Option<String>,
    /// Skip generator validation when reading.
    pub info_only: bool,
}

impl Query {
    /// Sets a filter by field name from its text form.
    pub fn set(&mut self, name: &str, value: &str) -> Result<(), DbError> {
        fn parse<T: std::str::FromStr>(name: &str, value: &str) -> Result<T, DbError> {
            value.trim().parse().map_err(|_| DbError::BadFilterValue { name: name.into(), value: value.into() })
        }
        match name {
            "n" => self.n = Some(parse(name, value)?),
            "k" => self.k = Some(parse(name, value)?),
            "d" => self.d = Some(parse(name, value)?),
            "index" => self.index = Some(parse(name, value)?),
            "aut_group_size" => self.aut_group_size = Some(parse(name, value)?),
            "is_css" => self.is_css = Some(parse(name, value)?),
            "is_decomposable" => self.is_decomposable = Some(parse(name, value)?),
            "is_degenerate" => self.is_degenerate = Some(parse(name, value)?),
            "is_gf4linear" => self.is_gf4linear = Some(parse(name, value)?),
            "is_even" => self.is_even = Some(parse(name, value)?),
            "length" => self.length = Some(parse(name, value)?),
            "weight_enumerator" => {
                let coeffs = value
                    .trim_matches(|c| c == '[' || c == ']')
                    .split(',')
                    .map(|t| parse(name, t))
                    .collect::<Result<Vec<u64>, _>>()?;
                self.weight_enumerator = Some(coeffs);
            }
            "canonical_key" => self.canonical_key = Some(value.trim().to_string()),
            "info_only" => self.info_only = parse(name, value)?,
            other => return Err(DbError::UnknownFilter(other.to_string())),
        }
        Ok(())
    }

    pub fn matches(&self, r: &CodeRecord) -> bool {
        fn ok<T: PartialEq>(f: &Option<T>, v: &T) -> bool {
            f.as_ref().is_none_or(|x| x == v)
        }
        ok(&self.n, &r.n)
            && ok(&self.k, &r.k)
            && ok(&self.d, &r.d)
            && ok(&self.index, &r.index)
            && ok(&self.aut_group_size, &r.aut_group_size)
            && ok(&self.is_css, &r.is_css)
            && ok(&self.is_decomposable, &r.is_decomposable)
            && ok(&self.is_degenerate, &r.is_degenerate)
            && ok(&self.is_gf4linear, &r.is_gf4linear)
            && ok(&self.is_even, &r.is_even)
            && ok(&self.length, &r.length)
            && ok(&self.weight_enumerator, &r.weight_enumerator)
            && ok(&self.canonical_key, &r.canonical_key)
    }
}

/// Records of every matching cell in `dir`, ordered by `(n, k, index)`.
pub fn query(dir: &Path, q: &Query) -> Result<Vec<CodeRecord>, DbError> {
    let mut out = Vec::new();
    for (n, k) in list_cells(dir)? {
        if q.n.is_some_and(|x| x != n) || q.k.is_some_and(|x| x != k) {
            continue;
        }
        out.extend(read_level(dir, n, k, !q.info_only)?.into_iter().filter(|r| q.matches(r)));
    }
    Ok(out)
}

/// One row of the distance distribution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistRow {
    pub n: usize,
    pub k: usize,
    pub d: u32,
    pub count: usize,
    pub count_indecomposable: usize,
}

/// Class counts per `(k, d)` for one `n`; every cell `k = 0..=n` must be
/// present.
pub fn distance_distribution(dir: &Path, n: usize) -> Result<Vec<DistRow>, DbError> {
    let mut rows: BTreeMap<(usize, u32), (usize, usize)> = BTreeMap::new();
    for k in 0..=n {
        let path = dir.join(db_file_name(n, k));
        if !path.exists() {
            return Err(DbError::Incomplete { n, path });
        }
        for r in read_level(dir, n, k, false)? {
            let e = rows.entry((k, r.d)).or_default();
            e.0 += 1;
            if !r.is_decomposable {
                e.1 += 1;
            }
        }
    }
    Ok(rows
        .into_iter()
        .map(|((k, d), (count, count_indecomposable))| DistRow { n, k, d, count, count_indecomposable })
        .collect())
}

/// CSV with header `n,k,d,count,count_indecomposable`.
pub fn emit_distributions(dir: &Path, n: usize) -> Result<String, DbError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in distance_distribution(dir, n)? {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| DbError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::enumerate_classes;

    fn record(s: &str) -> CodeRecord {
        let g = StabGroup::parse(s).unwrap();
        let (key, aut_size) = crate::canon::class_key_with_aut(&g).unwrap();
        CodeRecord::from_class(&ClassEntry { key, rep: g, index: 0, aut_size }).unwrap()
    }

    #[test]
    fn five_qubit_record() {
        let r = record("YYZZI;YZYIZ;XIZXZ;XZIZX");
        assert_eq!(r.d, 3);
        assert_eq!(r.weight_enumerator, vec![1, 0, 0, 0, 15, 0]);
        assert!(r.is_gf4linear);
        assert_eq!(r.aut_group_size, BigUint::from(360u32));
        let line = r.to_json_line();
        assert!(line.starts_with(r#"{"n":5,"k":1,"d":3,"index":0,"generators":["YYZZI","#));
        assert!(line.contains(r#""aut_group_size":"360","is_css":false"#));
        assert!(line.ends_with(&format!(r#""canonical_key":"{}"}}"#, r.canonical_key)));
        assert_eq!(CodeRecord::from_json_line(&line).unwrap(), r);
        assert!(r.key_matches().unwrap());
    }

    #[test]
    fn rejects_bad_lines() {
        let r = record("XX;ZZ");
        let line = r.to_json_line();
        assert!(CodeRecord::from_json_line(&line.replace(r#""d":2"#, r#""d":2,"extra":1"#)).is_err());
        assert!(CodeRecord::from_json_line(&line.replace(r#""aut_group_size":"12""#, r#""aut_group_size":12"#)).is_err());
        assert!(CodeRecord::from_json_line(&line.replace(r#""aut_group_size":"12""#, r#""aut_group_size":"-1""#)).is_err());
        let text = format!("{line}\n{{not json\n");
        match parse_level(&text, Path::new("x.jsonl"), true) {
            Err(DbError::Corrupt { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let mut bad = r.clone();
        bad.generators = vec!["XX".into(), "ZX".into()];
        assert!(bad.validate().is_err());
        let mut bad = r.clone();
        bad.weight_enumerator.pop();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn round_trip_and_queries() {
        let dir = tempfile::tempdir().unwrap();
        for n in 1..=3 {
            let e = enumerate_classes(n, 0).unwrap();
            let recs = build_records(&e).unwrap();
            let paths = write_db(dir.path(), n, &recs).unwrap();
            assert_eq!(paths.len(), n + 1);
            for (&k, level) in &recs {
                assert_eq!(&read_db(dir.path(), n, k).unwrap(), level);
                let text = fs::read_to_string(dir.path().join(db_file_name(n, k))).unwrap();
                let rewritten: String = level.iter().map(|r| r.to_json_line() + "\n").collect();
                assert_eq!(text, rewritten);
                assert!(!text.lines().any(|l| l.ends_with(' ')));
            }
        }
        assert_eq!(fs::read_to_string(dir.path().join("codes_n1_k0.jsonl")).unwrap().lines().count(), 1);

        let mut q = Query::default();
        q.set("n", "2").unwrap();
        q.set("d", "9").unwrap();
        assert!(query(dir.path(), &q).unwrap().is_empty());
        let mut q = Query::default();
        q.set("n", "2").unwrap();
        q.set("k", "0").unwrap();
        q.set("d", "2").unwrap();
        assert_eq!(query(dir.path(), &q).unwrap().len(), 1);
        assert!(matches!(q.set("colour", "1"), Err(DbError::UnknownFilter(_))));
        assert!(matches!(q.set("d", "x"), Err(DbError::BadFilterValue { .. })));
        q.set("weight_enumerator", "[1,0,3]").unwrap();
        assert_eq!(query(dir.path(), &q).unwrap().len(), 1);

        let csv = emit_distributions(dir.path(), 2).unwrap();
        assert!(csv.starts_with("n,k,d,count,count_indecomposable\n"));
        assert!(csv.contains("2,0,2,1,1\n"));
        assert!(matches!(emit_distributions(dir.path(), 4), Err(DbError::Incomplete { .. })));
    }

    #[test]
    fn empty_level_still_written() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_level(dir.path(), 3, 1, &[]).unwrap();
        assert_eq!(fs::read_to_string(path).unwrap(), "");
        assert!(read_db(dir.path(), 3, 1).unwrap().is_empty());
        let r = record("XX;ZZ");
        assert!(write_level(dir.path(), 3, 1, std::slice::from_ref(&r)).is_err());
        assert!(write_level(dir.path(), 2, 0, &[r.clone(), r]).is_err());
    }
}
