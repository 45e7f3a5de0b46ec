//! Binary cache of `(n, a_n)` pairs.
//!
//! Layout: the 8 magic bytes `PYRSEQ1\n`, a little-endian `u64` record
//! count, then per record two little-endian `u64`s `n` and `a_n`. Only
//! indices `n < 2^42` are representable, which keeps `a_n < 2^64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exact::{self, ATable, MemoryBudget, SequenceRecord, FAST_LIMIT};

pub const MAGIC: &[u8; 8] = b"PYRSEQ1\n";
const HEADER_LEN: u64 = 16;
const RECORD_LEN: u64 = 16;

/// One cached term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CachedTerm {
    pub n: u64,
    pub a: u64,
}

impl TryFrom<&SequenceRecord> for CachedTerm {
    type Error = Error;

    fn try_from(rec: &SequenceRecord) -> Result<Self> {
        let a = rec
            .a
            .to_u64()
            .ok_or_else(|| Error::param(format!("a_{} does not fit in 64 bits", rec.n)))?;
        Ok(CachedTerm { n: rec.n, a })
    }
}

pub fn write_terms<W: Write>(mut out: W, terms: &[CachedTerm]) -> Result<()> {
    if let Some(bad) = terms.iter().find(|t| t.n >= FAST_LIMIT) {
        return Err(Error::param(format!(
            "index n = {} is outside the cacheable range n < 2^42",
            bad.n
        )));
    }
    out.write_all(MAGIC)?;
    out.write_all(&(terms.len() as u64).to_le_bytes())?;
    for t in terms {
        out.write_all(&t.n.to_le_bytes())?;
        out.write_all(&t.a.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_terms<R: Read>(mut input: R) -> Result<Vec<CachedTerm>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() < 8 || &bytes[..8] != MAGIC {
        return Err(Error::format(0, "missing PYRSEQ1 magic"));
    }
    if bytes.len() < HEADER_LEN as usize {
        return Err(Error::format(bytes.len() as u64, "truncated header"));
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let expected = count
        .checked_mul(RECORD_LEN)
        .and_then(|b| b.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::format(8, format!("record count {count} is implausible")))?;
    let actual = bytes.len() as u64;
    if actual < expected {
        let whole = (actual - HEADER_LEN) / RECORD_LEN;
        return Err(Error::format(
            HEADER_LEN + whole * RECORD_LEN,
            format!("truncated: header declares {count} records, file holds {whole}"),
        ));
    }
    if actual > expected {
        return Err(Error::format(expected, "trailing bytes after the last record"));
    }
    let mut terms = Vec::with_capacity(count as usize);
    for (i, rec) in bytes[HEADER_LEN as usize..].chunks_exact(RECORD_LEN as usize).enumerate() {
        let n = u64::from_le_bytes(rec[..8].try_into().expect("8 bytes"));
        let a = u64::from_le_bytes(rec[8..].try_into().expect("8 bytes"));
        if n >= FAST_LIMIT {
            return Err(Error::format(
                HEADER_LEN + i as u64 * RECORD_LEN,
                format!("index n = {n} is outside the cacheable range"),
            ));
        }
        terms.push(CachedTerm { n, a });
    }
    Ok(terms)
}

pub fn cache_write(path: &Path, terms: &[CachedTerm]) -> Result<()> {
    write_terms(BufWriter::new(File::create(path)?), terms)
}

pub fn cache_write_records(path: &Path, records: &[SequenceRecord]) -> Result<()> {
    let terms = records.iter().map(CachedTerm::try_from).collect::<Result<Vec<_>>>()?;
    cache_write(path, &terms)
}

pub fn cache_read(path: &Path) -> Result<Vec<CachedTerm>> {
    read_terms(BufReader::new(File::open(path)?))
}

/// Every this many entries a cached term is recomputed before use.
const SPOT_CHECK_STRIDE: usize = 997;

/// Turns cached terms into a table for `0..=x`, or `None` when they do not
/// cover that range contiguously. Spot-checked entries must agree with a
/// fresh computation.
pub fn table_from_terms(terms: &[CachedTerm], x: u64, budget: MemoryBudget) -> Result<Option<ATable>> {
    let skip = match terms.first() {
        Some(t) if t.n == 0 => 0,
        Some(t) if t.n == 1 => 1,
        _ => return Ok(None),
    };
    let needed = (x + 1 - skip) as usize;
    if terms.len() < needed || terms[..needed].iter().enumerate().any(|(i, t)| t.n != i as u64 + skip) {
        return Ok(None);
    }
    budget.check("a_n table", 8 * (x + 1))?;
    for (i, t) in terms[..needed].iter().enumerate().step_by(SPOT_CHECK_STRIDE) {
        if exact::a_u64(t.n) != Some(t.a) {
            return Err(Error::format(
                HEADER_LEN + i as u64 * RECORD_LEN,
                format!("cached a_{} = {} disagrees with a fresh computation", t.n, t.a),
            ));
        }
    }
    let mut values = Vec::with_capacity(x as usize + 1);
    if skip == 1 {
        values.push(0);
    }
    values.extend(terms[..needed].iter().map(|t| t.a));
    Ok(Some(ATable::from_values(values)))
}

/// Loads `a_0..=a_x` from `path` when it exists and covers the range,
/// otherwise computes the table.
pub fn load_or_build(path: Option<&Path>, x: u64, budget: MemoryBudget) -> Result<ATable> {
    if let Some(path) = path.filter(|p| p.exists()) {
        if let Some(table) = table_from_terms(&cache_read(path)?, x, budget)? {
            return Ok(table);
        }
    }
    ATable::build(x, budget)
}
