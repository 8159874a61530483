//! Prefix encodings: compact block summaries answering "block suffix vs pattern prefix" queries.

pub mod hamming;
pub mod lp_large;
pub mod lp_small;
pub mod manhattan;

use crate::config::Symbol;
use crate::error::{Error, Result};
use crate::hashing::PolyHash;

/// One mismatching position of a level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MismatchEntry {
    /// 1-based position inside the block.
    pub index: usize,
    pub block_symbol: Symbol,
    pub pattern_symbol: Symbol,
}

/// Mismatch triples sorted by index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MismatchInfo {
    pub entries: Vec<MismatchEntry>,
}

impl MismatchInfo {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at block position `index`.
    pub fn get(&self, index: usize) -> Option<&MismatchEntry> {
        self.entries
            .binary_search_by_key(&index, |e| e.index)
            .ok()
            .map(|i| &self.entries[i])
    }
}

/// Stored data of one subsampling level.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrefixLevel {
    /// Longest query length whose level distance is at most k.
    pub j_star: usize,
    pub mismatches: MismatchInfo,
}

/// Result of a level search: `estimate = 2^level · X_level` (times any scale).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelEstimate {
    pub level: u32,
    pub estimate: f64,
    /// No level reached the threshold; the estimate comes from the top level.
    pub overflow: bool,
}

/// ⌈3·log₂ x⌉, capped at 60.
pub fn level_count(x: u64) -> u32 {
    if x <= 1 {
        return 0;
    }
    let v = (3.0 * (x as f64).log2() - 1e-9).ceil();
    (v as u32).min(60)
}

/// q-bit hash assigning every key a geometric survival depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubsampleLevels {
    hash: PolyHash,
    max_level: u32,
}

impl SubsampleLevels {
    /// Hash over keys `0..domain` with levels `0..=max_level`.
    pub fn new(seed: u64, domain: u64, max_level: u32) -> Self {
        SubsampleLevels {
            hash: PolyHash::new(seed, domain.max(1), max_level.max(1)),
            max_level,
        }
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn seed(&self) -> u64 {
        self.hash.seed()
    }

    pub fn domain(&self) -> u64 {
        self.hash.domain()
    }

    /// Raw q-bit hash of `key`.
    #[inline]
    pub fn bits(&self, key: u64) -> u64 {
        self.hash.bits(key) & low_bits(self.max_level)
    }

    /// Number of trailing zero bits, i.e. the deepest surviving level.
    #[inline]
    pub fn depth(&self, key: u64) -> u32 {
        let v = self.bits(key);
        if v == 0 {
            self.max_level
        } else {
            v.trailing_zeros().min(self.max_level)
        }
    }

    /// Whether `key` survives level `r`.
    #[inline]
    pub fn survives(&self, key: u64, r: u32) -> bool {
        self.bits(key) & low_bits(r) == 0
    }

    /// Stochastic rounding `⌊(value + (h(key) mod 2^r)) / 2^r⌋`.
    #[inline]
    pub fn scale(&self, value: u64, key: u64, r: u32) -> u64 {
        (value + (self.bits(key) & low_bits(r))) >> r
    }

    pub(crate) fn check_level(&self, r: u32) -> Result<()> {
        if r > self.max_level {
            Err(Error::LevelOutOfRange {
                level: r,
                max: self.max_level,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_key(&self, key: u64) -> Result<()> {
        if key >= self.domain() {
            Err(Error::DomainOverflow {
                value: key,
                domain: self.domain(),
            })
        } else {
            Ok(())
        }
    }
}

#[inline]
pub(crate) fn low_bits(r: u32) -> u64 {
    if r >= 64 {
        !0
    } else {
        (1u64 << r) - 1
    }
}

/// Picks f = min{r : X_r ≤ k} from per-level distances.
pub(crate) fn pick_level(distances: &[u64], k: u64) -> LevelEstimate {
    for (r, &x) in distances.iter().enumerate() {
        if x <= k {
            return LevelEstimate {
                level: r as u32,
                estimate: x as f64 * (r as f64).exp2(),
                overflow: false,
            };
        }
    }
    let top = distances.len() - 1;
    LevelEstimate {
        level: top as u32,
        estimate: distances[top] as f64 * (top as f64).exp2(),
        overflow: true,
    }
}

/// Builds all levels by direct scan. `cost(r, u, a, c)` is the level-r
/// distance contribution of block symbol `a` at block position `u` facing
/// pattern symbol `c`.
pub(crate) fn build_levels<F>(block: &[Symbol], prefix: &[Symbol], k: u64, max_level: u32, cost: F) -> Vec<PrefixLevel>
where
    F: Fn(u32, usize, Symbol, Symbol) -> u64,
{
    let b = block.len();
    let fits = |r: u32, j: usize| {
        let mut x = 0u64;
        for v in 1..=j {
            let u = b - j + v;
            x += cost(r, u, block[u - 1], prefix[v - 1]);
            if x > k {
                return false;
            }
        }
        true
    };
    let mut levels = Vec::new();
    for r in 0..=max_level {
        let j_star = (1..=b).rev().find(|&j| fits(r, j)).unwrap_or(0);
        let entries = (1..=j_star)
            .filter_map(|v| {
                let u = b - j_star + v;
                let (a, c) = (block[u - 1], prefix[v - 1]);
                (cost(r, u, a, c) > 0).then_some(MismatchEntry {
                    index: u,
                    block_symbol: a,
                    pattern_symbol: c,
                })
            })
            .collect();
        levels.push(PrefixLevel {
            j_star,
            mismatches: MismatchInfo { entries },
        });
        if j_star == b && (1..b).all(|j| fits(r, j)) {
            break;
        }
    }
    levels
}

/// Level distance at query length `j`, restored from a level's mismatch info.
pub(crate) fn restored_distance<F>(level: &PrefixLevel, r: u32, b: usize, pattern: &[Symbol], j: usize, cost: &F) -> u64
where
    F: Fn(u32, usize, Symbol, Symbol) -> u64,
{
    let shift = b - level.j_star;
    (1..=j)
        .map(|v| {
            let u = b - j + v;
            let a = match level.mismatches.get(u) {
                Some(e) => e.block_symbol,
                None => pattern[u - shift - 1],
            };
            cost(r, u, a, pattern[v - 1])
        })
        .sum()
}

/// Decodes query length `j` from stored levels; returns 2^f·X_f unscaled.
pub(crate) fn decode_levels<F>(levels: &[PrefixLevel], b: usize, k: u64, pattern: &[Symbol], j: usize, cost: F) -> Result<LevelEstimate>
where
    F: Fn(u32, usize, Symbol, Symbol) -> u64,
{
    if j == 0 || j > b {
        return Err(Error::IndexOutOfRange {
            index: j,
            low: 1,
            high: b,
        });
    }
    if pattern.len() < b {
        return Err(Error::LengthMismatch {
            left: pattern.len(),
            right: b,
        });
    }
    for (r, level) in levels.iter().enumerate() {
        if j > level.j_star {
            continue;
        }
        let x = restored_distance(level, r as u32, b, pattern, j, &cost);
        if x <= k {
            return Ok(LevelEstimate {
                level: r as u32,
                estimate: x as f64 * (r as f64).exp2(),
                overflow: false,
            });
        }
    }
    let top = levels.len() - 1;
    let level = &levels[top];
    let x = if j <= level.j_star {
        restored_distance(level, top as u32, b, pattern, j, &cost)
    } else {
        k + 1
    };
    Ok(LevelEstimate {
        level: top as u32,
        estimate: x as f64 * (top as f64).exp2(),
        overflow: true,
    })
}

/// Machine words held by a level list.
pub(crate) fn level_words(levels: &[PrefixLevel]) -> usize {
    levels.iter().map(|l| 1 + 3 * l.mismatches.len()).sum()
}

/// LEB128 writer.
#[derive(Default)]
pub(crate) struct ByteWriter {
    pub bytes: Vec<u8>,
}

impl ByteWriter {
    pub fn varint(&mut self, mut v: u64) {
        loop {
            let byte = (v & 0x7f) as u8;
            v >>= 7;
            if v == 0 {
                self.bytes.push(byte);
                return;
            }
            self.bytes.push(byte | 0x80);
        }
    }

    pub fn f64(&mut self, v: f64) {
        self.bytes.extend_from_slice(&v.to_le_bytes());
    }

    pub fn levels(&mut self, levels: &[PrefixLevel]) {
        self.varint(levels.len() as u64);
        for l in levels {
            self.varint(l.j_star as u64);
            self.varint(l.mismatches.len() as u64);
            for e in &l.mismatches.entries {
                self.varint(e.index as u64);
                self.varint(e.block_symbol as u64);
                self.varint(e.pattern_symbol as u64);
            }
        }
    }
}

/// LEB128 reader.
pub(crate) struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        ByteReader { bytes, pos: 0 }
    }

    pub fn varint(&mut self) -> Result<u64> {
        let mut v = 0u64;
        let mut shift = 0;
        loop {
            let byte = *self
                .bytes
                .get(self.pos)
                .ok_or_else(|| Error::Malformed("truncated varint".into()))?;
            self.pos += 1;
            if shift >= 64 {
                return Err(Error::Malformed("varint overflow".into()));
            }
            v |= ((byte & 0x7f) as u64) << shift;
            if byte & 0x80 == 0 {
                return Ok(v);
            }
            shift += 7;
        }
    }

    pub fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Malformed("truncated blob".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub fn usize(&mut self) -> Result<usize> {
        Ok(self.varint()? as usize)
    }

    pub fn symbol(&mut self) -> Result<Symbol> {
        u32::try_from(self.varint()?).map_err(|_| Error::Malformed("symbol overflow".into()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        let end = self.pos + 8;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Malformed("truncated float".into()))?;
        self.pos = end;
        Ok(f64::from_le_bytes(chunk.try_into().expect("8 bytes")))
    }

    pub fn levels(&mut self) -> Result<Vec<PrefixLevel>> {
        let count = self.usize()?;
        if count > 64 {
            return Err(Error::Malformed("too many levels".into()));
        }
        (0..count)
            .map(|_| {
                let j_star = self.usize()?;
                let len = self.usize()?;
                let entries = (0..len)
                    .map(|_| {
                        Ok(MismatchEntry {
                            index: self.usize()?,
                            block_symbol: self.symbol()?,
                            pattern_symbol: self.symbol()?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(PrefixLevel {
                    j_star,
                    mismatches: MismatchInfo { entries },
                })
            })
            .collect()
    }

    pub fn finish(&self) -> Result<()> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(Error::Malformed("trailing bytes".into()))
        }
    }
}
