//! Symbol files.
//!
//! A file starts with a magic line, optionally followed by `sigma=N`:
//!
//! ```text
//! %STREAMDIST raw sigma=4
//! ```
//!
//! In `raw` files every byte after the newline is one symbol (`byte + 1`, so σ ≤ 256).
//! In `dec` files every non-empty line after the header holds one decimal symbol.
//! Without a header the body is read as `dec` unless a format is forced.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use streamdist::Symbol;

use crate::error::{CliError, CliResult};

pub const MAGIC: &str = "%STREAMDIST";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Raw,
    Dec,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "raw" => Ok(Format::Raw),
            "dec" => Ok(Format::Dec),
            other => Err(format!("unknown format {other:?} (expected raw or dec)")),
        }
    }
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Raw => "raw",
            Format::Dec => "dec",
        }
    }
}

/// Parsed header line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub format: Format,
    pub sigma: Option<u32>,
}

fn parse_header(line: &str, path: &Path) -> CliResult<Option<Header>> {
    let line = line.trim_end_matches(['\n', '\r']);
    let Some(rest) = line.strip_prefix(MAGIC) else {
        return Ok(None);
    };
    let mut words = rest.split_whitespace();
    let format = words
        .next()
        .ok_or_else(|| CliError::parse(path, 1, "header lacks a format"))?
        .parse::<Format>()
        .map_err(|e| CliError::parse(path, 1, e))?;
    let mut sigma = None;
    for w in words {
        match w.strip_prefix("sigma=") {
            Some(v) => {
                let v = v
                    .parse::<u32>()
                    .map_err(|_| CliError::parse(path, 1, format!("bad sigma {v:?}")))?;
                sigma = Some(v);
            }
            None => return Err(CliError::parse(path, 1, format!("unknown header field {w:?}"))),
        }
    }
    Ok(Some(Header { format, sigma }))
}

/// Streaming symbol source.
pub struct SymbolReader {
    path: PathBuf,
    inner: Box<dyn BufRead>,
    format: Format,
    pub header: Option<Header>,
    line: usize,
    buf: String,
}

impl SymbolReader {
    pub fn open(path: &Path, forced: Option<Format>) -> CliResult<Self> {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        Self::from_reader(path, Box::new(BufReader::new(file)), forced)
    }

    pub fn from_reader(path: &Path, mut inner: Box<dyn BufRead>, forced: Option<Format>) -> CliResult<Self> {
        let mut first = Vec::new();
        let starts_with_magic = inner.fill_buf().map_err(|e| CliError::io(path, e))?.starts_with(MAGIC.as_bytes());
        let (header, line) = if starts_with_magic {
            inner.read_until(b'\n', &mut first).map_err(|e| CliError::io(path, e))?;
            let text = String::from_utf8(first).map_err(|_| CliError::parse(path, 1, "header is not UTF-8"))?;
            (parse_header(&text, path)?, 1)
        } else {
            (None, 0)
        };
        let format = forced.or(header.map(|h| h.format)).unwrap_or(Format::Dec);
        Ok(SymbolReader {
            path: path.to_path_buf(),
            inner,
            format,
            header,
            line,
            buf: String::new(),
        })
    }

    pub fn format(&self) -> Format {
        self.format
    }

    fn next_raw(&mut self) -> CliResult<Option<Symbol>> {
        let mut byte = [0u8; 1];
        match self.inner.read(&mut byte) {
            Ok(0) => Ok(None),
            Ok(_) => {
                self.line += 1;
                Ok(Some(byte[0] as Symbol + 1))
            }
            Err(e) => Err(CliError::io(&self.path, e)),
        }
    }

    fn next_dec(&mut self) -> CliResult<Option<Symbol>> {
        loop {
            self.buf.clear();
            let read = self
                .inner
                .read_line(&mut self.buf)
                .map_err(|e| CliError::io(&self.path, e))?;
            if read == 0 {
                return Ok(None);
            }
            self.line += 1;
            let t = self.buf.trim();
            if t.is_empty() {
                continue;
            }
            return t
                .parse::<Symbol>()
                .map(Some)
                .map_err(|_| CliError::parse(&self.path, self.line, format!("not a symbol: {t:?}")));
        }
    }

    /// Next symbol; `Ok(None)` at end of input.
    pub fn next_symbol(&mut self) -> CliResult<Option<Symbol>> {
        match self.format {
            Format::Raw => self.next_raw(),
            Format::Dec => self.next_dec(),
        }
    }

    /// Line (dec) or byte (raw) number of the last symbol read.
    pub fn position(&self) -> usize {
        self.line
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn read_all(mut self) -> CliResult<(Vec<Symbol>, Option<Header>)> {
        let mut out = Vec::new();
        while let Some(s) = self.next_symbol()? {
            out.push(s);
        }
        Ok((out, self.header))
    }
}

/// Reads a whole symbol file.
pub fn read_word(path: &Path, forced: Option<Format>) -> CliResult<(Vec<Symbol>, Option<Header>)> {
    SymbolReader::open(path, forced)?.read_all()
}

/// Serializes a word with a header line.
pub fn encode_word(word: &[Symbol], format: Format, sigma: u32) -> CliResult<Vec<u8>> {
    let mut out = format!("{MAGIC} {} sigma={sigma}\n", format.name()).into_bytes();
    match format {
        Format::Raw => {
            if sigma > 256 {
                return Err(CliError::Usage(format!("raw files hold σ ≤ 256, got {sigma}")));
            }
            out.extend(word.iter().map(|&s| (s - 1) as u8));
        }
        Format::Dec => {
            for &s in word {
                writeln!(out, "{s}").expect("writing to a Vec");
            }
        }
    }
    Ok(out)
}

pub fn write_word(path: &Path, word: &[Symbol], format: Format, sigma: u32) -> CliResult<()> {
    let bytes = encode_word(word, format, sigma)?;
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reader(bytes: &[u8], forced: Option<Format>) -> SymbolReader {
        let owned = bytes.to_vec();
        SymbolReader::from_reader(Path::new("mem"), Box::new(std::io::Cursor::new(owned)), forced).unwrap()
    }

    #[test]
    fn round_trip_both_formats() {
        let word = vec![1, 4, 2, 2, 3];
        for format in [Format::Raw, Format::Dec] {
            let bytes = encode_word(&word, format, 4).unwrap();
            let (got, header) = reader(&bytes, None).read_all().unwrap();
            assert_eq!(got, word);
            assert_eq!(header, Some(Header { format, sigma: Some(4) }));
        }
    }

    #[test]
    fn headerless_defaults_to_decimal() {
        let (got, header) = reader(b"3\n\n1\n", None).read_all().unwrap();
        assert_eq!(got, vec![3, 1]);
        assert!(header.is_none());
    }

    #[test]
    fn forced_raw_without_header() {
        let (got, _) = reader(&[0, 255], Some(Format::Raw)).read_all().unwrap();
        assert_eq!(got, vec![1, 256]);
    }

    #[test]
    fn parse_error_reports_line() {
        let err = reader(b"%STREAMDIST dec\n1\nx\n", None).read_all().unwrap_err();
        match err {
            CliError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert_eq!(CliError::parse("f", 1, "m").exit_code(), 3);
    }

    #[test]
    fn bad_header_is_a_parse_error() {
        let err = SymbolReader::from_reader(
            Path::new("mem"),
            Box::new(std::io::Cursor::new(b"%STREAMDIST hex\n".to_vec())),
            None,
        )
        .err()
        .unwrap();
        assert_eq!(err.exit_code(), 3);
    }
}
