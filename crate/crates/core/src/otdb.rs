//! Reader for order-type database files.
//!
//! A file for `n` points is a flat sequence of fixed-size records, one
//! realizing point set per order type, each a run of `n` `(x, y)` pairs of
//! unsigned coordinates: one byte per coordinate for `n <= 8`, two bytes for
//! `n >= 9`. The byte order of two-byte files is not recorded in the file;
//! it is detected once per file by checking which reading puts the leading
//! records in general position.

use std::fs::File;
use std::io::{self, BufReader, Read};
use std::path::{Path, PathBuf};

use log::debug;
use serde::Serialize;

use crate::geometry::{Configuration, GeometryError};

/// Point counts with a defined record layout.
pub const SUPPORTED_N: std::ops::RangeInclusive<usize> = 3..=10;

/// Records inspected while both byte orders remain plausible.
const BYTE_ORDER_PROBE: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum OtdbError {
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("unsupported point count {0}; database files exist for n in 3..=10")]
    UnsupportedN(usize),
    #[error("{path}: length {len} is not a multiple of the {record_size}-byte record size")]
    Truncated {
        path: PathBuf,
        len: u64,
        record_size: usize,
    },
    #[error("record {index}: {source}")]
    GeneralPosition { index: u64, source: GeometryError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoordWidth {
    U8,
    U16,
}

impl CoordWidth {
    pub fn for_n(n: usize) -> Self {
        if n <= 8 {
            CoordWidth::U8
        } else {
            CoordWidth::U16
        }
    }

    pub fn bytes(self) -> usize {
        match self {
            CoordWidth::U8 => 1,
            CoordWidth::U16 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ByteOrder {
    Little,
    Big,
}

/// Per-file layout, fixed when the file is opened.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatabaseInfo {
    pub path: PathBuf,
    pub n: usize,
    pub width: CoordWidth,
    /// `None` for one-byte coordinates.
    pub byte_order: Option<ByteOrder>,
    pub record_size: usize,
    pub records: u64,
}

/// One realizing point set; `index` is its 0-based position in the file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderTypeRecord {
    pub index: u64,
    pub config: Configuration,
}

/// Conventional file name of the database for `n` points, e.g.
/// `otypes07.b08` or `otypes09.b16`.
pub fn database_file_name(n: usize) -> String {
    let bits = CoordWidth::for_n(n).bytes() * 8;
    format!("otypes{n:02}.b{bits:02}")
}

/// Streaming reader over the records of one file.
pub struct DatabaseReader {
    info: DatabaseInfo,
    source: BufReader<File>,
    next_index: u64,
    buf: Vec<u8>,
}

/// Opens a database file for `n` points and detects its layout.
pub fn read_database(path: impl AsRef<Path>, n: usize) -> Result<DatabaseReader, OtdbError> {
    let path = path.as_ref().to_path_buf();
    if !SUPPORTED_N.contains(&n) {
        return Err(OtdbError::UnsupportedN(n));
    }
    let io_err = |source| OtdbError::Io {
        path: path.clone(),
        source,
    };
    let width = CoordWidth::for_n(n);
    let record_size = 2 * n * width.bytes();
    let len = std::fs::metadata(&path).map_err(io_err)?.len();
    if len % record_size as u64 != 0 {
        return Err(OtdbError::Truncated {
            path,
            len,
            record_size,
        });
    }
    let records = len / record_size as u64;
    let mut source = BufReader::new(File::open(&path).map_err(io_err)?);

    let byte_order = match width {
        CoordWidth::U8 => None,
        CoordWidth::U16 => {
            let probe = records.min(BYTE_ORDER_PROBE as u64) as usize;
            let mut head = vec![0u8; probe * record_size];
            source.read_exact(&mut head).map_err(io_err)?;
            let order = detect_byte_order(&head, n);
            debug!("{}: detected {order:?}-endian coordinates", path.display());
            // reopen so iteration starts at record 0
            source = BufReader::new(File::open(&path).map_err(io_err)?);
            Some(order)
        }
    };

    Ok(DatabaseReader {
        info: DatabaseInfo {
            path,
            n,
            width,
            byte_order,
            record_size,
            records,
        },
        source,
        next_index: 0,
        buf: vec![0; record_size],
    })
}

/// Picks the byte order under which the leading records are in general
/// position. Little-endian wins when both (or neither) readings are.
fn detect_byte_order(head: &[u8], n: usize) -> ByteOrder {
    let record_size = 4 * n;
    let mut little_ok = true;
    let mut big_ok = true;
    for record in head.chunks_exact(record_size) {
        little_ok &= decode(record, n, CoordWidth::U16, Some(ByteOrder::Little)).is_ok();
        big_ok &= decode(record, n, CoordWidth::U16, Some(ByteOrder::Big)).is_ok();
        if little_ok != big_ok {
            break;
        }
    }
    if big_ok && !little_ok {
        ByteOrder::Big
    } else {
        ByteOrder::Little
    }
}

fn decode(
    record: &[u8],
    n: usize,
    width: CoordWidth,
    order: Option<ByteOrder>,
) -> Result<Configuration, GeometryError> {
    let coord = |pos: usize| -> i64 {
        match (width, order) {
            (CoordWidth::U8, _) => record[pos] as i64,
            (CoordWidth::U16, Some(ByteOrder::Big)) => {
                u16::from_be_bytes([record[2 * pos], record[2 * pos + 1]]) as i64
            }
            (CoordWidth::U16, _) => {
                u16::from_le_bytes([record[2 * pos], record[2 * pos + 1]]) as i64
            }
        }
    };
    Configuration::from_coords((0..n).map(|i| (coord(2 * i), coord(2 * i + 1))))
}

impl DatabaseReader {
    pub fn info(&self) -> &DatabaseInfo {
        &self.info
    }
}

impl Iterator for DatabaseReader {
    type Item = Result<OrderTypeRecord, OtdbError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next_index >= self.info.records {
            return None;
        }
        let index = self.next_index;
        self.next_index += 1;
        if let Err(source) = self.source.read_exact(&mut self.buf) {
            // the file shrank after it was opened
            self.next_index = self.info.records;
            return Some(Err(OtdbError::Io {
                path: self.info.path.clone(),
                source,
            }));
        }
        Some(
            decode(
                &self.buf,
                self.info.n,
                self.info.width,
                self.info.byte_order,
            )
            .map(|config| OrderTypeRecord { index, config })
            .map_err(|source| OtdbError::GeneralPosition { index, source }),
        )
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.info.records - self.next_index) as usize;
        (left, Some(left))
    }
}
