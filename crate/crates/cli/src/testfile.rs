//! Header-free test files of little-endian binary64 values.
//!
//! A record holds [`S`] matrices as consecutive [`S`]-vectors: `a11, a21,
//! a12, a22` for real files, and `Re a11, Im a11, Re a21, Im a21, Re a12,
//! Im a12, Re a22, Im a22` for complex files.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use batsvd2::batch_layout::{Batch2x2, FieldKind};
use batsvd2::lane_math::S;
use batsvd2::svd2_core::Mat2;
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::CliError;

/// Where random bit patterns come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// ChaCha8 seeded through `seed_from_u64`.
    Seed(u64),
    /// `/dev/urandom`.
    Entropy,
}

/// Bytes in one record of `field`.
pub fn record_bytes(field: FieldKind) -> usize {
    4 * field.components() * S * 8
}

enum Bits {
    Prng(Box<ChaCha8Rng>),
    Os(BufReader<File>),
}

impl Bits {
    fn next(&mut self) -> io::Result<u64> {
        match self {
            Bits::Prng(r) => Ok(r.next_u64()),
            Bits::Os(f) => {
                let mut b = [0u8; 8];
                f.read_exact(&mut b)?;
                Ok(u64::from_le_bytes(b))
            }
        }
    }

    /// A uniformly random bit pattern, redrawn until finite.
    fn finite(&mut self) -> io::Result<f64> {
        loop {
            let x = f64::from_bits(self.next()?);
            if x.is_finite() {
                return Ok(x);
            }
        }
    }
}

/// Writes `count` random matrices to `out`; `count` must be a positive
/// multiple of [`S`].
pub fn generate(count: usize, field: FieldKind, source: Source, out: &Path) -> Result<(), CliError> {
    if count == 0 || !count.is_multiple_of(S) {
        return Err(CliError::Usage(format!("--n must be a positive multiple of {S}, got {count}")));
    }
    let mut bits = match source {
        Source::Seed(seed) => Bits::Prng(Box::new(ChaCha8Rng::seed_from_u64(seed))),
        Source::Entropy => Bits::Os(BufReader::new(File::open("/dev/urandom")?)),
    };
    let mut w = BufWriter::new(File::create(out)?);
    for _ in 0..count * 4 * field.components() {
        w.write_all(&bits.finite()?.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Streams a test file as batches of at most `batch_size` matrices.
pub struct BatchReader {
    r: BufReader<File>,
    field: FieldKind,
    batch_size: usize,
    records_left: u64,
    pending_real: Vec<Mat2<f64>>,
    pending_complex: Vec<Mat2<Complex64>>,
    record: u64,
}

impl BatchReader {
    pub fn open(path: &Path, field: FieldKind, batch_size: usize) -> Result<Self, CliError> {
        if batch_size == 0 {
            return Err(CliError::Usage("--batch-size must be positive".into()));
        }
        let f = File::open(path)?;
        let len = f.metadata()?.len();
        let rec = record_bytes(field) as u64;
        if len % rec != 0 {
            return Err(CliError::Data(format!(
                "{}: length {len} is not a multiple of the {} record size {rec}",
                path.display(),
                field.name()
            )));
        }
        Ok(BatchReader {
            r: BufReader::with_capacity(1 << 20, f),
            field,
            batch_size,
            records_left: len / rec,
            pending_real: Vec::new(),
            pending_complex: Vec::new(),
            record: 0,
        })
    }

    /// Matrices in the whole file.
    pub fn total(&self) -> u64 {
        (self.records_left + self.record) * S as u64
    }

    fn pending(&self) -> usize {
        self.pending_real.len() + self.pending_complex.len()
    }

    fn read_record(&mut self) -> Result<(), CliError> {
        let mut buf = vec![0u8; record_bytes(self.field)];
        self.r.read_exact(&mut buf)?;
        let vals: Vec<f64> = buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        if let Some(i) = vals.iter().position(|x| !x.is_finite()) {
            let offset = (self.record * record_bytes(self.field) as u64) + 8 * i as u64;
            return Err(CliError::Data(format!("non-finite value at byte offset {offset}")));
        }
        let v = |c: usize, l: usize| vals[c * S + l];
        for l in 0..S {
            match self.field {
                FieldKind::Real => self.pending_real.push(Mat2::new(v(0, l), v(1, l), v(2, l), v(3, l))),
                FieldKind::Complex => {
                    let z = |j: usize| Complex64::new(v(2 * j, l), v(2 * j + 1, l));
                    self.pending_complex.push(Mat2::new(z(0), z(1), z(2), z(3)));
                }
            }
        }
        self.record += 1;
        self.records_left -= 1;
        Ok(())
    }

    /// The next batch, or `None` at the end of the file.
    pub fn next_batch(&mut self) -> Result<Option<Batch2x2>, CliError> {
        while self.pending() < self.batch_size && self.records_left > 0 {
            self.read_record()?;
        }
        if self.pending() == 0 {
            return Ok(None);
        }
        let take = self.pending().min(self.batch_size);
        let batch = match self.field {
            FieldKind::Real => {
                let rest = self.pending_real.split_off(take);
                Batch2x2::pack_real(&std::mem::replace(&mut self.pending_real, rest))
            }
            FieldKind::Complex => {
                let rest = self.pending_complex.split_off(take);
                Batch2x2::pack_complex(&std::mem::replace(&mut self.pending_complex, rest))
            }
        };
        batch.map(Some).map_err(|e| CliError::Data(e.to_string()))
    }
}
