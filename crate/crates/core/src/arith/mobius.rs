//! Segmented Mobius sieve and the on-disk table format.
//!
//! File layout: the magic bytes `MOBI`, a little-endian `u32` version, the
//! limit `N` as a little-endian `u64`, then `N` signed bytes `mu(1..=N)`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::ArithError;

/// Largest limit accepted by [`mobius_sieve`]; one byte per entry.
pub const DEFAULT_SIEVE_CAP: u64 = 2_000_000_000;

const MAGIC: &[u8; 4] = b"MOBI";
const VERSION: u32 = 1;
const SEGMENT: u64 = 1 << 18;

/// `mu(n)` for `1 <= n <= N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusTable {
    values: Vec<i8>,
}

impl MobiusTable {
    pub fn limit(&self) -> u64 {
        self.values.len() as u64
    }

    /// `mu(n)`; panics outside `1..=N`.
    #[inline]
    pub fn mu(&self, n: u64) -> i8 {
        self.values[(n - 1) as usize]
    }

    pub fn get(&self, n: u64) -> Option<i8> {
        if n == 0 {
            return None;
        }
        self.values.get((n - 1) as usize).copied()
    }

    /// The entries `mu(1), ..., mu(N)`.
    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), ArithError> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&self.limit().to_le_bytes())?;
        let bytes: Vec<u8> = self.values.iter().map(|&v| v as u8).collect();
        w.write_all(&bytes)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, ArithError> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[..4] != MAGIC {
            return Err(ArithError::Format("bad magic".into()));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
        if version != VERSION {
            return Err(ArithError::Format(format!("unsupported version {version}")));
        }
        let n = u64::from_le_bytes(header[8..16].try_into().unwrap());
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() as u64 != n {
            return Err(ArithError::Format(format!(
                "header declares {n} entries, found {}",
                bytes.len()
            )));
        }
        let values: Vec<i8> = bytes.into_iter().map(|b| b as i8).collect();
        if let Some(pos) = values.iter().position(|v| !(-1..=1).contains(v)) {
            return Err(ArithError::Format(format!(
                "entry {} is not in {{-1, 0, 1}}",
                pos + 1
            )));
        }
        Ok(MobiusTable { values })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ArithError> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ArithError> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

/// Sieves `mu` up to `n` with the default cap.
pub fn mobius_sieve(n: u64) -> Result<MobiusTable, ArithError> {
    mobius_sieve_with_cap(n, DEFAULT_SIEVE_CAP)
}

pub fn mobius_sieve_with_cap(n: u64, cap: u64) -> Result<MobiusTable, ArithError> {
    if n == 0 {
        return Err(ArithError::EmptySieve);
    }
    if n > cap {
        return Err(ArithError::SieveCapacity { requested: n, cap });
    }
    let primes = small_primes(n.isqrt());
    let mut values = vec![0i8; n as usize];
    // prod[i] is the product of the small primes dividing lo + i
    let mut prod = vec![0u64; SEGMENT as usize];
    let mut lo = 1u64;
    while lo <= n {
        let hi = (lo + SEGMENT - 1).min(n);
        let len = (hi - lo + 1) as usize;
        let seg = &mut values[(lo - 1) as usize..hi as usize];
        seg.fill(1);
        prod[..len].fill(1);
        for &p in &primes {
            if p * p > hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                let i = (m - lo) as usize;
                seg[i] = -seg[i];
                prod[i] *= p;
                m += p;
            }
            let pp = p * p;
            let mut m = lo.div_ceil(pp) * pp;
            while m <= hi {
                seg[(m - lo) as usize] = 0;
                m += pp;
            }
        }
        for (i, v) in seg.iter_mut().enumerate() {
            // one prime factor above sqrt(n) remains
            if *v != 0 && prod[i] != lo + i as u64 {
                *v = -*v;
            }
        }
        lo = hi + 1;
    }
    Ok(MobiusTable { values })
}

fn small_primes(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// `M(n) = mu(1) + ... + mu(n)`.
pub fn mertens(table: &MobiusTable, n: u64) -> Result<i64, ArithError> {
    if n > table.limit() {
        return Err(ArithError::OutOfRange {
            n,
            limit: table.limit(),
        });
    }
    Ok(table.values[..n as usize].iter().map(|&v| v as i64).sum())
}
