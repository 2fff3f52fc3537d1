//! Synthetic uplink channels and link-budget arithmetic.
//!
//! Channels are i.i.d. Rayleigh with unit average power per entry. With full
//! path-loss compensation every user arrives at the same target power, so the
//! operating SNR is carried entirely by the normalised noise power `n0`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Thermal noise density at room temperature, dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

const DUMP_MAGIC: &[u8; 8] = b"SSUSCHN1";

/// `M × U` complex channel matrix; column `u` is user `u`'s channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    antennas: usize,
    users: usize,
    // column-major
    entries: Vec<Complex64>,
}

impl ChannelMatrix {
    pub fn from_columns(columns: Vec<Vec<Complex64>>) -> Result<Self> {
        let users = columns.len();
        if users == 0 {
            return Err(Error::InvalidArgument(
                "channel needs at least one user".into(),
            ));
        }
        let antennas = columns[0].len();
        if antennas == 0 {
            return Err(Error::InvalidArgument(
                "channel needs at least one antenna".into(),
            ));
        }
        let mut entries = Vec::with_capacity(antennas * users);
        for col in columns {
            if col.len() != antennas {
                return Err(Error::DimensionMismatch {
                    expected: antennas,
                    actual: col.len(),
                });
            }
            if col.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
                return Err(Error::ZeroNorm);
            }
            entries.extend(col);
        }
        Ok(Self {
            antennas,
            users,
            entries,
        })
    }

    /// Convenience constructor for real-valued test channels.
    pub fn from_real_columns(columns: &[&[f64]]) -> Result<Self> {
        Self::from_columns(
            columns
                .iter()
                .map(|c| c.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn identity(m: usize) -> Self {
        let cols = (0..m)
            .map(|i| {
                let mut c = vec![Complex64::new(0.0, 0.0); m];
                c[i] = Complex64::new(1.0, 0.0);
                c
            })
            .collect();
        Self::from_columns(cols).expect("identity is well formed")
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn column(&self, u: usize) -> &[Complex64] {
        &self.entries[u * self.antennas..(u + 1) * self.antennas]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[Complex64]> {
        self.entries.chunks_exact(self.antennas)
    }

    /// Every entry multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * c).collect(),
            ..self.clone()
        }
    }

    /// FNV-1a over the raw entry bits; identifies a realisation in reports.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        eat(self.antennas as u64);
        eat(self.users as u64);
        for z in &self.entries {
            eat(z.re.to_bits());
            eat(z.im.to_bits());
        }
        h
    }

    /// Writes the binary fixture format: an 8-byte magic, then `M`, `U` and
    /// the generating seed as little-endian `u64`, then the columns in order
    /// as interleaved little-endian `f64` real/imaginary pairs.
    pub fn write_to<W: Write>(&self, mut w: W, seed: u64) -> std::io::Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&(self.antennas as u64).to_le_bytes())?;
        w.write_all(&(self.users as u64).to_le_bytes())?;
        w.write_all(&seed.to_le_bytes())?;
        for z in &self.entries {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        w.flush()
    }

    /// Reads the format produced by [`ChannelMatrix::write_to`], returning the
    /// matrix and its recorded seed.
    pub fn read_from<R: Read>(mut r: R) -> Result<(Self, u64)> {
        let io = |e: std::io::Error| Error::Format(format!("truncated channel file: {e}"));
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != DUMP_MAGIC {
            return Err(Error::Format("bad channel file magic".into()));
        }
        let mut word = [0u8; 8];
        let mut next = |r: &mut R| -> Result<u64> {
            r.read_exact(&mut word).map_err(io)?;
            Ok(u64::from_le_bytes(word))
        };
        let antennas = next(&mut r)? as usize;
        let users = next(&mut r)? as usize;
        let seed = next(&mut r)?;
        if antennas == 0 || users == 0 {
            return Err(Error::Format(format!("invalid shape {antennas}x{users}")));
        }
        let mut columns = Vec::with_capacity(users);
        for _ in 0..users {
            let mut col = Vec::with_capacity(antennas);
            for _ in 0..antennas {
                let re = f64::from_bits(next(&mut r)?);
                let im = f64::from_bits(next(&mut r)?);
                col.push(Complex64::new(re, im));
            }
            columns.push(col);
        }
        Ok((Self::from_columns(columns)?, seed))
    }

    pub fn save(&self, path: &Path, seed: u64) -> Result<()> {
        let wrap = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let f = File::create(path).map_err(wrap)?;
        self.write_to(BufWriter::new(f), seed).map_err(wrap)
    }

    pub fn load(path: &Path) -> Result<(Self, u64)> {
        let f = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_from(BufReader::new(f))
    }
}

/// Draws an `M × U` matrix of i.i.d. circularly-symmetric complex Gaussian
/// entries with unit variance, so `E[‖h_u‖²] = M`.
pub fn generate_iid_rayleigh<R: Rng + ?Sized>(
    antennas: usize,
    users: usize,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    if antennas == 0 || users == 0 {
        return Err(Error::InvalidArgument(format!(
            "channel shape must be at least 1x1, got {antennas}x{users}"
        )));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut columns = Vec::with_capacity(users);
    while columns.len() < users {
        let col: Vec<Complex64> = (0..antennas)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * scale, im * scale)
            })
            .collect();
        if col.iter().any(|z| z.norm_sqr() > 0.0) {
            columns.push(col);
        }
    }
    ChannelMatrix::from_columns(columns)
}

/// Received-power budget for a power-controlled uplink user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub p0_dbm: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
}

impl LinkBudget {
    pub fn new(p0_dbm: f64, bandwidth_hz: f64, noise_figure_db: f64) -> Result<Self> {
        if !bandwidth_hz.is_finite() || bandwidth_hz <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "bandwidth must be positive, got {bandwidth_hz}"
            )));
        }
        Ok(Self {
            p0_dbm,
            bandwidth_hz,
            noise_figure_db,
        })
    }

    /// Thermal noise plus receiver noise figure over the band, in dBm.
    pub fn noise_dbm(&self) -> f64 {
        THERMAL_NOISE_DBM_PER_HZ + 10.0 * self.bandwidth_hz.log10() + self.noise_figure_db
    }

    pub fn snr_db(&self) -> f64 {
        self.p0_dbm - self.noise_dbm()
    }

    /// Noise power relative to the target received power. Used as `N0` with
    /// unit-average-power channels.
    pub fn noise_power(&self) -> f64 {
        10f64.powf((self.noise_dbm() - self.p0_dbm) / 10.0)
    }
}
