//! Binary checkpoints, all little-endian:
//!
//! ```text
//! "HVMHD\x01"  u32 version  u32 n ×3  f64 epsilon  f64 t
//! 6 × (n·n·(n/2+1)) × (f64 re, f64 im)      U₁ U₂ U₃ B₁ B₂ B₃ half spectra
//! u64 count  count × (3 f64 x)  count × (3 f64 v)  count × f64 w
//! f64 dealias  6 f64 constants (q_h m_h kappa eta mu0 rho_bar)
//! u64 step  f64 dt  f64 cumulative dissipation  f64 initial energy
//! 3 f64 initial momentum  f64 initial mass
//! 32-byte SHA-256 of everything above
//! ```

use std::path::Path;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::coupled::{PhysicalConstants, PlasmaState};
use crate::mollifier::MollifierSpec;
use crate::spectral::{Grid, ScalarField, VectorField};
use crate::vlasov::ParticleEnsemble;

pub const MAGIC: &[u8; 6] = b"HVMHD\x01";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("not a checkpoint (bad magic bytes)")]
    BadMagic,
    #[error("unsupported checkpoint version {0} (expected {VERSION})")]
    Version(u32),
    #[error("checkpoint truncated")]
    Truncated,
    #[error("checkpoint integrity check failed (digest mismatch)")]
    Integrity,
    #[error("invalid checkpoint contents: {0}")]
    Invalid(String),
}

/// A state plus the run totals needed to continue its diagnostics.
#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub state: PlasmaState,
    pub step: u64,
    pub dt: f64,
    pub cumulative_dissipation: f64,
    pub e_total0: f64,
    pub momentum0: [f64; 3],
    pub mass0: f64,
}

pub fn encode(c: &Checkpoint) -> Vec<u8> {
    let s = &c.state;
    let g = s.grid();
    let n = g.n() as u32;
    let mut out = Vec::with_capacity(64 + 6 * 16 * g.spectral_len() + 56 * s.particles.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for _ in 0..3 {
        out.extend_from_slice(&n.to_le_bytes());
    }
    let f = |out: &mut Vec<u8>, v: f64| out.extend_from_slice(&v.to_le_bytes());
    f(&mut out, s.mollifier.epsilon());
    f(&mut out, s.t);
    for field in [&s.u, &s.b] {
        for comp in field.comps() {
            for z in comp.coeffs() {
                f(&mut out, z.re);
                f(&mut out, z.im);
            }
        }
    }
    let p = &s.particles;
    out.extend_from_slice(&(p.len() as u64).to_le_bytes());
    for arr in [p.positions(), p.velocities()] {
        for q in arr {
            for &c in q {
                f(&mut out, c);
            }
        }
    }
    for &w in p.weights() {
        f(&mut out, w);
    }
    f(&mut out, g.dealias_fraction());
    let k = &s.constants;
    for v in [k.q_h, k.m_h, k.kappa, k.eta, k.mu0, k.rho_bar] {
        f(&mut out, v);
    }
    out.extend_from_slice(&c.step.to_le_bytes());
    for v in [c.dt, c.cumulative_dissipation, c.e_total0] {
        f(&mut out, v);
    }
    for v in c.momentum0 {
        f(&mut out, v);
    }
    f(&mut out, c.mass0);
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn bytes(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        let end = self.pos.checked_add(n).ok_or(CheckpointError::Truncated)?;
        if end > self.buf.len() {
            return Err(CheckpointError::Truncated);
        }
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.bytes(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, CheckpointError> {
        Ok(u64::from_le_bytes(self.bytes(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64, CheckpointError> {
        Ok(f64::from_le_bytes(self.bytes(8)?.try_into().expect("8 bytes")))
    }
}

fn invalid(e: impl std::fmt::Display) -> CheckpointError {
    CheckpointError::Invalid(e.to_string())
}

pub fn decode(buf: &[u8]) -> Result<Checkpoint, CheckpointError> {
    if buf.len() < MAGIC.len() {
        return Err(if MAGIC.starts_with(buf) {
            CheckpointError::Truncated
        } else {
            CheckpointError::BadMagic
        });
    }
    if &buf[..MAGIC.len()] != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let mut r = Reader { buf, pos: MAGIC.len() };
    let version = r.u32()?;
    if version != VERSION {
        return Err(CheckpointError::Version(version));
    }
    let Some(body_len) = buf.len().checked_sub(32).filter(|&l| l >= r.pos) else {
        return Err(CheckpointError::Truncated);
    };
    if Sha256::digest(&buf[..body_len]).as_slice() != &buf[body_len..] {
        return Err(CheckpointError::Integrity);
    }
    let dims = [r.u32()?, r.u32()?, r.u32()?];
    if dims[0] != dims[1] || dims[1] != dims[2] {
        return Err(CheckpointError::Invalid(format!("non-cubic grid {dims:?}")));
    }
    let n = dims[0] as usize;
    let half = n / 2 + 1;
    let spec_len = n
        .checked_mul(n)
        .and_then(|v| v.checked_mul(half))
        .ok_or_else(|| invalid("grid size overflows"))?;
    let epsilon = r.f64()?;
    let t = r.f64()?;
    let mut comps = Vec::with_capacity(6);
    for _ in 0..6 {
        let raw = r.bytes(spec_len.checked_mul(16).ok_or(CheckpointError::Truncated)?)?;
        let coeffs: Vec<Complex64> = raw
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
                )
            })
            .collect();
        comps.push(coeffs);
    }
    let count = r.u64()? as usize;
    let triples = |r: &mut Reader| -> Result<Vec<[f64; 3]>, CheckpointError> {
        let raw = r.bytes(count.checked_mul(24).ok_or(CheckpointError::Truncated)?)?;
        Ok(raw
            .chunks_exact(24)
            .map(|c| std::array::from_fn(|d| f64::from_le_bytes(c[8 * d..8 * d + 8].try_into().expect("8 bytes"))))
            .collect())
    };
    let x = triples(&mut r)?;
    let v = triples(&mut r)?;
    let w: Vec<f64> = r
        .bytes(count.checked_mul(8).ok_or(CheckpointError::Truncated)?)?
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let dealias = r.f64()?;
    let k: Vec<f64> = (0..6).map(|_| r.f64()).collect::<Result<_, _>>()?;
    let step = r.u64()?;
    let dt = r.f64()?;
    let cumulative_dissipation = r.f64()?;
    let e_total0 = r.f64()?;
    let momentum0 = [r.f64()?, r.f64()?, r.f64()?];
    let mass0 = r.f64()?;
    if r.pos != body_len {
        return Err(invalid("length does not match the header"));
    }

    let grid = Grid::with_dealias(n, dealias).map_err(invalid)?;
    let mut fields = comps
        .into_iter()
        .map(|c| ScalarField::from_coeffs(grid, c).map_err(invalid))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter();
    let mut vector = || -> Result<VectorField, CheckpointError> {
        let comps = [fields.next(), fields.next(), fields.next()].map(|c| c.expect("six components"));
        VectorField::new(comps).map_err(invalid)
    };
    let u = vector()?;
    let b = vector()?;
    let mollifier = if epsilon == 0.0 {
        MollifierSpec::identity()
    } else {
        MollifierSpec::new(epsilon).map_err(invalid)?
    };
    let constants = PhysicalConstants::new(k[0], k[1], k[2], k[3], k[4], k[5]).map_err(invalid)?;
    let particles = ParticleEnsemble::new(x, v, w).map_err(invalid)?;
    let mut state = PlasmaState::new(u, b, particles, mollifier, constants).map_err(invalid)?;
    state.t = t;
    Ok(Checkpoint {
        state,
        step,
        dt,
        cumulative_dissipation,
        e_total0,
        momentum0,
        mass0,
    })
}

pub fn write_checkpoint(path: &Path, c: &Checkpoint) -> crate::Result<()> {
    std::fs::write(path, encode(c))?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> crate::Result<Checkpoint> {
    let buf = std::fs::read(path)?;
    Ok(decode(&buf)?)
}
