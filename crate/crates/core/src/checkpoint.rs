//! Binary MPS checkpoints.
//!
//! Layout, all integers and floats little-endian:
//!
//! | field        | type        |
//! |--------------|-------------|
//! | magic        | `b"TSREMPS\0"` |
//! | version      | u32 (= 1)   |
//! | L            | u64         |
//! | d            | u64         |
//! | norm_log     | f64         |
//! | per site: shape `(l, d, r)` | 3 x u64 |
//! | per site: data | `l*d*r` pairs of f64 `(re, im)`, row-major |

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::mps::MatrixProductState;
use crate::tensor::{DenseTensor, C64};

pub const MAGIC: &[u8; 8] = b"TSREMPS\0";
pub const VERSION: u32 = 1;
const MAX_SITE_ENTRIES: u64 = 1 << 28;

pub fn write_mps<W: Write>(psi: &MatrixProductState, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(psi.len() as u64).to_le_bytes())?;
    w.write_all(&(psi.d() as u64).to_le_bytes())?;
    w.write_all(&psi.norm_log().to_le_bytes())?;
    for t in psi.tensors() {
        for &e in t.shape() {
            w.write_all(&(e as u64).to_le_bytes())?;
        }
    }
    for t in psi.tensors() {
        for z in t.data() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

pub fn read_mps<R: Read>(mut r: R) -> Result<MatrixProductState> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not an MPS checkpoint (bad magic)".into()));
    }
    let mut v = [0u8; 4];
    r.read_exact(&mut v)?;
    let version = u32::from_le_bytes(v);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported checkpoint version {version}")));
    }
    let len = read_u64(&mut r)?;
    let d = read_u64(&mut r)?;
    if len == 0 || len > 1 << 20 || !(2..=16).contains(&d) {
        return Err(Error::Format(format!("implausible header L={len} d={d}")));
    }
    let norm_log = read_f64(&mut r)?;
    let mut shapes = Vec::with_capacity(len as usize);
    for _ in 0..len {
        let s = [read_u64(&mut r)?, read_u64(&mut r)?, read_u64(&mut r)?];
        let n = s.iter().try_fold(1u64, |acc, &e| acc.checked_mul(e));
        if s[1] != d || n.is_none_or(|n| n == 0 || n > MAX_SITE_ENTRIES) {
            return Err(Error::Format(format!("bad site shape {s:?}")));
        }
        shapes.push(s.map(|e| e as usize));
    }
    let mut tensors = Vec::with_capacity(shapes.len());
    for s in shapes {
        let n = s.iter().product();
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            data.push(C64::new(re, im));
        }
        tensors.push(DenseTensor::new(s.to_vec(), data)?);
    }
    let mut psi = MatrixProductState::from_tensors(d as usize, tensors)?;
    psi.add_norm_log(norm_log);
    Ok(psi)
}

pub fn save_mps(psi: &MatrixProductState, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_mps(psi, std::io::BufWriter::new(f))
}

pub fn load_mps(path: &Path) -> Result<MatrixProductState> {
    read_mps(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = MatrixProductState::random(5, 3, 4, &mut rng).unwrap();
        let mut buf = Vec::new();
        write_mps(&psi, &mut buf).unwrap();
        let back = read_mps(&buf[..]).unwrap();
        assert_eq!(back.bond_dims(), psi.bond_dims());
        for (a, b) in psi.tensors().iter().zip(back.tensors()) {
            assert_eq!(a.data(), b.data());
        }
        assert!((psi.overlap(&back).unwrap() - psi.overlap(&psi).unwrap()).norm() < 1e-12 * psi.overlap(&psi).unwrap().norm());
    }

    #[test]
    fn rejects_corruption() {
        let psi = MatrixProductState::basis_state(2, &[0, 1]).unwrap();
        let mut buf = Vec::new();
        write_mps(&psi, &mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_mps(&bad[..]), Err(Error::Format(_))));
        assert!(read_mps(&buf[..buf.len() - 3]).is_err());
    }
}
