//! Path and Hermite-process file formats.
//!
//! * Path CSV: header `k,t,B`, one row per grid point `t_k = k 2^-n`.
//! * Path binary: magic `FBM1`, then `H` (f64), `n` (u32), `seed` (u64) and
//!   the `2^n + 1` values (f64), all little-endian.
//! * Hermite CSV: header `j,t,Z`.

use std::io::{Read, Write};

use fbmvar_core::hermite_process::HermiteApprox;
use fbmvar_core::{FbmPath, Hurst};

use crate::error::{Error, Result};
use crate::numfmt::format_float;

pub const MAGIC: &[u8; 4] = b"FBM1";

pub fn write_path_csv<W: Write>(mut w: W, path: &FbmPath, digits: Option<u32>) -> Result<()> {
    writeln!(w, "k,t,B")?;
    for (k, b) in path.values().iter().enumerate() {
        writeln!(
            w,
            "{k},{},{}",
            format_float(path.time(k), digits),
            format_float(*b, digits)
        )?;
    }
    Ok(())
}

pub fn write_path_bin<W: Write>(mut w: W, path: &FbmPath) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&path.hurst().get().to_le_bytes())?;
    w.write_all(&path.level().to_le_bytes())?;
    w.write_all(&path.seed().to_le_bytes())?;
    for v in path.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_exact<const N: usize, R: Read>(r: &mut R, what: &str) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format(format!("truncated file: missing {what}")),
        _ => Error::Io(e),
    })?;
    Ok(buf)
}

pub fn read_path_bin<R: Read>(mut r: R) -> Result<FbmPath> {
    let magic: [u8; 4] = read_exact(&mut r, "magic")?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}, expected FBM1")));
    }
    let h = f64::from_le_bytes(read_exact(&mut r, "H")?);
    let level = u32::from_le_bytes(read_exact(&mut r, "level")?);
    let seed = u64::from_le_bytes(read_exact(&mut r, "seed")?);
    if level == 0 || level > 30 {
        return Err(Error::Format(format!("level {level} out of range")));
    }
    let hurst = Hurst::new(h).map_err(|e| Error::Format(e.to_string()))?;
    let count = (1usize << level) + 1;
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(f64::from_le_bytes(read_exact(&mut r, "path values")?));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after path values".into()));
    }
    FbmPath::from_values(hurst, level, values, seed).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_hermite_csv<W: Write>(mut w: W, z: &HermiteApprox, digits: Option<u32>) -> Result<()> {
    writeln!(w, "j,t,Z")?;
    for (j, v) in z.values.iter().enumerate() {
        writeln!(w, "{j},{},{}", format_float(z.time(j), digits), format_float(*v, digits))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use fbmvar_core::fbm::sample_fbm_circulant;

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let p = sample_fbm_circulant(0.37, 6, 99).unwrap();
        let mut buf = Vec::new();
        write_path_bin(&mut buf, &p).unwrap();
        assert_eq!(buf.len(), 4 + 8 + 4 + 8 + 8 * 65);
        let q = read_path_bin(buf.as_slice()).unwrap();
        assert_eq!(q.seed(), 99);
        assert_eq!(q.level(), 6);
        for (a, b) in p.values().iter().zip(q.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn binary_rejects_damage() {
        let p = sample_fbm_circulant(0.5, 2, 1).unwrap();
        let mut buf = Vec::new();
        write_path_bin(&mut buf, &p).unwrap();
        assert!(matches!(read_path_bin(&buf[..buf.len() - 1]), Err(Error::Format(_))));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_path_bin(bad.as_slice()), Err(Error::Format(_))));
        let mut long = buf;
        long.push(0);
        assert!(matches!(read_path_bin(long.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn csv_layout() {
        let p = sample_fbm_circulant(0.5, 3, 0).unwrap();
        let mut buf = Vec::new();
        write_path_csv(&mut buf, &p, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,t,B");
        assert_eq!(lines.len(), 10);
        assert_eq!(lines[1], "0,0,0");
        assert!(lines[9].starts_with("8,1,"));
    }
}
