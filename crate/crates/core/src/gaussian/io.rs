//! Covariance files.
//!
//! Binary layout: 8-byte header `b"QV"`, ordering tag (`0` = interleaved `x1,p1,…`), one
//! reserved byte, mode count `M` as little-endian `u32`; then `(2M)²` little-endian `f64`
//! entries in row-major order.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RMatrix;

const MAGIC: &[u8; 2] = b"QV";
const INTERLEAVED: u8 = 0;

pub fn write_covariance<W: Write>(v: &RMatrix, mut w: W) -> Result<()> {
    let modes = u32::try_from(v.nrows() / 2).map_err(|_| Error::InvalidParameter("too many modes".into()))?;
    w.write_all(MAGIC)?;
    w.write_all(&[INTERLEAVED, 0])?;
    w.write_all(&modes.to_le_bytes())?;
    for i in 0..v.nrows() {
        for j in 0..v.ncols() {
            w.write_all(&v[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_covariance<R: Read>(mut r: R) -> Result<RMatrix> {
    let mut header = [0u8; 8];
    r.read_exact(&mut header)?;
    if &header[..2] != MAGIC {
        return Err(Error::InvalidParameter("not a covariance file".into()));
    }
    if header[2] != INTERLEAVED {
        return Err(Error::InvalidParameter(format!("unknown quadrature ordering tag {}", header[2])));
    }
    let n = 2 * u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let mut buf = [0u8; 8];
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        r.read_exact(&mut buf)?;
        data.push(f64::from_le_bytes(buf));
    }
    Ok(RMatrix::from_row_slice(n, n, &data))
}

#[derive(Serialize, Deserialize)]
struct CovarianceJson {
    modes: usize,
    ordering: String,
    v: Vec<Vec<f64>>,
}

pub fn covariance_to_json(v: &RMatrix) -> Result<String> {
    let rows = (0..v.nrows()).map(|i| v.row(i).iter().copied().collect()).collect();
    let rec = CovarianceJson { modes: v.nrows() / 2, ordering: "interleaved".into(), v: rows };
    Ok(serde_json::to_string(&rec)?)
}

pub fn covariance_from_json(text: &str) -> Result<RMatrix> {
    let rec: CovarianceJson = serde_json::from_str(text)?;
    if rec.ordering != "interleaved" {
        return Err(Error::InvalidParameter(format!("unknown quadrature ordering {}", rec.ordering)));
    }
    let n = 2 * rec.modes;
    if rec.v.len() != n || rec.v.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidParameter(format!("expected a {n}x{n} matrix")));
    }
    Ok(RMatrix::from_fn(n, n, |i, j| rec.v[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::sample_random_circuit;
    use crate::gaussian::covariance::output_covariance;
    use crate::lattice::build_lattice;
    use crate::rng::substream;

    fn sample_state() -> RMatrix {
        let l = build_lattice(1, 2, 2).unwrap();
        output_covariance(&sample_random_circuit(&l, 3, &mut substream(6, 0)), 0.4).unwrap().v
    }

    #[test]
    fn binary_round_trip() {
        let v = sample_state();
        let mut buf = Vec::new();
        write_covariance(&v, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 64 * 8);
        assert_eq!(&buf[..4], &[b'Q', b'V', 0, 0]);
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 4);
        assert_eq!(read_covariance(&buf[..]).unwrap(), v);
        buf[0] = b'X';
        assert!(read_covariance(&buf[..]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let v = sample_state();
        assert_eq!(covariance_from_json(&covariance_to_json(&v).unwrap()).unwrap(), v);
        assert!(covariance_from_json(r#"{"modes":1,"ordering":"xxpp","v":[[1,0],[0,1]]}"#).is_err());
    }
}
