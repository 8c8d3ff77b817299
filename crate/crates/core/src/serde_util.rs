//! Complex numbers serialise as `[re, im]` pairs everywhere.

use serde::ser::SerializeSeq;
use serde::Serializer;

use crate::linalg::{CMatrix, CVector, C64};

pub mod c64 {
    use super::*;
    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&[z.re, z.im], s)
    }
}

pub mod cvec {
    use super::*;
    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for z in v.iter() {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

pub mod opt_cvec {
    use super::*;
    pub fn serialize<S: Serializer>(v: &Option<CVector>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => cvec::serialize(v, s),
            None => s.serialize_none(),
        }
    }
}

pub mod c64_slice {
    use super::*;
    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for z in v {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

pub mod cvec_slice {
    use super::*;
    pub fn serialize<S: Serializer>(v: &[CVector], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = v
            .iter()
            .map(|x| x.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        serde::Serialize::serialize(&rows, s)
    }
}

pub mod cmat {
    use super::*;
    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        serde::Serialize::serialize(&rows, s)
    }
}
