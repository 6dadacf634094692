//! JSON file formats.
//!
//! State: `{"dim": d, "re": [[..]], "im": [[..]]}` (row-major), with an extra
//! `"dims": [dA, dB]` for bipartite states. Unitaries (basis files) use the
//! same layout. Channel: `{"dim_in": d, "dim_out": d, "kraus": [{"re": ..,
//! "im": ..}, ..]}`. Floats are written in shortest round-trip form.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::qstate::{BipartiteState, DensityMatrix, Unitary};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexMatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = |f: fn(&crate::linalg::C64) -> f64| {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        Self { re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::param("matrix has no entries"));
        }
        if self.im.len() != rows
            || self.re.iter().any(|r| r.len() != cols)
            || self.im.iter().any(|r| r.len() != cols)
        {
            return Err(Error::param("re and im must be rectangular arrays of equal shape"));
        }
        if self.re.iter().chain(&self.im).flatten().any(|x| !x.is_finite()) {
            return Err(Error::param("matrix entries must be finite"));
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| c(self.re[i][j], self.im[i][j])))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
}

impl StateFile {
    pub fn from_matrix(m: &CMatrix, dims: Option<[usize; 2]>) -> Self {
        let ComplexMatrixJson { re, im } = ComplexMatrixJson::from_matrix(m);
        Self { dim: m.nrows(), re, im, dims }
    }

    fn matrix(&self) -> Result<CMatrix> {
        let m = ComplexMatrixJson { re: self.re.clone(), im: self.im.clone() }.to_matrix()?;
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::param(format!(
                "declared dim {} but matrix is {}x{}",
                self.dim,
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<ComplexMatrixJson>,
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    to_string(&StateFile::from_matrix(rho.matrix(), None))
}

pub fn bipartite_to_json(rho: &BipartiteState) -> String {
    let (a, b) = rho.dims();
    to_string(&StateFile::from_matrix(rho.matrix(), Some([a, b])))
}

pub fn unitary_to_json(u: &Unitary) -> String {
    to_string(&StateFile::from_matrix(u.matrix(), None))
}

pub fn channel_to_json(ch: &KrausChannel) -> String {
    let file = ChannelFile {
        dim_in: ch.dim_in(),
        dim_out: ch.dim_out(),
        kraus: ch.kraus().iter().map(ComplexMatrixJson::from_matrix).collect(),
    };
    to_string(&file)
}

fn to_string<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes")
}

pub fn state_from_json(s: &str) -> Result<DensityMatrix> {
    let file: StateFile = serde_json::from_str(s)?;
    DensityMatrix::new(file.matrix()?)
}

/// Parses a bipartite state. `dims` overrides the `"dims"` field when given.
pub fn bipartite_from_json(s: &str, dims: Option<(usize, usize)>) -> Result<BipartiteState> {
    let file: StateFile = serde_json::from_str(s)?;
    let dims = dims
        .or(file.dims.map(|[a, b]| (a, b)))
        .ok_or_else(|| Error::param("bipartite state needs \"dims\" or explicit dimensions"))?;
    BipartiteState::new(DensityMatrix::new(file.matrix()?)?, dims)
}

pub fn unitary_from_json(s: &str) -> Result<Unitary> {
    let file: StateFile = serde_json::from_str(s)?;
    Unitary::new(file.matrix()?)
}

pub fn channel_from_json(s: &str) -> Result<KrausChannel> {
    let file: ChannelFile = serde_json::from_str(s)?;
    let kraus = file.kraus.iter().map(ComplexMatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
    let ch = KrausChannel::new(kraus)?;
    if ch.dim_in() != file.dim_in || ch.dim_out() != file.dim_out {
        return Err(Error::param(format!(
            "declared {}->{} but Kraus operators are {}->{}",
            file.dim_in,
            file.dim_out,
            ch.dim_in(),
            ch.dim_out()
        )));
    }
    Ok(ch)
}

pub fn read_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    state_from_json(&fs::read_to_string(path)?)
}

pub fn read_bipartite(path: impl AsRef<Path>, dims: Option<(usize, usize)>) -> Result<BipartiteState> {
    bipartite_from_json(&fs::read_to_string(path)?, dims)
}

pub fn read_unitary(path: impl AsRef<Path>) -> Result<Unitary> {
    unitary_from_json(&fs::read_to_string(path)?)
}

pub fn read_channel(path: impl AsRef<Path>) -> Result<KrausChannel> {
    channel_from_json(&fs::read_to_string(path)?)
}

pub fn write_state(path: impl AsRef<Path>, rho: &DensityMatrix) -> Result<()> {
    Ok(fs::write(path, state_to_json(rho))?)
}

pub fn write_bipartite(path: impl AsRef<Path>, rho: &BipartiteState) -> Result<()> {
    Ok(fs::write(path, bipartite_to_json(rho))?)
}

pub fn write_unitary(path: impl AsRef<Path>, u: &Unitary) -> Result<()> {
    Ok(fs::write(path, unitary_to_json(u))?)
}

pub fn write_channel(path: impl AsRef<Path>, ch: &KrausChannel) -> Result<()> {
    Ok(fs::write(path, channel_to_json(ch))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{random_commuting_bipartite_sio, random_sio, sio_to_kraus};
    use crate::linalg;
    use crate::qstate::{maximally_entangled, random_density, random_unitary};

    #[test]
    fn state_round_trip_is_exact() {
        let rho = random_density(5, 3, 17).unwrap();
        let back = state_from_json(&state_to_json(&rho)).unwrap();
        assert!(linalg::frobenius(&(back.matrix() - rho.matrix())) <= 1e-15);
    }

    #[test]
    fn bipartite_dims_are_kept() {
        let bell = maximally_entangled(2);
        let json = bipartite_to_json(&bell);
        assert!(json.contains("\"dims\""));
        let back = bipartite_from_json(&json, None).unwrap();
        assert_eq!(back.dims(), (2, 2));
        let plain = state_to_json(bell.state());
        assert!(bipartite_from_json(&plain, None).is_err());
        assert_eq!(bipartite_from_json(&plain, Some((2, 2))).unwrap().dims(), (2, 2));
        assert!(bipartite_from_json(&plain, Some((3, 2))).is_err());
    }

    #[test]
    fn parses_hand_written_state() {
        let s = r#"{"dim": 2, "re": [[0.5, 0.5], [0.5, 0.5]], "im": [[0, 0], [0, 0]]}"#;
        let rho = state_from_json(s).unwrap();
        assert_eq!(rho.dim(), 2);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(matches!(state_from_json("{not json"), Err(Error::Json(_))));
        let wrong_dim = r#"{"dim": 3, "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]}"#;
        assert!(state_from_json(wrong_dim).is_err());
        let ragged = r#"{"dim": 2, "re": [[1, 0], [0]], "im": [[0, 0], [0, 0]]}"#;
        assert!(state_from_json(ragged).is_err());
        let bad_trace = r#"{"dim": 2, "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]}"#;
        assert!(matches!(state_from_json(bad_trace), Err(Error::InvalidTrace(_))));
    }

    #[test]
    fn channel_round_trip() {
        let ch = sio_to_kraus(&random_sio(3, 3, 4).unwrap());
        let back = channel_from_json(&channel_to_json(&ch)).unwrap();
        assert_eq!(back, ch);
        let ch = random_commuting_bipartite_sio(2, 2, 2, 5).unwrap();
        assert_eq!(channel_from_json(&channel_to_json(&ch)).unwrap(), ch);
        let lying = channel_to_json(&ch).replace("\"dim_in\": 4", "\"dim_in\": 3");
        assert!(channel_from_json(&lying).is_err());
    }

    #[test]
    fn unitary_round_trip() {
        let u = random_unitary(4, 8).unwrap();
        assert_eq!(unitary_from_json(&unitary_to_json(&u)).unwrap(), u);
    }
}
