//! JSON matrix files: `{"dim": n, "entries": [[re, im], ...]}` in row-major
//! order, with an optional `"dims": [m, n]` for bipartite states.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bipartite::BipartiteState;
use super::matrix::{ComplexMatrix, DensityMatrix, C64};
use crate::error::{Error, Result};
use crate::numfmt;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix, dims: Option<(usize, usize)>) -> Self {
        Self {
            dim: m.dim(),
            entries: m.row_major().iter().map(|z| [z.re, z.im]).collect(),
            dims: dims.map(|(a, b)| [a, b]),
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let entries: Vec<C64> = self.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        ComplexMatrix::from_row_major(self.dim, &entries)
    }

    pub fn to_json(&self) -> String {
        numfmt::to_json(self).expect("matrix files always serialize")
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn density_to_json(rho: &DensityMatrix) -> String {
    MatrixFile::from_matrix(rho.matrix(), None).to_json()
}

pub fn bipartite_to_json(state: &BipartiteState) -> String {
    MatrixFile::from_matrix(state.state().matrix(), Some(state.dims())).to_json()
}

pub fn parse_density(text: &str) -> Result<DensityMatrix> {
    DensityMatrix::new(MatrixFile::parse(text)?.matrix()?)
}

/// Parses a state file. `dims` overrides the file's own `"dims"`; one of
/// the two must be present.
pub fn parse_bipartite(text: &str, dims: Option<(usize, usize)>) -> Result<BipartiteState> {
    let file = MatrixFile::parse(text)?;
    let (m, n) = dims
        .or(file.dims.map(|[a, b]| (a, b)))
        .ok_or_else(|| Error::Parse("bipartite state needs subsystem dimensions".into()))?;
    let rho = DensityMatrix::new(file.matrix()?)?;
    BipartiteState::new(rho, m, n)
}

pub fn read_density(path: &Path) -> Result<DensityMatrix> {
    parse_density(&fs::read_to_string(path)?)
}

pub fn read_bipartite(path: &Path, dims: Option<(usize, usize)>) -> Result<BipartiteState> {
    parse_bipartite(&fs::read_to_string(path)?, dims)
}

pub fn write_density(path: &Path, rho: &DensityMatrix) -> Result<()> {
    fs::write(path, density_to_json(rho))?;
    Ok(())
}

pub fn write_bipartite(path: &Path, state: &BipartiteState) -> Result<()> {
    fs::write(path, bipartite_to_json(state))?;
    Ok(())
}
