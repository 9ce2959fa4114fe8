//! JSON schemas for matrices and channels.
//!
//! Matrix: `{"block_dims": [n1, ...], "blocks": [[[[re, im], ...], ...], ...]}`
//! with row-major complex entries. Channel:
//! `{"source_dims": [...], "target_dims": [...], "kraus": [K, ...]}` where each
//! `K` is a dense row-major `dim(target) × dim(source)` array of `[re, im]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{BlockMatrix, MatrixAlgebra, C64};
use crate::channels::Channel;
use crate::error::{Error, Result};

pub type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub block_dims: Vec<usize>,
    pub blocks: Vec<ComplexRows>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub source_dims: Vec<usize>,
    pub target_dims: Vec<usize>,
    pub kraus: Vec<ComplexRows>,
}

fn rows_to_dense(rows: &ComplexRows, nrows: usize, ncols: usize, field: &str) -> Result<DMatrix<C64>> {
    if rows.len() != nrows {
        return Err(Error::validation(field, format!("expected {nrows} rows, got {}", rows.len())));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(Error::validation(
                format!("{field}[{i}]"),
                format!("expected {ncols} entries, got {}", r.len()),
            ));
        }
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| {
        let [re, im] = rows[i][j];
        C64::new(re, im)
    }))
}

fn dense_to_rows(m: &DMatrix<C64>) -> ComplexRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl MatrixJson {
    pub fn to_block_matrix(&self) -> Result<BlockMatrix> {
        let alg = MatrixAlgebra::new(self.block_dims.clone()).map_err(|e| e.in_field("block_dims"))?;
        if self.blocks.len() != alg.num_blocks() {
            return Err(Error::validation(
                "blocks",
                format!("expected {} blocks, got {}", alg.num_blocks(), self.blocks.len()),
            ));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(alg.block_dims())
            .enumerate()
            .map(|(i, (b, &n))| rows_to_dense(b, n, n, &format!("blocks[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        BlockMatrix::from_blocks(alg, blocks)
    }

    pub fn from_block_matrix(m: &BlockMatrix) -> Self {
        Self {
            block_dims: m.algebra().block_dims().to_vec(),
            blocks: m.blocks().iter().map(dense_to_rows).collect(),
        }
    }
}

impl ChannelJson {
    pub fn to_channel(&self) -> Result<Channel> {
        let source = MatrixAlgebra::new(self.source_dims.clone()).map_err(|e| e.in_field("source_dims"))?;
        let target = MatrixAlgebra::new(self.target_dims.clone()).map_err(|e| e.in_field("target_dims"))?;
        let kraus = self
            .kraus
            .iter()
            .enumerate()
            .map(|(i, k)| rows_to_dense(k, target.dim(), source.dim(), &format!("kraus[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        Channel::new(source, target, kraus)
    }

    pub fn from_channel(c: &Channel) -> Self {
        Self {
            source_dims: c.source().block_dims().to_vec(),
            target_dims: c.target().block_dims().to_vec(),
            kraus: c.kraus().iter().map(dense_to_rows).collect(),
        }
    }
}
