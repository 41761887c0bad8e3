use ndarray::Array2;

use crate::error::{Error, Result};

/// Classifier inputs stored as concatenated one-hot blocks plus integer targets.
///
/// Only the active column of each block is kept; [`EncodedBatch::dense_inputs`]
/// materializes the equivalent `n × p` 0/1 matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedBatch {
    block_sizes: Vec<usize>,
    offsets: Vec<usize>,
    input_dim: usize,
    // n × blocks, absolute column index of the hot entry
    active: Vec<u32>,
    targets: Vec<usize>,
    num_classes: usize,
}

impl EncodedBatch {
    /// Builds a batch from row-major block symbols (`n × block_sizes.len()`).
    pub fn new(
        block_sizes: Vec<usize>,
        symbols: &[u32],
        targets: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self> {
        let n = targets.len();
        let blocks = block_sizes.len();
        if symbols.len() != n * blocks {
            return Err(Error::shape(format!(
                "expected {} block symbols for {n} rows, got {}",
                n * blocks,
                symbols.len()
            )));
        }
        if num_classes < 2 {
            return Err(Error::param("classifier needs at least 2 classes"));
        }
        if let Some(&bad) = targets.iter().find(|&&t| t >= num_classes) {
            return Err(Error::SymbolOutOfRange {
                value: bad as u64,
                alphabet: num_classes as u64,
            });
        }
        let mut offsets = Vec::with_capacity(blocks);
        let mut input_dim = 0;
        for &size in &block_sizes {
            if size == 0 {
                return Err(Error::param("one-hot block of size 0"));
            }
            offsets.push(input_dim);
            input_dim += size;
        }
        let mut active = Vec::with_capacity(symbols.len());
        for row in symbols.chunks(blocks.max(1)).take(if blocks == 0 { 0 } else { n }) {
            for (b, &s) in row.iter().enumerate() {
                if s as usize >= block_sizes[b] {
                    return Err(Error::SymbolOutOfRange {
                        value: s as u64,
                        alphabet: block_sizes[b] as u64,
                    });
                }
                active.push((offsets[b] + s as usize) as u32);
            }
        }
        Ok(Self {
            block_sizes,
            offsets,
            input_dim,
            active,
            targets,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn block_offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Hot column indices of row `i`, one per block.
    pub fn active_row(&self, i: usize) -> &[u32] {
        let b = self.block_sizes.len();
        &self.active[i * b..(i + 1) * b]
    }

    /// Row subset, in the given order.
    pub fn select(&self, rows: &[usize]) -> EncodedBatch {
        let b = self.block_sizes.len();
        let mut active = Vec::with_capacity(rows.len() * b);
        let mut targets = Vec::with_capacity(rows.len());
        for &r in rows {
            active.extend_from_slice(self.active_row(r));
            targets.push(self.targets[r]);
        }
        EncodedBatch {
            block_sizes: self.block_sizes.clone(),
            offsets: self.offsets.clone(),
            input_dim: self.input_dim,
            active,
            targets,
            num_classes: self.num_classes,
        }
    }

    pub fn dense_inputs(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.len(), self.input_dim));
        for i in 0..self.len() {
            for &c in self.active_row(i) {
                out[[i, c as usize]] = 1.0;
            }
        }
        out
    }
}
