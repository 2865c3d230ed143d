//! Port correlation of a linear fluid antenna and its block-diagonal
//! approximation.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mathfn::bessel_j0;

/// Ports, aperture (in wavelengths) and intra-block correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpec {
    pub n_ports: usize,
    pub aperture: f64,
    pub mu_sq: f64,
}

impl CorrelationSpec {
    pub fn new(n_ports: usize, aperture: f64, mu_sq: f64) -> Result<Self> {
        let s = Self {
            n_ports,
            aperture,
            mu_sq,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ports < 2 {
            return Err(Error::InvalidConfig(format!(
                "n_ports must be >= 2, got {}",
                self.n_ports
            )));
        }
        if !(self.aperture > 0.0 && self.aperture.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "aperture must be positive, got {}",
                self.aperture
            )));
        }
        if !(self.mu_sq > 0.0 && self.mu_sq < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "mu_sq must lie in (0, 1), got {}",
                self.mu_sq
            )));
        }
        Ok(())
    }
}

/// Block sizes `L_b` of the block-diagonal approximation, largest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct BlockPartition {
    block_sizes: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    block_sizes: Vec<usize>,
    block_count: usize,
}

impl TryFrom<PartitionRepr> for BlockPartition {
    type Error = Error;

    fn try_from(r: PartitionRepr) -> Result<Self> {
        if r.block_count != r.block_sizes.len() {
            return Err(Error::Partition(format!(
                "block_count {} does not match {} sizes",
                r.block_count,
                r.block_sizes.len()
            )));
        }
        Self::new(r.block_sizes)
    }
}

impl From<BlockPartition> for PartitionRepr {
    fn from(p: BlockPartition) -> Self {
        Self {
            block_count: p.block_sizes.len(),
            block_sizes: p.block_sizes,
        }
    }
}

impl BlockPartition {
    /// Fails on an empty list or a zero-sized block.
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() || block_sizes.contains(&0) {
            return Err(Error::Partition(format!(
                "block sizes must be non-empty and positive, got {block_sizes:?}"
            )));
        }
        Ok(Self { block_sizes })
    }

    /// One block holding all ports.
    pub fn single(n_ports: usize) -> Result<Self> {
        Self::new(vec![n_ports])
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn block_count(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn n_ports(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    /// Block index of every port, ports laid out block after block.
    pub fn port_blocks(&self) -> Vec<usize> {
        self.block_sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &l)| std::iter::repeat_n(b, l))
            .collect()
    }

    /// The block-diagonal correlation matrix: ones on the diagonal, `mu_sq`
    /// inside each block, zero across blocks.
    pub fn correlation_matrix(&self, mu_sq: f64) -> DMatrix<f64> {
        let blocks = self.port_blocks();
        let n = blocks.len();
        DMatrix::from_fn(n, n, |i, k| {
            if i == k {
                1.0
            } else if blocks[i] == blocks[k] {
                mu_sq
            } else {
                0.0
            }
        })
    }
}

/// `J0(2 pi |i-k| W / (N-1))`.
pub fn jakes_matrix(spec: &CorrelationSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let n = spec.n_ports;
    let step = 2.0 * std::f64::consts::PI * spec.aperture / (n - 1) as f64;
    let row: Vec<f64> = (0..n).map(|d| bessel_j0(step * d as f64)).collect();
    Ok(DMatrix::from_fn(n, n, |i, k| row[i.abs_diff(k)]))
}

/// Block partition of the Jakes matrix by eigenvalue matching.
pub fn bdma_partition(spec: &CorrelationSpec) -> Result<BlockPartition> {
    let j = jakes_matrix(spec)?;
    partition_from_correlation(&j, spec.mu_sq)
}

/// Block partition of an arbitrary correlation matrix.
///
/// A block of `L` ports with off-diagonal `mu_sq` has one dominant
/// eigenvalue `1 + (L-1) mu_sq`. Inverting that for every eigenvalue at or
/// above one gives provisional sizes; the shortest prefix (largest first)
/// whose unrounded sizes cover all ports is kept. The rounded sizes are then
/// trimmed one port at a time from the currently largest block, or a
/// shortfall is spread over the largest blocks.
pub fn partition_from_correlation(matrix: &DMatrix<f64>, mu_sq: f64) -> Result<BlockPartition> {
    let n = matrix.nrows();
    if n == 0 || matrix.ncols() != n {
        return Err(Error::Partition(format!(
            "correlation matrix must be square and non-empty, got {}x{}",
            n,
            matrix.ncols()
        )));
    }
    if !(mu_sq > 0.0 && mu_sq < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "mu_sq must lie in (0, 1), got {mu_sq}"
        )));
    }
    let eig = SymmetricEigen::try_new(matrix.clone(), 1e-14, 10_000)
        .ok_or_else(|| Error::Eigen(format!("no convergence for {n}x{n} matrix")))?;
    let mut lambda: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    lambda.sort_by(|a, b| b.total_cmp(a));

    let mut sizes = Vec::new();
    let mut covered = 0usize;
    let mut exact = 0.0;
    for &l in lambda.iter().take_while(|&&l| l >= 1.0 - 1e-9) {
        let size = (l - (1.0 - mu_sq)) / mu_sq;
        sizes.push(size.round().max(1.0) as usize);
        covered += sizes[sizes.len() - 1];
        exact += size;
        // Rounding can leave a port or two short; a transition eigenvalue
        // must not open a block just to absorb that.
        if exact >= n as f64 - 1e-9 {
            break;
        }
    }
    if sizes.is_empty() {
        return Err(Error::Partition(format!(
            "no eigenvalue reaches 1 (largest {:.4})",
            lambda[0]
        )));
    }
    while covered > n {
        let i = argmax(&sizes);
        sizes[i] -= 1;
        covered -= 1;
    }
    sizes.retain(|&l| l > 0);
    let mut i = 0;
    while covered < n {
        let len = sizes.len();
        sizes[i % len] += 1;
        covered += 1;
        i += 1;
    }
    sizes.sort_by(|a, b| b.cmp(a));
    BlockPartition::new(sizes)
}

/// First index of the maximum.
fn argmax(v: &[usize]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}
