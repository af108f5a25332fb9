use rayon::prelude::*;

use super::pairwise_sum;
use crate::error::{Error, Result};
use crate::fields::{Dataset, Site};
use crate::linalg::{JitterSchedule, SymmetricMatrix};
use crate::neighbors::{AxisScale, KdTree};
use crate::rng;
use crate::simulate::{CovKernel, CovarianceModel};

const LN_2PI: f64 = 1.8378770664093453;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderingRule {
    /// Ascending sum of the rescaled coordinates, ties by row index.
    CoordinateSum,
    /// Uniform random permutation drawn from the seed.
    Random { seed: u64 },
}

/// Conditioning sets of a Vecchia approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborGraph {
    /// `ordering[r]` is the row placed at position `r`.
    pub ordering: Vec<usize>,
    /// `neighbors[r]` holds rows placed before position `r`, nearest first.
    pub neighbors: Vec<Vec<usize>>,
    pub scale: AxisScale,
}

impl NeighborGraph {
    pub fn len(&self) -> usize {
        self.ordering.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordering.is_empty()
    }

    pub fn max_neighbors(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }
}

pub fn build_neighbor_graph(sites: &[Site], m: usize, scale: AxisScale, rule: OrderingRule) -> NeighborGraph {
    let n = sites.len();
    let coords: Vec<[f64; 3]> = sites.iter().map(|s| scale.apply(s)).collect();
    let ordering: Vec<usize> = match rule {
        OrderingRule::CoordinateSum => {
            let mut o: Vec<usize> = (0..n).collect();
            let key = |i: usize| coords[i][0] + coords[i][1] + coords[i][2];
            o.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
            o
        }
        OrderingRule::Random { seed } => {
            let mut o: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(o.as_mut_slice(), &mut rng::stream(seed, rng::ORDERING));
            o
        }
    };
    let mut rank = vec![0usize; n];
    for (r, &i) in ordering.iter().enumerate() {
        rank[i] = r;
    }
    let tree = KdTree::new(coords);
    let neighbors: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|r| {
            let i = ordering[r];
            tree.nearest(&tree.coord(i), m.min(r), |j| rank[j] < r)
        })
        .collect();
    NeighborGraph { ordering, neighbors, scale }
}

/// Sum over ordered rows of `log p(z_i | z_neighbors)`.
pub fn vecchia_log_likelihood(model: &CovarianceModel, data: &Dataset, graph: &NeighborGraph) -> Result<f64> {
    if graph.len() != data.len() {
        return Err(Error::DimensionMismatch { expected: data.len(), got: graph.len() });
    }
    let kernel = CovKernel::new(model)?;
    kernel.check_kind(data.kind)?;
    let prepared = kernel.prepare_all(&data.sites)?;
    let resid: Vec<f64> = prepared.iter().zip(&data.values).map(|(p, z)| z - kernel.mean(p)).collect();
    let terms: Vec<f64> = (0..graph.len())
        .into_par_iter()
        .map(|r| {
            let i = graph.ordering[r];
            let nb = &graph.neighbors[r];
            // conditioning rows first, the row itself last
            let rows: Vec<usize> = nb.iter().copied().chain(std::iter::once(i)).collect();
            let block = SymmetricMatrix::from_fn(rows.len(), |a, b| {
                let c = kernel.signal(&prepared[rows[a]], &prepared[rows[b]]);
                if a == b {
                    c + kernel.nugget()
                } else {
                    c
                }
            })?;
            let f = block.into_cholesky(&JitterSchedule::default())?;
            let z: Vec<f64> = rows.iter().map(|&j| resid[j]).collect();
            let w = f.solve_lower(&z)?;
            let last = rows.len() - 1;
            let w_last = w[last];
            Ok(-0.5 * LN_2PI - f.get(last, last).ln() - 0.5 * w_last * w_last)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&terms))
}
