//! Data augmentation: random subsampling of a cloud into two views and
//! conversion into kNN adjacency graphs with precomputed symmetric
//! normalization D^{-1/2} (A + I) D^{-1/2}.

use std::rc::Rc;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::knn::knn_indices;
use crate::pointcloud::PointCloud;
use crate::tensor::{CsrMatrix, Tensor};
use crate::train::TrainConfig;

/// A kNN graph over a (sub)cloud: node features are the point
/// coordinates, edges are the union-symmetrized kNN pairs, and the
/// normalized adjacency (with self-loops) is cached dense and sparse.
#[derive(Debug, Clone)]
pub struct Graph {
    pub node_features: Tensor,
    /// Undirected edges stored once with i < j.
    pub edges: Vec<(usize, usize)>,
    pub norm_adj: Tensor,
    norm_adj_csr: Rc<CsrMatrix>,
    /// Part labels carried from the source cloud, when present.
    pub part_labels: Option<Vec<usize>>,
}

impl Graph {
    pub fn n_nodes(&self) -> usize {
        self.node_features.rows()
    }

    pub fn norm_adj_csr(&self) -> Rc<CsrMatrix> {
        self.norm_adj_csr.clone()
    }

    /// Debug dump: `i j` per edge, then a blank line, then one `x y z`
    /// coordinate line per node.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, j) in &self.edges {
            out.push_str(&format!("{i} {j}\n"));
        }
        out.push('\n');
        for i in 0..self.n_nodes() {
            let r = self.node_features.row(i);
            out.push_str(&format!("{} {} {}\n", r[0], r[1], r[2]));
        }
        out
    }
}

/// A pair of augmented graphs derived from the same source cloud.
#[derive(Debug, Clone)]
pub struct AugmentedPair {
    pub g_u: Graph,
    pub g_v: Graph,
    pub source_id: usize,
}

/// Uniform sample of ceil(ratio * n) points without replacement, order
/// randomized. Part labels follow their points.
pub fn subsample(cloud: &PointCloud, ratio: f64, rng: &mut ChaCha8Rng) -> Result<PointCloud> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "sample ratio must be in (0, 1], got {ratio}"
        )));
    }
    let n = cloud.len();
    let m = ((ratio * n as f64).ceil() as usize).min(n);
    if m == 0 {
        return Err(Error::TooFewPoints { have: 0, need: 0 });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx.truncate(m);
    let points = idx.iter().map(|&i| cloud.points[i]).collect();
    let part_labels = cloud
        .part_labels
        .as_ref()
        .map(|p| idx.iter().map(|&i| p[i]).collect());
    Ok(PointCloud {
        points,
        label: cloud.label,
        part_labels,
    })
}

/// Build the kNN graph of a cloud: directed k-nearest edges (Euclidean,
/// ties broken toward the lower index), symmetrized by union, self-loops
/// added before normalization.
pub fn knn_graph(cloud: &PointCloud, k: usize) -> Result<Graph> {
    let n = cloud.len();
    if n <= k {
        return Err(Error::TooFewPoints { have: n, need: k });
    }
    let neighbors = knn_indices(&cloud.points, k);

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut edges = Vec::new();
    for (i, nbrs) in neighbors.iter().enumerate() {
        for &j in nbrs {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            if !adj[a].contains(&b) {
                adj[a].push(b);
                adj[b].push(a);
                edges.push((a, b));
            }
        }
    }
    edges.sort_unstable();

    // Degrees include the self-loop.
    let deg: Vec<f64> = adj.iter().map(|a| (a.len() + 1) as f64).collect();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row: Vec<(usize, f64)> = adj[i]
            .iter()
            .map(|&j| (j, 1.0 / (deg[i] * deg[j]).sqrt()))
            .collect();
        row.push((i, 1.0 / deg[i]));
        row.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        rows.push(row);
    }
    let csr = CsrMatrix::from_rows(n, &rows);
    let norm_adj = csr.to_dense();

    let mut feats = Tensor::zeros(n, 3);
    for (i, p) in cloud.points.iter().enumerate() {
        feats.row_mut(i).copy_from_slice(p);
    }

    Ok(Graph {
        node_features: feats,
        edges,
        norm_adj,
        norm_adj_csr: Rc::new(csr),
        part_labels: cloud.part_labels.clone(),
    })
}

/// Two independent subsample draws of one cloud, each converted to a kNN
/// graph with the configured K.
pub fn make_pair(
    cloud: &PointCloud,
    source_id: usize,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<AugmentedPair> {
    let m = (cfg.sample_ratio * cloud.len() as f64).ceil() as usize;
    if m <= cfg.k_neighbors {
        return Err(Error::TooFewPoints {
            have: m,
            need: cfg.k_neighbors,
        });
    }
    let u = subsample(cloud, cfg.sample_ratio, rng)?;
    let v = subsample(cloud, cfg.sample_ratio, rng)?;
    Ok(AugmentedPair {
        g_u: knn_graph(&u, cfg.k_neighbors)?,
        g_v: knn_graph(&v, cfg.k_neighbors)?,
        source_id,
    })
}
