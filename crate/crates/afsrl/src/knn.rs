//! Exact k-nearest-neighbor search: a kd-tree for larger clouds with a
//! brute-force path kept both as fallback for small inputs and as a test
//! oracle. Ties in distance break toward the lower point index, and both
//! paths agree exactly.

use crate::pointcloud::Point;

const BRUTE_FORCE_THRESHOLD: usize = 64;

/// Neighbor lists (excluding self) for every point, k per point, ordered
/// by (distance, index).
pub fn knn_indices(points: &[Point], k: usize) -> Vec<Vec<usize>> {
    if points.len() < BRUTE_FORCE_THRESHOLD {
        brute_force_knn(points, k)
    } else {
        let tree = KdTree::build(points);
        (0..points.len())
            .map(|i| tree.knn(points, i, k))
            .collect()
    }
}

/// O(n^2) reference search.
pub fn brute_force_knn(points: &[Point], k: usize) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut cand: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (dist2(points[i], points[j]), j))
            .collect();
        cand.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.push(cand.into_iter().take(k).map(|(_, j)| j).collect());
    }
    out
}

fn dist2(a: Point, b: Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

struct KdNode {
    /// Point index at this node.
    idx: usize,
    dim: usize,
    left: Option<Box<KdNode>>,
    right: Option<Box<KdNode>>,
}

pub struct KdTree {
    root: Option<Box<KdNode>>,
}

impl KdTree {
    pub fn build(points: &[Point]) -> Self {
        let mut idx: Vec<usize> = (0..points.len()).collect();
        KdTree {
            root: Self::build_rec(points, &mut idx, 0),
        }
    }

    fn build_rec(points: &[Point], idx: &mut [usize], depth: usize) -> Option<Box<KdNode>> {
        if idx.is_empty() {
            return None;
        }
        let dim = depth % 3;
        let mid = idx.len() / 2;
        idx.select_nth_unstable_by(mid, |&a, &b| {
            points[a][dim]
                .partial_cmp(&points[b][dim])
                .unwrap()
                .then(a.cmp(&b))
        });
        let node_idx = idx[mid];
        let (left, rest) = idx.split_at_mut(mid);
        let right = &mut rest[1..];
        Some(Box::new(KdNode {
            idx: node_idx,
            dim,
            left: Self::build_rec(points, left, depth + 1),
            right: Self::build_rec(points, right, depth + 1),
        }))
    }

    /// k nearest neighbors of points[query], excluding the query itself.
    pub fn knn(&self, points: &[Point], query: usize, k: usize) -> Vec<usize> {
        // Max-heap on (dist2, index) so the lexicographically worst
        // candidate is evicted first; this realizes the lower-index
        // tie-break exactly as the brute-force sort does.
        let mut heap: std::collections::BinaryHeap<Candidate> = std::collections::BinaryHeap::new();
        self.search(points, self.root.as_deref(), query, k, &mut heap);
        let mut out: Vec<Candidate> = heap.into_vec();
        out.sort();
        out.into_iter().map(|c| c.idx).collect()
    }

    fn search(
        &self,
        points: &[Point],
        node: Option<&KdNode>,
        query: usize,
        k: usize,
        heap: &mut std::collections::BinaryHeap<Candidate>,
    ) {
        let Some(node) = node else { return };
        if node.idx != query {
            let d2 = dist2(points[query], points[node.idx]);
            let cand = Candidate { d2, idx: node.idx };
            if heap.len() < k {
                heap.push(cand);
            } else if let Some(worst) = heap.peek() {
                if cand < *worst {
                    heap.pop();
                    heap.push(cand);
                }
            }
        }
        let q = points[query][node.dim];
        let split = points[node.idx][node.dim];
        let (near, far) = if q < split {
            (node.left.as_deref(), node.right.as_deref())
        } else {
            (node.right.as_deref(), node.left.as_deref())
        };
        self.search(points, near, query, k, heap);
        let plane2 = (q - split) * (q - split);
        // Visit the far side on equality too: an equal-distance candidate
        // with a lower index may live there.
        let must_visit = heap.len() < k || heap.peek().map(|w| plane2 <= w.d2).unwrap_or(true);
        if must_visit {
            self.search(points, far, query, k, heap);
        }
    }
}

#[derive(PartialEq)]
struct Candidate {
    d2: f64,
    idx: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.d2
            .partial_cmp(&other.d2)
            .unwrap()
            .then(self.idx.cmp(&other.idx))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
