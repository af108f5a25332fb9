//! Nearest-neighbour search over sites in a rescaled metric.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::fields::Site;

/// Per-axis multipliers applied to `(x, y, t)` before measuring distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisScale(pub [f64; 3]);

impl Default for AxisScale {
    fn default() -> Self {
        AxisScale([1.0, 1.0, 1.0])
    }
}

impl AxisScale {
    /// `(1/a_s, 1/a_s, 1/a_t)`.
    pub fn spacetime(space_range: f64, time_range: f64) -> Self {
        AxisScale([1.0 / space_range, 1.0 / space_range, 1.0 / time_range])
    }

    pub fn apply(&self, s: &Site) -> [f64; 3] {
        let p = s.point();
        [p.x * self.0[0], p.y * self.0[1], s.time().unwrap_or(0.0) * self.0[2]]
    }
}

fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    d0 * d0 + d1 * d1 + d2 * d2
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    d2: f64,
    index: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d2.total_cmp(&other.d2).then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const LEAF: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// Static k-d tree over points in up to three dimensions.
#[derive(Debug, Clone)]
pub struct KdTree {
    coords: Vec<[f64; 3]>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn new(coords: Vec<[f64; 3]>) -> Self {
        let mut order: Vec<usize> = (0..coords.len()).collect();
        let mut nodes = Vec::new();
        if !coords.is_empty() {
            build(&coords, &mut order, 0, &mut nodes);
        }
        KdTree { coords, order, nodes }
    }

    pub fn from_sites(sites: &[Site], scale: &AxisScale) -> Self {
        Self::new(sites.iter().map(|s| scale.apply(s)).collect())
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coord(&self, i: usize) -> [f64; 3] {
        self.coords[i]
    }

    /// The `k` points nearest to `q` among those accepted by `keep`, nearest
    /// first; equal distances go to the smaller index.
    pub fn nearest(&self, q: &[f64; 3], k: usize, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        if k == 0 || self.nodes.is_empty() {
            return Vec::new();
        }
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        self.search(0, q, k, &keep, &mut heap);
        let mut v = heap.into_vec();
        v.sort_unstable();
        v.into_iter().map(|c| c.index).collect()
    }

    fn search(&self, node: usize, q: &[f64; 3], k: usize, keep: &impl Fn(usize) -> bool, heap: &mut BinaryHeap<Candidate>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    if !keep(i) {
                        continue;
                    }
                    let c = Candidate { d2: dist2(q, &self.coords[i]), index: i };
                    if heap.len() < k {
                        heap.push(c);
                    } else if c < *heap.peek().expect("heap is full") {
                        heap.pop();
                        heap.push(c);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, k, keep, heap);
                // ties at the plane still matter for the index rule
                if heap.len() < k || diff * diff <= heap.peek().expect("heap is full").d2 {
                    self.search(far, q, k, keep, heap);
                }
            }
        }
    }
}

fn build(coords: &[[f64; 3]], order: &mut [usize], offset: usize, nodes: &mut Vec<Node>) -> usize {
    let id = nodes.len();
    if order.len() <= LEAF {
        nodes.push(Node::Leaf { start: offset, end: offset + order.len() });
        return id;
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &i in order.iter() {
        for a in 0..3 {
            lo[a] = lo[a].min(coords[i][a]);
            hi[a] = hi[a].max(coords[i][a]);
        }
    }
    let axis = (0..3).max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b]))).unwrap_or(0);
    if hi[axis] - lo[axis] == 0.0 {
        nodes.push(Node::Leaf { start: offset, end: offset + order.len() });
        return id;
    }
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| coords[a][axis].total_cmp(&coords[b][axis]).then(a.cmp(&b)));
    let value = coords[order[mid]][axis];
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let (l, r) = order.split_at_mut(mid);
    let left = build(coords, l, offset, nodes);
    let right = build(coords, r, offset + mid, nodes);
    nodes[id] = Node::Split { axis, value, left, right };
    id
}
