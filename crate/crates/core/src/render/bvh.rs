//! Bounding volume hierarchy over axis-aligned boxes.

use super::camera::Ray;
use crate::math::Vec3;

const LEAF_SIZE: usize = 4;

#[derive(Clone, Copy, Debug)]
struct Node {
    lo: Vec3,
    hi: Vec3,
    /// Leaf: first primitive index into `order`. Inner: index of the right
    /// child (the left child follows the node).
    start: u32,
    count: u32,
}

#[derive(Clone, Debug, Default)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

impl Bvh {
    pub fn build(bounds: &[(Vec3, Vec3)]) -> Bvh {
        if bounds.is_empty() {
            return Bvh::default();
        }
        let centroids: Vec<Vec3> = bounds.iter().map(|(lo, hi)| (lo + hi) * 0.5).collect();
        let mut order: Vec<u32> = (0..bounds.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * bounds.len() / LEAF_SIZE + 1);
        build_rec(bounds, &centroids, &mut order, 0, &mut nodes);
        Bvh { nodes, order }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Visits every primitive whose box the ray enters before `t_max`.
    /// `visit` returns a new upper bound for the search (or the old one).
    pub fn traverse(&self, ray: &Ray, t_min: f64, mut t_max: f64, mut visit: impl FnMut(u32, f64) -> Option<f64>) {
        if self.nodes.is_empty() {
            return;
        }
        let inv = Vec3::new(1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z);
        let mut stack = [0u32; 64];
        let mut sp = 1;
        while sp > 0 {
            sp -= 1;
            let node = &self.nodes[stack[sp] as usize];
            if !slab(&node.lo, &node.hi, ray, &inv, t_min, t_max) {
                continue;
            }
            if node.count > 0 {
                for &p in &self.order[node.start as usize..(node.start + node.count) as usize] {
                    if let Some(t) = visit(p, t_max) {
                        t_max = t_max.min(t);
                    }
                }
            } else {
                let here = stack[sp] as usize;
                // the stack depth is bounded by the tree height
                stack[sp] = node.start;
                stack[sp + 1] = here as u32 + 1;
                sp += 2;
            }
        }
    }
}

fn build_rec(bounds: &[(Vec3, Vec3)], centroids: &[Vec3], order: &mut [u32], offset: usize, nodes: &mut Vec<Node>) -> usize {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    let mut clo = lo;
    let mut chi = hi;
    for &i in order.iter() {
        let (a, b) = &bounds[i as usize];
        lo = lo.inf(a);
        hi = hi.sup(b);
        clo = clo.inf(&centroids[i as usize]);
        chi = chi.sup(&centroids[i as usize]);
    }
    let id = nodes.len();
    nodes.push(Node { lo, hi, start: offset as u32, count: order.len() as u32 });
    if order.len() <= LEAF_SIZE {
        return id;
    }
    let ext = chi - clo;
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        centroids[a as usize][axis].total_cmp(&centroids[b as usize][axis]).then(a.cmp(&b))
    });
    let (left, right) = order.split_at_mut(mid);
    build_rec(bounds, centroids, left, offset, nodes);
    let r = build_rec(bounds, centroids, right, offset + mid, nodes);
    nodes[id].start = r as u32;
    nodes[id].count = 0;
    id
}

fn slab(lo: &Vec3, hi: &Vec3, ray: &Ray, inv: &Vec3, t_min: f64, t_max: f64) -> bool {
    let mut t0 = t_min;
    let mut t1 = t_max;
    for k in 0..3 {
        let a = (lo[k] - ray.origin[k]) * inv[k];
        let b = (hi[k] - ray.origin[k]) * inv[k];
        let (near, far) = if a <= b { (a, b) } else { (b, a) };
        // NaN from 0 * inf means the ray lies in the slab plane; keep it
        if near > t0 {
            t0 = near;
        }
        if far < t1 {
            t1 = far;
        }
        if t0 > t1 {
            return false;
        }
    }
    true
}
