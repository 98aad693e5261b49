//! Exact metric quantities on the Cayley tree of a free group.
//!
//! All values are integers; they are returned as `f64` only at the model
//! boundary.

use super::word::{FreeWord, TreeRay};

/// `d(u, v) = |u^{-1} v|`.
pub fn tree_distance(u: &FreeWord, v: &FreeWord) -> usize {
    u.len() + v.len() - 2 * u.common_prefix_len(v)
}

/// `(m|p)_q`, the distance from `q` to the geodesic `[m, p]`.
pub fn tree_product(m: &FreeWord, p: &FreeWord, q: &FreeWord) -> usize {
    let qi = q.inverse();
    let (m, p) = (qi.mul(m), qi.mul(p));
    m.common_prefix_len(&p)
}

/// `(m|ξ)_q`.
pub fn tree_product_mixed(m: &FreeWord, xi: &TreeRay, q: &FreeWord) -> usize {
    let qi = q.inverse();
    xi.act(&qi).common_prefix_with_word(&qi.mul(m))
}

/// `(ξ|η)_q`; `None` when the rays coincide.
pub fn tree_product_boundary(xi: &TreeRay, eta: &TreeRay, q: &FreeWord) -> Option<usize> {
    let qi = q.inverse();
    xi.act(&qi).common_prefix_len(&eta.act(&qi))
}

/// `B_ξ(y, z) = (z|ξ)_y - (y|ξ)_z`.
pub fn tree_busemann(xi: &TreeRay, y: &FreeWord, z: &FreeWord) -> i64 {
    tree_product_mixed(z, xi, y) as i64 - tree_product_mixed(y, xi, z) as i64
}
