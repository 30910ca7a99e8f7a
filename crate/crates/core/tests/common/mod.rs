#![allow(dead_code)]

use flatmod_core::form::{Point, Tangent};
use flatmod_core::lie::{sample_group, sample_unit_algebra, AlgebraElement, GroupElement, C64};
use rand_chacha::ChaCha8Rng;

pub fn groups(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<GroupElement> {
    (0..count).map(|_| sample_group(n, rng)).collect()
}

pub fn group_point(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Point {
    Point::groups(groups(n, count, rng))
}

pub fn lie_tangent(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Tangent {
    Tangent::lie((0..count).map(|_| sample_unit_algebra(n, rng)).collect())
}

pub fn lie_tangents(n: usize, count: usize, arity: usize, rng: &mut ChaCha8Rng) -> Vec<Tangent> {
    (0..arity).map(|_| lie_tangent(n, count, rng)).collect()
}

pub fn unit(n: usize, rng: &mut ChaCha8Rng) -> AlgebraElement {
    sample_unit_algebra(n, rng)
}

pub fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol
}
