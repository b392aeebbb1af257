#![allow(dead_code)]

use flat_torus::postype::WeightFunction;
use flat_torus::Lattice;
use nalgebra::Matrix2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn condition(m: &Matrix2<f64>) -> f64 {
    let s = m.singular_values();
    s.max() / s.min()
}

/// A 2D basis with entries uniform in `[-range, range]` and condition number
/// at most `max_cond`.
pub fn random_basis(rng: &mut ChaCha8Rng, range: f64, max_cond: f64) -> [[f64; 2]; 2] {
    loop {
        let b = [
            [rng.gen_range(-range..=range), rng.gen_range(-range..=range)],
            [rng.gen_range(-range..=range), rng.gen_range(-range..=range)],
        ];
        let m = Matrix2::new(b[0][0], b[0][1], b[1][0], b[1][1]);
        if m.determinant().abs() > 1e-9 && condition(&m) <= max_cond {
            return b;
        }
    }
}

pub fn lattice(rows: [[f64; 2]; 2]) -> Lattice {
    Lattice::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).unwrap()
}

pub fn random_lattice(rng: &mut ChaCha8Rng, range: f64, max_cond: f64) -> Lattice {
    lattice(random_basis(rng, range, max_cond))
}

/// The 500-lattice suite: entries in `[-10, 10]`, condition number ≤ 1e4.
pub fn suite() -> Vec<Lattice> {
    let mut r = rng(0x005e_ed2d);
    (0..500).map(|_| random_lattice(&mut r, 10.0, 1e4)).collect()
}

/// Up to `max_pairs` random pairs with coordinates in `[-radius, radius]`
/// and weights in `(0, 1]`.
pub fn random_weights(rng: &mut ChaCha8Rng, dual: Lattice, radius: i64, max_pairs: usize) -> WeightFunction {
    let mut z = WeightFunction::new(dual);
    let pairs = rng.gen_range(1..=max_pairs);
    while z.len() < pairs {
        let u = [rng.gen_range(-radius..=radius), rng.gen_range(-radius..=radius)];
        if u == [0, 0] {
            continue;
        }
        let w: f64 = 1.0 - rng.gen::<f64>();
        z.set(&u, w).unwrap();
    }
    z
}

pub fn z2() -> Lattice {
    lattice([[1.0, 0.0], [0.0, 1.0]])
}

pub fn a2() -> Lattice {
    lattice([[1.0, 0.0], [-0.5, 3f64.sqrt() / 2.0]])
}
