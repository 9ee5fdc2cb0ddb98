#![allow(dead_code)]

use fairpid::dist::{Alphabet, JointDist};
use ndarray::Array3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

pub fn dist_from(shape: [usize; 3], weights: Vec<f64>) -> JointDist {
    let probs = Array3::from_shape_vec((shape[0], shape[1], shape[2]), weights).unwrap();
    JointDist::from_weights(shape.map(Alphabet::numbered), probs).unwrap()
}

/// Dense random joint; with `sparse`, about a third of the cells are zeroed.
pub fn random_dist<R: Rng>(rng: &mut R, shape: [usize; 3], sparse: bool) -> JointDist {
    let n = shape.iter().product();
    let mut w = simplex(rng, n);
    if sparse {
        for x in w.iter_mut() {
            if rng.random::<f64>() < 0.33 {
                *x = 0.0;
            }
        }
        if w.iter().all(|&x| x == 0.0) {
            w[0] = 1.0;
        }
    }
    dist_from(shape, w)
}

/// `Z → Y → Ŷ`: `Ŷ` is a random garbling of `Y`, so `Y` is Blackwell
/// sufficient for `Ŷ` with respect to `Z`.
pub fn garbled_dist<R: Rng>(rng: &mut R, shape: [usize; 3]) -> JointDist {
    let [nz, nyh, ny] = shape;
    let pzy = simplex(rng, nz * ny);
    let k: Vec<Vec<f64>> = (0..ny).map(|_| simplex(rng, nyh)).collect();
    let mut w = vec![0.0; nz * nyh * ny];
    for z in 0..nz {
        for yh in 0..nyh {
            for y in 0..ny {
                w[(z * nyh + yh) * ny + y] = pzy[z * ny + y] * k[y][yh];
            }
        }
    }
    dist_from(shape, w)
}

pub fn random_shape<R: Rng>(rng: &mut R, lo: usize, hi: usize) -> [usize; 3] {
    [0; 3].map(|_| rng.random_range(lo..=hi))
}

/// Mixed corpus: dense, sparse and garbled joints with alphabets 2..=4.
pub fn corpus(seed: u64, n: usize) -> Vec<JointDist> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let shape = random_shape(&mut r, 2, 4);
            match i % 3 {
                0 => random_dist(&mut r, shape, false),
                1 => random_dist(&mut r, shape, true),
                _ => garbled_dist(&mut r, shape),
            }
        })
        .collect()
}

/// Proptest strategy over joints with alphabet sizes in `2..=max`, with
/// some cells exactly zero.
pub fn joint(max: usize) -> impl Strategy<Value = JointDist> {
    (2..=max, 2..=max, 2..=max).prop_flat_map(|(a, b, c)| {
        let cell = prop_oneof![1 => Just(0.0), 4 => 0.001f64..1.0];
        proptest::collection::vec(cell, a * b * c).prop_filter_map("all-zero weights", move |w| {
            if w.iter().sum::<f64>() > 0.0 {
                Some(dist_from([a, b, c], w))
            } else {
                None
            }
        })
    })
}

/// Binary entropy in bits, written out independently of the library.
pub fn h2(p: f64) -> f64 {
    let t = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    t(p) + t(1.0 - p)
}

/// Plug-in `I(X;Y)` in bits of a 2-D table given as rows.
pub fn mi_table(t: &[Vec<f64>]) -> f64 {
    let rows: Vec<f64> = t.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..t[0].len()).map(|j| t.iter().map(|r| r[j]).sum()).collect();
    let mut s = 0.0;
    for (i, r) in t.iter().enumerate() {
        for (j, &p) in r.iter().enumerate() {
            if p > 0.0 {
                s += p * (p / (rows[i] * cols[j])).log2();
            }
        }
    }
    s
}

/// `P(z) P(yhat, y)`: Z independent of everything else.
pub fn independent_triple(seed: u64, shape: [usize; 3]) -> JointDist {
    let mut r = rng(seed);
    let pz = simplex(&mut r, shape[0]);
    let rest = simplex(&mut r, shape[1] * shape[2]);
    let w = pz.iter().flat_map(|a| rest.iter().map(move |b| a * b)).collect();
    dist_from(shape, w)
}
