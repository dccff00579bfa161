#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use zeronorm::format::parse_instance;
use zeronorm_core::rat::{int, ratio};
use zeronorm_core::{MatQ, ProblemInstance, Rat, VecQ};

pub fn example() -> ProblemInstance {
    parse_instance(include_str!("../../data/example.json")).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `|p| <= 10`, `1 <= q <= 10`.
pub fn small_rat(rng: &mut ChaCha8Rng) -> Rat {
    ratio(rng.gen_range(-10..=10), rng.gen_range(1..=10))
}

/// Entries from `{-1, 0, 1, 2}`, which makes rank deficiency and
/// degenerate constraints common.
pub fn tiny_int(rng: &mut ChaCha8Rng) -> Rat {
    int(*[-1, 0, 0, 1, 2].choose(rng).unwrap())
}

pub fn matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, coarse: bool) -> MatQ {
    let data = (0..rows * cols)
        .map(|_| if coarse { tiny_int(rng) } else { small_rat(rng) })
        .collect();
    MatQ::from_vec(rows, cols, data)
}

/// Random feasible instance with `n <= 6`, `m <= 4`, `l <= 3` and
/// `epsilon` in `{0, 1/10, 1}`. A sparse point `x0` is planted; `y` is
/// `A x0` plus an optional error on the ball boundary or inside it, and
/// `b = B x0 + slack` with some slacks zero.
pub fn random_instance(rng: &mut ChaCha8Rng) -> ProblemInstance {
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(1..=4);
    let l = rng.gen_range(0..=3);
    let coarse = rng.gen_bool(0.5);
    let a = matrix(rng, m, n, coarse);
    let b_mat = matrix(rng, l, n, coarse);
    let epsilon = [int(0), ratio(1, 10), int(1)].choose(rng).unwrap().clone();
    let k = rng.gen_range(1..=n);
    let mut support: Vec<usize> = (0..n).collect();
    support.shuffle(rng);
    let mut x0: VecQ = vec![int(0); n];
    for &i in &support[..k] {
        x0[i] = loop {
            let v = if coarse { tiny_int(rng) } else { small_rat(rng) };
            if v != int(0) {
                break v;
            }
        };
    }
    let mut y = a.mul_vec(&x0);
    match rng.gen_range(0..3) {
        1 => {
            let i = rng.gen_range(0..m);
            y[i] += &epsilon;
        }
        2 => {
            let i = rng.gen_range(0..m);
            y[i] -= &epsilon / int(2);
        }
        _ => {}
    }
    let mut b = b_mat.mul_vec(&x0);
    for v in &mut b {
        if rng.gen_bool(0.5) {
            *v += ratio(rng.gen_range(1..=10), rng.gen_range(1..=10));
        }
    }
    ProblemInstance::new(a, b_mat, y, b, epsilon).unwrap()
}

pub fn corpus(count: usize, seed: u64) -> Vec<ProblemInstance> {
    let mut r = rng(seed);
    (0..count).map(|_| random_instance(&mut r)).collect()
}

pub fn to_f64s(v: &[Rat]) -> Vec<f64> {
    v.iter().map(zeronorm_core::rat::to_f64).collect()
}
