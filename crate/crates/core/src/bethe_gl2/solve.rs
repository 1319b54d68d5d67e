use crate::numkernel::{newton_solve, NewtonOptions};
use crate::{C64, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct MultistartOptions {
    pub starts: usize,
    pub seed: u64,
    /// log-uniform magnitude range for the random starts
    pub annulus: (f64, f64),
    pub cluster_tol: f64,
    pub newton: NewtonOptions,
    /// sizes of consecutive coordinate blocks that are each invariant under
    /// permutation (solutions are deduplicated up to these permutations)
    pub symmetry_blocks: Vec<usize>,
}

impl Default for MultistartOptions {
    fn default() -> Self {
        Self {
            starts: 200,
            seed: 1,
            annulus: (0.2, 4.0),
            cluster_tol: 1e-6,
            newton: NewtonOptions {
                tol: 1e-12,
                ..Default::default()
            },
            symmetry_blocks: Vec::new(),
        }
    }
}

fn canonical_key(z: &[C64], blocks: &[usize]) -> Vec<C64> {
    if blocks.is_empty() {
        return z.to_vec();
    }
    let mut out = Vec::with_capacity(z.len());
    let mut at = 0usize;
    for &b in blocks {
        let mut chunk: Vec<C64> = z[at..at + b].to_vec();
        chunk.sort_by(|a, c| {
            (a.re, a.im)
                .partial_cmp(&(c.re, c.im))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        out.extend(chunk);
        at += b;
    }
    out.extend_from_slice(&z[at..]);
    out
}

/// Multi-start damped Newton over C^dim. Starts are drawn log-uniformly in an
/// annulus from a seeded stream; results are deduplicated up to the declared
/// block permutations and returned in a deterministic canonical order.
pub fn multistart_newton<F>(f: &F, dim: usize, opts: &MultistartOptions) -> Vec<Vec<C64>>
where
    F: Fn(&[C64]) -> Result<Vec<C64>> + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec<C64>> = (0..opts.starts)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let r = rng.gen_range(opts.annulus.0.ln()..opts.annulus.1.ln()).exp();
                    let th = rng.gen_range(0.0..std::f64::consts::TAU);
                    C64::from_polar(r, th)
                })
                .collect()
        })
        .collect();

    let found: Vec<Vec<C64>> = starts
        .par_iter()
        .filter_map(|start| newton_solve(f, start, &opts.newton).ok())
        .collect();

    // deterministic merge: canonicalize, sort, dedup within cluster_tol
    let mut keyed: Vec<Vec<C64>> = found
        .into_iter()
        .map(|z| canonical_key(&z, &opts.symmetry_blocks))
        .collect();
    keyed.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b.iter()) {
            match (x.re, x.im).partial_cmp(&(y.re, y.im)) {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(o) => return o,
            }
        }
        std::cmp::Ordering::Equal
    });
    let mut out: Vec<Vec<C64>> = Vec::new();
    'next: for z in keyed {
        for kept in &out {
            let dist = z
                .iter()
                .zip(kept.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if dist <= opts.cluster_tol * (1.0 + kept.iter().map(|c| c.norm()).fold(0.0, f64::max))
            {
                continue 'next;
            }
        }
        out.push(z);
    }
    out
}
