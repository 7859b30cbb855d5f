use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shelfmem::belief::*;

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

/// Reference moments via the mean/precision form, an algebraically
/// different route to the same quantities.
pub fn oracle_beta(alpha: f64, beta: f64) -> (f64, f64) {
    let m = alpha / (alpha + beta);
    (m, m * (1.0 - m) / (alpha + beta + 1.0))
}

pub fn closed_forms_on_ten_thousand_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let a = rng.gen_range(0.01..500.0);
        let b = rng.gen_range(0.01..500.0);
        let p = BetaParams::new(a, b).unwrap();
        let (m, v) = oracle_beta(a, b);
        assert!(close(beta_mean(p), m, 1e-12));
        assert!(close(beta_variance(p), v, 1e-12));

        let k = rng.gen_range(2..20);
        let lambdas: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..300.0)).collect();
        let d = DirichletParams::new(lambdas.clone()).unwrap();
        let s: f64 = lambdas.iter().rev().sum();
        let e = dirichlet_expectation(&d);
        for (ei, li) in e.iter().zip(&lambdas) {
            assert!(close(*ei, li / s, 1e-12));
        }
        assert!(close(e.iter().sum::<f64>(), 1.0, 1e-12));
        assert!(close(dirichlet_uncertainty(&d), k as f64 / s, 1e-12));
    }
}

/// Shuffled evidence sequences on a dyadic weight lattice fuse to
/// bit-identical parameters.
pub fn fusion_order_is_irrelevant(trials: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..trials {
        let n = rng.gen_range(0..40);
        let obs: Vec<(bool, usize, f64)> = (0..n)
            .map(|_| (rng.gen(), rng.gen_range(0..12), rng.gen_range(1..400) as f64 * 0.25))
            .collect();
        let fold = |seq: &[(bool, usize, f64)]| {
            seq.iter().fold(
                (BetaParams::PRIOR, DirichletParams::prior(12)),
                |(p, d), &(hit, c, w)| {
                    let e = if hit { Evidence::Hit } else { Evidence::Miss };
                    (
                        fuse_occupancy(p, e, w).unwrap(),
                        fuse_semantic(d, c, w).unwrap(),
                    )
                },
            )
        };
        let mut shuffled = obs.clone();
        shuffled.shuffle(&mut rng);
        assert_eq!(fold(&obs), fold(&shuffled));
    }
}
