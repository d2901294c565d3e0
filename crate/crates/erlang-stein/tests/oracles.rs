mod common;

use common::{oracle_kolmogorov, oracle_wasserstein, OracleChain, OracleDiffusion};
use erlang_stein::ctmc::stationary_pmf;
use erlang_stein::diffusion::DiffusionDensity;
use erlang_stein::metrics::{kolmogorov_distance, wasserstein_distance};
use erlang_stein::ModelParams;

fn spot_checks() -> Vec<ModelParams> {
    vec![
        ModelParams::new(4.9, 1.0, 5, 0.0).unwrap(),
        ModelParams::new(45.0, 1.0, 50, 0.0).unwrap(),
        ModelParams::new(499.5, 1.0, 500, 0.0).unwrap(),
        ModelParams::new(90.0, 1.0, 100, 0.5).unwrap(),
        ModelParams::new(10.0, 1.0, 5, 2.0).unwrap(),
    ]
}

#[test]
fn chain_pmf_matches_ratio_recursion() {
    for p in spot_checks() {
        let dist = stationary_pmf(p, 1e-14).unwrap();
        let oracle = OracleChain::new(p);
        let mut beyond = 0.0;
        for (i, q) in oracle.pmf.iter().enumerate() {
            let k = oracle.first + i;
            match dist.pmf.get(k) {
                Some(&got) => assert!((got - q).abs() <= 1e-11 * q.max(1e-3), "{p:?} k={k}: {got} vs {q}"),
                None => beyond += q,
            }
        }
        assert!(beyond <= dist.tail_bound * 1.01 + 1e-18, "{p:?}: {beyond} > {}", dist.tail_bound);
    }
}

#[test]
fn density_matches_drift_integral() {
    for p in spot_checks() {
        let d = DiffusionDensity::new(&p.derive()).unwrap();
        let o = OracleDiffusion::new(p);
        for i in 0..=200 {
            let x = o.lo + (o.hi - o.lo) * i as f64 / 200.0;
            let (got, want) = (d.pdf(x), o.pdf(x));
            assert!((got - want).abs() <= 1e-10 * want.max(1e-6), "{p:?} x={x}: {got} vs {want}");
            let (got, want) = (d.cdf(x), o.cdf(x));
            assert!((got - want).abs() <= 1e-10, "{p:?} x={x}: cdf {got} vs {want}");
        }
        assert!((d.mean - o.mean()).abs() <= 1e-10, "{p:?}");
    }
}

#[test]
fn distances_match_brute_force() {
    for p in spot_checks() {
        let dist = stationary_pmf(p, 1e-14).unwrap();
        let d = DiffusionDensity::new(&p.derive()).unwrap();
        let chain = OracleChain::new(p);
        let diff = OracleDiffusion::new(p);
        let (w, w_ref) = (wasserstein_distance(&dist, &d), oracle_wasserstein(&chain, &diff));
        let (k, k_ref) = (kolmogorov_distance(&dist, &d), oracle_kolmogorov(&chain, &diff, 100_000));
        assert!((w - w_ref).abs() <= 1e-8, "{p:?}: d_W {w} vs {w_ref}");
        assert!((k - k_ref).abs() <= 1e-9, "{p:?}: d_K {k} vs {k_ref}");
    }
}
