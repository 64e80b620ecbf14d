#[path = "common/oracles.rs"]
#[allow(dead_code)]
mod oracles;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use l1agg::dictionary::Dictionary;
use l1agg::gram::{coherence, correlation, eta, gram_pair, kappa, min_eigenvalue, GramPair};
use l1agg::measure::MeasureSpec;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kappa_matches_bisection(seed in any::<u64>(), m in 1usize..=50) {
        let psi = oracles::random_psd(m, seed);
        let k = kappa(&psi).unwrap();
        prop_assert!((k - oracles::kappa_bisection(&psi)).abs() <= 1e-10, "κ = {k}");
    }

    #[test]
    fn shifted_correlation_is_singular(seed in any::<u64>(), m in 2usize..=30) {
        let c = correlation(&oracles::random_psd(m, seed)).unwrap();
        let k = kappa(&c).unwrap();
        let shifted = &c - DMatrix::identity(m, m) * k;
        let lo = min_eigenvalue(&shifted).unwrap();
        prop_assert!(lo.abs() <= 1e-10, "λ_min = {lo}");
    }

    #[test]
    fn coherence_ignores_rescaling(seed in 0u64..1_000_000, m in 2usize..=12, j in 0usize..12, t in 0.01f64..100.0) {
        let j = j % m;
        let psi = oracles::random_psd(m, seed * 4 + 1);
        let mut scaled = psi.clone();
        for i in 0..m {
            scaled[(i, j)] *= t;
            scaled[(j, i)] *= t;
        }
        let support = [0, m - 1];
        let a = coherence(&psi, &support).unwrap();
        let b = coherence(&scaled, &support).unwrap();
        prop_assert!((a.rho_lambda - b.rho_lambda).abs() <= 1e-12);
        prop_assert!((&a.rho - &b.rho).amax() <= 1e-12);
    }

    #[test]
    fn eta_vanishes_only_on_equal_matrices(seed in any::<u64>(), m in 1usize..=10, i in 0usize..10, j in 0usize..10, d in -1.0f64..1.0) {
        let psi = oracles::random_psd(m, seed);
        let same = GramPair { psi_m: psi.clone(), psi_nm: psi.clone() };
        prop_assert_eq!(eta(&same).unwrap(), 0.0);
        let (i, j) = (i % m, j % m);
        let mut other = psi.clone();
        other[(i, j)] += d;
        other[(j, i)] = other[(i, j)];
        let e = eta(&GramPair { psi_m: psi.clone(), psi_nm: other.clone() }).unwrap();
        prop_assert_eq!(e == 0.0, psi == other);
    }
}

#[test]
fn empirical_fourier_gram_concentrates() {
    let dict = Dictionary::fourier(5).unwrap();
    let measure = MeasureSpec::uniform();
    let mut hits = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = measure.sample(dict.domain(), 10_000, &mut rng).unwrap();
        let design = dict.evaluate(&pts).unwrap();
        if eta(&gram_pair(&dict, &measure, &design).unwrap()).unwrap() < 0.1 {
            hits += 1;
        }
    }
    assert!(hits >= 99, "η < 0.1 on {hits}/100 seeds");
}

#[test]
fn quadrature_fourier_gram_matches_midpoint_rule() {
    for m in [3, 8, 17] {
        let pop = l1agg::population::Population::new(&Dictionary::fourier(m).unwrap(), &MeasureSpec::uniform()).unwrap();
        let reference = oracles::midpoint_fourier_gram(m, 20_000);
        assert!((pop.gram() - reference).amax() < 1e-8);
    }
}
