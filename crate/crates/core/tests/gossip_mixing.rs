mod common;

use plopt_core::gossip::{acc_gossip, GossipConfig};
use plopt_core::numkit::{DenseMatrix, RandomStream};
use plopt_core::objectives::OracleMeter;
use plopt_core::topology::{laplacian_mixing, mixing_for_gap, validate_mixing};
use proptest::prelude::*;

fn random_matrix(n: usize, d: usize, rng: &mut RandomStream) -> DenseMatrix {
    DenseMatrix::from_vec(n, d, (0..n * d).map(|_| 3.0 * rng.standard_normal()).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_mixing_satisfies_every_clause(n in 2usize..14, extra in 0usize..20, seed in any::<u64>()) {
        let mut rng = RandomStream::new(seed);
        let g = common::random_connected(n, extra, &mut rng);
        let w = laplacian_mixing(&g).unwrap();
        let report = validate_mixing(&w, &g, w.gap());
        prop_assert!(report.passed(), "{report:?}");
        prop_assert!(w.gap() > 0.0 && w.gap() <= 1.0 + 1e-12);
    }

    #[test]
    fn gossip_preserves_mean_and_contracts(
        n in 2usize..12,
        extra in 0usize..12,
        d in 1usize..5,
        k in 0usize..40,
        seed in any::<u64>(),
    ) {
        let mut rng = RandomStream::new(seed);
        let g = common::random_connected(n, extra, &mut rng);
        let w = laplacian_mixing(&g).unwrap();
        let y0 = random_matrix(n, d, &mut rng);
        let cfg = GossipConfig::new(&w, k);
        let mut meter = OracleMeter::new(n, 1.5);
        let yk = acc_gossip(&y0, &w, &cfg, &mut meter).unwrap();
        prop_assert_eq!(meter.comm_rounds(), k as u64);
        prop_assert_eq!(meter.lfo_total(), 0);

        let m0 = y0.row_mean();
        let mk = yk.row_mean();
        let drift = plopt_core::numkit::dist2(&m0, &mk);
        prop_assert!(drift <= 1e-10 * y0.frobenius_norm(), "drift {drift}");

        let dev0 = y0.deviation_from_mean();
        let devk = DenseMatrix::broadcast_row(n, &m0).frobenius_distance(&yk);
        prop_assert!(devk <= cfg.rho * dev0 + 1e-10 * y0.frobenius_norm(), "{devk} vs {}", cfg.rho * dev0);
    }

    #[test]
    fn gap_targets_are_hit_from_above(exp in -3.0f64..0.0) {
        let gamma = 10f64.powf(exp);
        let c = mixing_for_gap(gamma, 1e-9).unwrap();
        prop_assert!(c.mixing.gap() >= gamma * (1.0 - 1e-12));
        prop_assert!(c.mixing.gap() - gamma <= 1e-8);
        let report = validate_mixing(&c.mixing, &c.graph, gamma);
        prop_assert!(report.passed(), "{report:?}");
    }
}

#[test]
fn consensus_input_is_a_fixed_point_up_to_rounding() {
    let g = plopt_core::topology::Graph::ring(9).unwrap();
    let w = laplacian_mixing(&g).unwrap();
    let y = DenseMatrix::broadcast_row(9, &[1.0, -2.0, 1e3]);
    let out = acc_gossip(&y, &w, &GossipConfig::new(&w, 60), &mut OracleMeter::new(9, 0.0)).unwrap();
    assert!(out.frobenius_distance(&y) <= 1e-12 * y.frobenius_norm());
}
