//! End-to-end flows across modules: generated configurations fed through the
//! weight solver and the volume counting chain.

use num_rational::BigRational;

use jointslab::algebra::FieldDesc;
use jointslab::generators::bollobas_eccles_configuration;
use jointslab::optimize::{counting_report, solve_z, weight_state};
use jointslab::setsys::packing_number;

#[test]
fn solved_weights_on_the_projected_six_joint_configuration() {
    // d = 4, J = 6, L = 12: the common load is (dJ - L)/J = 2
    let cfg = bollobas_eccles_configuration(FieldDesc::Rational, 0).unwrap();
    let report = solve_z(&cfg, 1e-9, 100_000, 128).unwrap();
    assert!(report.converged);
    assert!(report.residual_f64 < 1e-9);
    assert_eq!(report.sigma_target, vec!["2".to_string()]);
    assert!(report.energy_decay_ok);

    // exact sigma values at the solved weights cluster around 2
    let z: Vec<BigRational> = report
        .z
        .iter()
        .map(|s| {
            FieldDesc::Rational
                .parse_scalar(s)
                .unwrap()
                .as_ratio()
                .unwrap()
                .clone()
        })
        .collect();
    let state = weight_state(&cfg, &z).unwrap();
    for sigma in &state.sigma {
        let err = (jointslab::BigFloat::from_rational(sigma, 96).to_f64() - 2.0).abs();
        assert!(err < 1e-9, "sigma = {sigma}");
    }
}

#[test]
fn counting_report_on_the_six_joint_configuration_has_strict_slack() {
    let cfg = bollobas_eccles_configuration(FieldDesc::Rational, 0).unwrap();
    let solved = solve_z(&cfg, 1e-9, 100_000, 128).unwrap();
    let z: Vec<BigRational> = solved
        .z
        .iter()
        .map(|s| {
            FieldDesc::Rational
                .parse_scalar(s)
                .unwrap()
                .as_ratio()
                .unwrap()
                .clone()
        })
        .collect();
    let report = counting_report(&cfg, &z, 40).unwrap();
    assert!(report.exact_ok);
    assert!(report.pass);
    // slack is strict: 6 joints cannot reach the tight sum for d = 4
    let target = 1.0 / 24.0;
    assert!(report.sum_upper_f64 > target * (1.0 + 1e-6), "sum {}", report.sum_upper_f64);
    // the chain reports the 11.1848 bound and L = 12 clears it
    assert!((report.bound_l - 11.1848).abs() < 1e-3);
    assert!(report.chain_ok);
}

#[test]
fn packing_budget_exhaustion_reports_bounds() {
    // a first edge that blocks the optimal packing, so the greedy seed is
    // suboptimal and the search needs real nodes
    let g = jointslab::setsys::JointHypergraph {
        s: 3,
        m: vec![3],
        vertex_class: vec![0; 9],
        vertex_member: (0..9).map(|v| (0, v)).collect(),
        edges: vec![vec![0, 1, 2], vec![0, 3, 4], vec![1, 5, 6], vec![2, 7, 8]],
    };
    let full = packing_number(&g, 1_000_000);
    assert!(full.exact);
    assert_eq!(full.value(), 3);

    let cut = packing_number(&g, 2);
    assert!(!cut.exact);
    assert!(cut.lower >= 1 && cut.lower <= cut.upper);
    assert_eq!(cut.upper, 3); // vertex-count bound
}

#[test]
fn nonpositive_weights_are_rejected() {
    use num_bigint::BigInt;
    let z = vec![
        BigRational::from_integer(BigInt::from(1)),
        BigRational::from_integer(BigInt::from(0)),
    ];
    assert!(jointslab::vanishing::associated_timestamp(&z, 4).is_err());
}

#[test]
fn shared_hyperplane_count_is_symmetric() {
    use jointslab::config::shared_hyperplanes;
    use jointslab::generators::tight_configuration;
    for cfg in [
        tight_configuration(4, 3, FieldDesc::Rational, 5).unwrap().cfg,
        bollobas_eccles_configuration(FieldDesc::Rational, 1).unwrap(),
    ] {
        for a in 0..cfg.joints.len() {
            for b in a + 1..cfg.joints.len() {
                let collinear =
                    cfg.joints[a].lines.iter().any(|l| cfg.joints[b].lines.contains(l));
                if collinear {
                    assert_eq!(
                        shared_hyperplanes(&cfg, a, b).unwrap(),
                        shared_hyperplanes(&cfg, b, a).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn nu_chain_is_ordered() {
    // nu <= nu* <= |E(G)| on every hypergraph we build
    use jointslab::setsys::{construction_2_3, joint_hypergraph, nu_star, pair_partition_system};
    let mut graphs = vec![joint_hypergraph(&pair_partition_system(), &[1, 2, 3, 4, 5, 6])];
    let sys23 = construction_2_3();
    for p in sys23.joints.iter().take(4) {
        graphs.push(joint_hypergraph(&sys23, p));
    }
    for g in &graphs {
        let nu = packing_number(g, 1_000_000).value();
        let ns = nu_star(g, 1e-8, 3);
        let upper_estimate = ns.value * ns.log_gap.exp();
        assert!(upper_estimate >= nu as f64 - 1e-6);
        assert!(ns.value <= g.edge_count() as f64 + 1e-6);
    }
}

#[test]
fn certificates_replay() {
    use jointslab::setsys::construction_2_3;
    use std::collections::BTreeSet;
    let sys = construction_2_3();
    let report = sys.verify();
    assert!(report.ok);
    for (p, cert) in sys.joints.iter().zip(&report.certificates) {
        let cert = cert.as_ref().unwrap();
        let pset: BTreeSet<u32> = p.iter().copied().collect();
        let mut covered: BTreeSet<u32> = BTreeSet::new();
        for &(f, mi) in cert {
            let residual: BTreeSet<u32> = pset
                .iter()
                .copied()
                .filter(|e| !sys.families[f][mi].contains(e))
                .collect();
            assert!(!residual.is_empty());
            assert!(covered.is_disjoint(&residual), "residuals overlap");
            covered.extend(residual);
        }
        assert_eq!(covered, pset, "delta = 0 residuals partition the joint set");
    }
}

#[test]
fn order_counters_increment_at_their_own_events() {
    use num_bigint::BigInt;
    let z: Vec<BigRational> = [3i64, 1, 2]
        .iter()
        .map(|&v| BigRational::from_integer(BigInt::from(v)))
        .collect();
    let schedule = jointslab::vanishing::associated_timestamp(&z, 6).unwrap();
    for t in 1..=schedule.horizon() {
        let (event_joint, _) = schedule.events[t as usize - 1];
        for p in 0..3 {
            let step = schedule.order_at(p, t) - schedule.order_at(p, t - 1);
            assert_eq!(step, u32::from(p == event_joint));
        }
    }
}
