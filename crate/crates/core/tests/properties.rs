use proptest::prelude::*;
use tlchan_core::channels::{DensityMatrix, QuantumChannel, TlChannel, Traced};
use tlchan_core::infoquant::von_neumann_entropy;
use tlchan_core::linalg::{
    c, hermitian_eigenvalues, random_density, random_pure_state, random_unitary, stream_rng, CMat, Factor,
};
use tlchan_core::qalg::{is_admissible, theta_net_raw, AdmissibleTriple, GroupSpec};
use tlchan_core::structure::partial_transpose;
use tlchan_core::TlRep;

fn group() -> impl Strategy<Value = GroupSpec> {
    prop_oneof![
        Just(GroupSpec::su2()),
        (2usize..6).prop_map(|n| GroupSpec::on_plus(n).unwrap())
    ]
}

// small enough for dense Choi eigensolves
fn small_group() -> impl Strategy<Value = GroupSpec> {
    prop_oneof![
        Just(GroupSpec::su2()),
        (2usize..=3).prop_map(|n| GroupSpec::on_plus(n).unwrap())
    ]
}

fn triple(max: usize) -> impl Strategy<Value = AdmissibleTriple> {
    let all = AdmissibleTriple::all_up_to(max);
    (0..all.len()).prop_map(move |i| all[i])
}

fn traced() -> impl Strategy<Value = Traced> {
    prop_oneof![Just(Traced::Left), Just(Traced::Right)]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantum_integer_recursion(g in group(), k in 1usize..=20) {
        let lhs = g.quantum_integer(2) * g.quantum_integer(k);
        let rhs = g.quantum_integer(k + 1) + g.quantum_integer(k - 1);
        prop_assert!(rel(lhs, rhs) <= 1e-10);
    }

    #[test]
    fn dimensions_are_integers(n in 2usize..=10, k in 0usize..=12) {
        let x = GroupSpec::on_plus(n).unwrap().quantum_integer(k + 1);
        prop_assert!((x - x.round()).abs() <= 1e-6);
    }

    #[test]
    fn theta_is_symmetric(g in group(), t in triple(6)) {
        let base = g.theta(t);
        let q = g.q;
        for (a, b, cc) in [(t.k, t.m, t.l), (t.l, t.k, t.m), (t.l, t.m, t.k), (t.m, t.k, t.l), (t.m, t.l, t.k)] {
            prop_assert!(is_admissible(a, b, cc));
            prop_assert!(rel(theta_net_raw(a, b, cc, q).unwrap(), base) <= 1e-10);
        }
    }

    #[test]
    fn partial_transpose_is_an_involution(d1 in 1usize..4, d2 in 1usize..4, seed in any::<u64>()) {
        let m = random_density(d1 * d2, &mut stream_rng(seed, 0));
        for f in [Factor::First, Factor::Second] {
            let back = partial_transpose(&partial_transpose(&m, d1, d2, f).unwrap(), d1, d2, f).unwrap();
            prop_assert!((back - &m).norm() <= 1e-14);
        }
    }

    #[test]
    fn entropy_is_unitarily_invariant(d in 1usize..7, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let rho = random_density(d, &mut rng);
        let u = random_unitary(d, &mut rng);
        let rotated: CMat = &u * &rho * u.adjoint();
        let h0 = von_neumann_entropy(&rho).unwrap();
        let h1 = von_neumann_entropy(&rotated).unwrap();
        prop_assert!((h0 - h1).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn channels_are_cptp_and_unital(g in small_group(), t in triple(3), side in traced(), seed in any::<u64>()) {
        let rep = TlRep::new(g);
        let ch = TlChannel::build(&rep, t, side).unwrap();
        let choi = ch.choi_matrix(true);
        prop_assert!(hermitian_eigenvalues(&choi)[0] >= -1e-10);

        let rho = DensityMatrix::single(random_density(ch.d_in(), &mut stream_rng(seed, 0))).unwrap();
        let out = ch.apply(&rho).unwrap();
        prop_assert!((out.rho.trace() - c(1.0)).norm() <= 1e-10);

        let mixed = ch.apply(&DensityMatrix::maximally_mixed(ch.d_in())).unwrap();
        let want = CMat::identity(ch.d_out(), ch.d_out()) / c(ch.d_out() as f64);
        prop_assert!((mixed.rho - want).norm() <= 1e-10);
    }

    #[test]
    fn complementary_outputs_share_spectra(g in small_group(), t in triple(3), side in traced(), seed in any::<u64>()) {
        let rep = TlRep::new(g);
        let ch = TlChannel::build(&rep, t, side).unwrap();
        let psi = DensityMatrix::pure(&random_pure_state(ch.d_in(), &mut stream_rng(seed, 0))).unwrap();
        let nonzero = |m: &CMat| {
            let mut v: Vec<f64> = hermitian_eigenvalues(m).into_iter().filter(|x| *x > 1e-9).collect();
            v.sort_by(|a, b| b.total_cmp(a));
            v
        };
        let a = nonzero(&ch.apply(&psi).unwrap().rho);
        let b = nonzero(&ch.complementary().apply(&psi).unwrap().rho);
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-8);
        }
    }
}

proptest! {
    // the 4/N² constant stops holding once l + m reaches 8
    #[test]
    fn dimension_ratio_approaches_one(t in triple(3)) {
        let devs: Vec<f64> = [5usize, 10, 20, 40]
            .iter()
            .map(|&n| {
                let g = GroupSpec::on_plus(n).unwrap();
                ((n as f64).powi(t.r() as i32) * g.quantum_integer(t.k + 1) / g.theta(t) - 1.0).abs()
            })
            .collect();
        prop_assert!(devs.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{t}: {devs:?}");
        prop_assert!(devs[3] <= 4.0 / 1600.0, "{t}: {devs:?}");
    }
}
