use std::f64::consts::PI;

use nalgebra::DMatrix;
use ndarray::{Array1, Array2};
use num_rational::Rational64;
use proptest::prelude::*;

use nnnchain::chain::{build_hamiltonian, build_j_operator, coupling_profile, operator_polynomial};
use nnnchain::krawtchouk::KrawtchoukTable;
use nnnchain::oracle::propagate_oracle;
use nnnchain::revival::{
    detect_revivals, predict_balanced_fr, predict_pst, scan, verify_prediction, EventKind,
    LEAKAGE_FLOOR,
};
use nnnchain::{ChainSpec, RationalRatio, RevivalKind, SpectralData};

fn max_abs(m: &Array2<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

fn rational() -> impl Strategy<Value = Rational64> {
    (1i64..=4).prop_flat_map(|den| (-8 * den..=8 * den).prop_map(move |num| Rational64::new(num, den)))
}

fn spec_up_to(n_max: usize) -> impl Strategy<Value = ChainSpec> {
    (1..=n_max, rational(), rational()).prop_map(|(n, a, b)| ChainSpec::new(n, a, b).unwrap())
}

#[test]
fn eigenvectors_diagonalize_j() {
    for n in 1..=40 {
        let table = KrawtchoukTable::new(n).unwrap();
        let o = table.eigenvector_matrix();
        let j = build_j_operator(n).unwrap().0;
        let residual = j.dot(&o) - &o * &Array1::from(table.grid.clone());
        assert!(max_abs(&residual) < 1e-9, "N = {n}");
        let gram = o.t().dot(&o) - Array2::<f64>::eye(n + 1);
        assert!(max_abs(&gram) < 1e-9, "N = {n}");
    }
}

#[test]
fn j_spectrum_matches_general_eigensolver() {
    for n in 1..=40 {
        let j = build_j_operator(n).unwrap().0;
        let m = DMatrix::from_fn(n + 1, n + 1, |r, c| j[[r, c]]);
        let mut eig: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (s, e) in eig.iter().enumerate() {
            let expected = s as f64 - n as f64 / 2.0;
            assert!((e - expected).abs() < 1e-10, "N = {n}, s = {s}: {e} vs {expected}");
        }
    }
}

#[test]
fn hamiltonian_eigen_residual() {
    for n in 1..=40 {
        let spec = ChainSpec::new(n, Rational64::new(-7, 3), Rational64::new(5, 2)).unwrap();
        assert!(SpectralData::new(&spec).unwrap().residual() < 1e-9, "N = {n}");
    }
}

#[test]
fn nn_energies_are_equally_spaced() {
    let spec = ChainSpec::new(9, Rational64::from_integer(0), Rational64::new(3, 2)).unwrap();
    let d = SpectralData::new(&spec).unwrap();
    for (s, e) in d.energies.iter().enumerate() {
        assert_eq!(*e, 1.5 * (s as f64 - 4.5));
    }
}

#[test]
fn predictor_agrees_with_simulation() {
    for p in -5..=5i64 {
        for q in 1..=5i64 {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            let ratio = RationalRatio::new(p, q).unwrap();
            for n in 1..=12usize {
                let spec = ChainSpec::new(n, Rational64::new(p, q), Rational64::from_integer(1)).unwrap();
                for prediction in [predict_pst(ratio, n), predict_balanced_fr(ratio, n)] {
                    if prediction.kind != RevivalKind::None {
                        let report = verify_prediction(&spec, &prediction, 1e-7).unwrap();
                        assert!(report.pass, "p={p} q={q} N={n}: {report:?}");
                    }
                }
                if p % 2 != 0 && predict_pst(ratio, n).kind == RevivalKind::None {
                    let d = SpectralData::new(&spec).unwrap();
                    let (_, nu) = d.end_amplitudes(PI * q as f64).unwrap();
                    assert!(nu.norm_sqr() < 1.0 - 1e-3, "p={p} q={q} N={n}");
                }
            }
        }
    }
}

#[test]
fn nn_pst_recurs_at_odd_multiples() {
    for n in [2, 5, 8] {
        let s = scan(&ChainSpec::from_ints(n, 0, 1).unwrap(), 4.0 * PI, 4001).unwrap();
        let events = detect_revivals(&s, 1e-6).unwrap();
        let pst: Vec<f64> = events.iter().filter(|e| e.kind == EventKind::Pst).map(|e| e.time).collect();
        let step = 4.0 * PI / 4000.0;
        assert_eq!(pst.len(), 2, "N = {n}: {events:?}");
        assert!((pst[0] - PI).abs() <= step);
        assert!((pst[1] - 3.0 * PI).abs() <= step);
    }
}

#[test]
fn detection_is_stable_under_refinement() {
    let specs = [
        ChainSpec::from_ints(1, 1, 1).unwrap(),
        ChainSpec::from_ints(3, 1, 1).unwrap(),
        ChainSpec::from_ints(5, 0, 1).unwrap(),
        ChainSpec::new(4, Rational64::new(1, 2), Rational64::from_integer(1)).unwrap(),
    ];
    for spec in specs {
        let coarse_steps = 1601;
        let t_max = 4.0 * PI;
        let step = t_max / (coarse_steps - 1) as f64;
        let coarse = detect_revivals(&scan(&spec, t_max, coarse_steps).unwrap(), 1e-6).unwrap();
        let fine_steps = 2 * (coarse_steps - 1) + 1;
        let fine = detect_revivals(&scan(&spec, t_max, fine_steps).unwrap(), 1e-6).unwrap();
        assert!(!coarse.is_empty(), "{spec}");
        assert_eq!(coarse.len(), fine.len(), "{spec}: {coarse:?} vs {fine:?}");
        for (c, f) in coarse.iter().zip(&fine) {
            assert_eq!(c.kind, f.kind, "{spec}");
            assert!((c.time - f.time).abs() <= step, "{spec}");
        }
    }
}

#[test]
fn scans_are_deterministic() {
    let spec = ChainSpec::new(11, Rational64::new(3, 5), Rational64::new(-4, 3)).unwrap();
    assert_eq!(scan(&spec, 17.0, 3001).unwrap(), scan(&spec, 17.0, 3001).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_identity(spec in spec_up_to(40)) {
        let h = build_hamiltonian(&spec);
        prop_assert!(h.max_abs_diff(&operator_polynomial(&spec).unwrap()) < 1e-12);
        prop_assert!(h.bandwidth() <= 2);
        prop_assert_eq!(h.as_array(), &h.as_array().t());
    }

    #[test]
    fn profile_mirror_symmetry(spec in spec_up_to(40)) {
        let p = coupling_profile(&spec);
        for arr in [&p.j1, &p.j2, &p.b] {
            for (a, b) in arr.iter().zip(arr.iter().rev()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
        if spec.alpha == Rational64::from_integer(0) {
            prop_assert!(p.j2.iter().chain(&p.b).all(|v| *v == 0.0));
        }
    }

    #[test]
    fn oracle_matches_spectral(spec in spec_up_to(20), t in -10.0 * PI..10.0 * PI, site_frac in 0.0..1.0f64) {
        let site = ((spec.n_max as f64 + 1.0) * site_frac) as usize % (spec.n_max + 1);
        let fast = SpectralData::new(&spec).unwrap().propagate(site, t).unwrap();
        let slow = propagate_oracle(&spec, site, t).unwrap();
        prop_assert!(fast.max_abs_diff(&slow) < 1e-9);
        prop_assert!((fast.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((slow.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn time_composition(spec in spec_up_to(30), t1 in -20.0..20.0f64, t2 in -20.0..20.0f64) {
        let d = SpectralData::new(&spec).unwrap();
        let direct = d.propagate(0, t1 + t2).unwrap();
        let stepped = d.evolve(&d.propagate(0, t1).unwrap(), t2).unwrap();
        prop_assert!(direct.max_abs_diff(&stepped) < 1e-10);
    }

    #[test]
    fn unitarity(spec in spec_up_to(40), t in -100.0..100.0f64) {
        let d = SpectralData::new(&spec).unwrap();
        for site in [0, spec.n_max / 2, spec.n_max] {
            prop_assert!((d.propagate(site, t).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn leakage_stays_in_range(spec in spec_up_to(25), t_max in 0.1..50.0f64) {
        let s = scan(&spec, t_max, 257).unwrap();
        prop_assert!((s.mu_sq[0] - 1.0).abs() < 1e-12);
        prop_assert!(s.leakage.iter().all(|l| *l >= LEAKAGE_FLOOR && *l <= 1.0));
    }
}
