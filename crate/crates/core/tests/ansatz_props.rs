use proptest::prelude::*;
use rlcompile_core::ansatz::{
    adjoint, build_ansatz, param_count, preset_depth, random_target, AnsatzSpec, ParamVector,
};
use rlcompile_core::rng::stream;
use rlcompile_core::sim::{Circuit, StateVector};

#[test]
fn parameter_counts() {
    assert_eq!(param_count(&AnsatzSpec::chain(2, 1).unwrap()), 3);
    assert_eq!(param_count(&AnsatzSpec::chain(5, 2).unwrap()), 18);
    assert_eq!(param_count(&AnsatzSpec::chain(10, 3).unwrap()), 57);
}

#[test]
fn preset_depths() {
    let got: Vec<usize> = [5, 10, 15, 20].iter().map(|&n| preset_depth(n)).collect();
    assert_eq!(got, vec![2, 3, 4, 5]);
}

#[test]
fn single_flip() {
    let spec = AnsatzSpec::chain(2, 1).unwrap();
    let c = build_ansatz(&spec, &[std::f64::consts::FRAC_PI_2, 0.0, 0.0]).unwrap();
    let mut s = StateVector::<f64>::zero(2);
    c.apply_to(&mut s).unwrap();
    // qubit 0 flipped, qubit 1 untouched: basis index 0b01
    assert!((s.amplitudes()[1].norm_sqr() - 1.0).abs() < 1e-12);
}

#[test]
fn targets_are_reproducible_and_in_range() {
    let spec = AnsatzSpec::chain(5, 2).unwrap();
    let a = random_target::<f64, _>(&spec, &mut stream(9)).unwrap();
    let b = random_target::<f64, _>(&spec, &mut stream(9)).unwrap();
    assert_eq!(a.circuit, b.circuit);
    assert!(a
        .hidden_params
        .iter()
        .all(|t| (0.0..std::f64::consts::TAU).contains(t)));
}

fn arb_spec() -> impl Strategy<Value = AnsatzSpec> {
    (2usize..7, 1usize..4, any::<bool>()).prop_map(|(n, depth, ring)| {
        if ring && n > 2 {
            let mut pairs: Vec<[usize; 2]> = (0..n - 1).map(|q| [q, q + 1]).collect();
            pairs.push([n - 1, 0]);
            AnsatzSpec::new(n, depth, pairs).unwrap()
        } else {
            AnsatzSpec::chain(n, depth).unwrap()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn layout_respects_spec(spec in arb_spec(), seed in any::<u64>()) {
        let p = ParamVector::<f64>::uniform(spec.param_count(), &mut stream(seed));
        let c = build_ansatz(&spec, &p).unwrap();
        prop_assert_eq!(c.len(), spec.param_count());
        for g in c.gates() {
            let t = g.targets().to_vec();
            if t.len() == 2 {
                prop_assert!(spec.connectivity.iter().any(|&[a, b]| (a, b) == (t[0], t[1]) || (a, b) == (t[1], t[0])));
            }
        }
    }

    #[test]
    fn zero_angles_act_as_identity(spec in arb_spec(), seed in any::<u64>()) {
        let c = build_ansatz(&spec, &vec![0.0f64; spec.param_count()]).unwrap();
        let psi = StateVector::<f64>::random(spec.n_qubits, &mut stream(seed));
        let mut out = psi.clone();
        c.apply_to(&mut out).unwrap();
        prop_assert!((psi.overlap_probability(&out).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adjoint_round_trip(spec in arb_spec(), seed in any::<u64>()) {
        let mut rng = stream(seed);
        let p = ParamVector::<f64>::uniform(spec.param_count(), &mut rng);
        let c = build_ansatz(&spec, &p).unwrap();
        prop_assert_eq!(&adjoint(&adjoint(&c)), &c);
        let psi = StateVector::<f64>::random(spec.n_qubits, &mut rng);
        let mut out = psi.clone();
        c.apply_to(&mut out).unwrap();
        adjoint(&c).apply_to(&mut out).unwrap();
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn json_reload_is_identical(spec in arb_spec(), seed in any::<u64>()) {
        let p = ParamVector::<f64>::uniform(spec.param_count(), &mut stream(seed));
        let c = build_ansatz(&spec, &p).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: Circuit<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &c);
        let spec_back: AnsatzSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        prop_assert_eq!(spec_back, spec);
    }
}
