use proptest::prelude::*;
use rydberg_ring::disorder::{absorption_weights, single_fermion_spectrum, QuenchEnsemble, Realization};
use rydberg_ring::dynamics::{propagate, DeltaProfile, LaserSchedule, OmegaProfile, Recording, Segment, StepControl};
use rydberg_ring::fermion::validate_against_ed;
use rydberg_ring::io::parse_config;
use rydberg_ring::spin::frame_identity_residual;
use rydberg_ring::symmetry::{symmetric_sector, symmetry_operators};
use rydberg_ring::{Frame, StateVector, SystemParams};

fn ring() -> impl Strategy<Value = SystemParams> {
    (2usize..=6)
        .prop_flat_map(|l| {
            (
                Just(l),
                0.1f64..3.0,
                0.0f64..6.0,
                -3.0f64..3.0,
                prop::collection::vec(1u32..8, l),
            )
        })
        .prop_map(|(l, beta, omega, delta, occ)| SystemParams::new(l, beta, omega, delta, occ).unwrap())
}

fn segment() -> impl Strategy<Value = Segment> {
    let delta = prop_oneof![
        (-2.0f64..2.0).prop_map(|value| DeltaProfile::Constant { value }),
        (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(from, to)| DeltaProfile::Ramp { from, to }),
        (-1.0f64..1.0, 0.0f64..1.0, 0.1f64..10.0, 0.0f64..6.3).prop_map(|(offset, amplitude, omega, phase)| {
            DeltaProfile::Sinusoid {
                offset,
                amplitude,
                omega,
                phase,
            }
        }),
    ];
    let omega0 = prop_oneof![
        (0.0f64..3.0).prop_map(|value| OmegaProfile::Constant { value }),
        (0.0f64..3.0, 0.0f64..3.0).prop_map(|(from, to)| OmegaProfile::Ramp { from, to }),
        (0.0f64..3.0, 0.0f64..3.0, 1.0f64..4.0).prop_map(|(from, to, exponent)| OmegaProfile::Power {
            from,
            to,
            exponent
        }),
    ];
    (0.1f64..2.0, delta, omega0).prop_map(|(duration, delta, omega0)| Segment {
        duration,
        delta,
        omega0,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rotated_parts_rebuild_the_spin_hamiltonian(p in ring()) {
        prop_assert!(frame_identity_residual(&p).unwrap() < 1e-12);
    }

    #[test]
    fn free_fermions_reproduce_the_clean_spectrum(l in 2usize..=7, beta in 0.2f64..2.0, omega in 3.0f64..12.0) {
        let p = SystemParams::clean(l, beta, omega, 0.0).unwrap();
        prop_assert!(validate_against_ed(&p).unwrap().max_deviation < 1e-9);
    }

    #[test]
    fn absorption_weights_sum_to_one(occ in prop::collection::vec(0u32..40, 2..60), omega in 1.0f64..20.0) {
        let n0 = f64::from(occ.iter().sum::<u32>().max(1)) / occ.len() as f64;
        let r = Realization::from_occupations(0, occ, omega, n0).unwrap();
        let w = absorption_weights(&single_fermion_spectrum(&r, 1.0).unwrap());
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(w.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn quench_conserves_atoms(sites in 2usize..60, atoms in 0u32..2000, seed in any::<u64>(), index in 0usize..1000) {
        let e = QuenchEnsemble::new(sites, atoms, index + 1, seed).unwrap();
        let n = e.occupations(index);
        prop_assert_eq!(n.len(), sites);
        prop_assert_eq!(n.iter().sum::<u32>(), atoms);
    }

    #[test]
    fn schedules_survive_json(segments in prop::collection::vec(segment(), 1..4)) {
        let s = LaserSchedule::new(segments).unwrap();
        let back: LaserSchedule = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn configs_survive_their_own_output(l in 2usize..=10, omega in 0.5f64..20.0, delta in -2.0f64..2.0, seed in any::<u64>()) {
        let text = format!(
            r#"{{"experiment":"spectrum","units":"beta","L":{l},"omega":{omega},"delta":{delta},"seed":{seed}}}"#
        );
        let first = parse_config(&text).unwrap();
        let second = parse_config(&first.to_json()).unwrap();
        prop_assert_eq!(first.hash(), second.hash());
        prop_assert_eq!(first.to_json(), second.to_json());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn evolution_preserves_the_norm(segments in prop::collection::vec(segment(), 1..3), occ in prop::collection::vec(1u32..5, 4)) {
        let p = SystemParams::new(4, 1.0, 1.0, 0.0, occ).unwrap();
        let s = LaserSchedule::new(segments).unwrap();
        let run = propagate(
            &StateVector::no_rydberg(4),
            &s,
            &p,
            &StepControl::default(),
            &Recording::uniform(s.span(), 20),
        )
        .unwrap();
        prop_assert!(run.max_norm_drift < 1e-9);
        prop_assert!((run.final_state.norm() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn symmetric_projector_is_an_invariant_idempotent() {
    for l in 2..=8 {
        for frame in [Frame::Lab, Frame::Rotated] {
            let p = symmetric_sector(l).unwrap().projector(frame);
            let (x, r) = symmetry_operators(l, frame).unwrap();
            assert!(p.matmul(&p).unwrap().max_abs_diff(&p).unwrap() < 1e-10, "L={l}");
            assert!(p.adjoint().max_abs_diff(&p).unwrap() < 1e-12, "L={l}");
            for op in [&x, &r] {
                assert!(p.matmul(op).unwrap().max_abs_diff(&p).unwrap() < 1e-12, "L={l}");
                assert!(op.matmul(&p).unwrap().max_abs_diff(&p).unwrap() < 1e-12, "L={l}");
            }
        }
    }
}
