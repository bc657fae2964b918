use masure::apartment::PolyNorm;
use masure::masure::{Automorphism, Masure};
use masure::metrics::{distance_value, ThetaSpec, XiSpec};
use masure::rat;
use masure::rootsys::preset;
use masure::sample::{random_masure, random_point};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn masure_for(name: &str, seed: u64, thickness: u32) -> (Masure, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_masure(&preset(name).unwrap(), 20, 3, thickness, 4, &mut rng).unwrap();
    (m, rng)
}

fn presets() -> impl Strategy<Value = &'static str> {
    prop_oneof![Just("a1"), Just("affine-a1"), Just("hyp23")]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn signed_distance_axioms(name in presets(), seed in any::<u64>(), plus in any::<bool>()) {
        let (m, mut rng) = masure_for(name, seed, 2);
        let th = if plus { ThetaSpec::plus(PolyNorm::L1) } else { ThetaSpec::minus(PolyNorm::L1) };
        let x = random_point(&m, &mut rng);
        let y = random_point(&m, &mut rng);
        let z = random_point(&m, &mut rng);
        let dxy = distance_value(&m, &x, &y, &th).unwrap();
        prop_assert_eq!(&dxy, &distance_value(&m, &y, &x, &th).unwrap());
        prop_assert!(rat::is_zero_vec(&[distance_value(&m, &x, &x, &th).unwrap()]));
        let dxz = distance_value(&m, &x, &z, &th).unwrap();
        let dzy = distance_value(&m, &z, &y, &th).unwrap();
        prop_assert!(dxy <= dxz + dzy);
    }

    #[test]
    fn mixed_distance_separates(name in presets(), seed in any::<u64>()) {
        let (m, mut rng) = masure_for(name, seed, 2);
        let xi = XiSpec::standard(PolyNorm::LInf);
        let x = random_point(&m, &mut rng);
        let y = random_point(&m, &mut rng);
        let d = distance_value(&m, &x, &y, &xi.plus).unwrap() + distance_value(&m, &x, &y, &xi.minus).unwrap();
        prop_assert_eq!(rat::is_zero_vec(&[d]), m.points_equal(&x, &y).unwrap());
    }

    #[test]
    fn translations_and_sheet_swaps_are_isometries(seed in any::<u64>(), shift in -3i64..=3, swap in any::<bool>()) {
        let (m, mut rng) = masure_for("a1", seed, 3);
        let mut aut = Automorphism::translation(vec![rat::q(shift)]);
        if swap {
            aut.sheets.insert(1, 2);
            aut.sheets.insert(2, 1);
        }
        let img = m.image(&aut).unwrap();
        let th = ThetaSpec::plus(PolyNorm::L1);
        let x = random_point(&m, &mut rng);
        let y = random_point(&m, &mut rng);
        let fx = img.automorphism_apply(&aut, &x).unwrap();
        let fy = img.automorphism_apply(&aut, &y).unwrap();
        prop_assert_eq!(distance_value(&m, &x, &y, &th).unwrap(), distance_value(&img, &fx, &fy, &th).unwrap());
    }
}
