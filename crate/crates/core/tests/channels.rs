use gsci::channels::{
    binary_entropy, hashing_ci, is_antidegradable, ray_at, shannon_entropy, single_letter_threshold, PauliParams,
    RayDirection,
};
use proptest::prelude::*;

fn simplex4() -> impl Strategy<Value = PauliParams> {
    prop::array::uniform4(0.0f64..1.0).prop_filter_map("nonzero", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-6).then(|| PauliParams::new(w[0] / s, w[1] / s, w[2] / s, 1.0 - (w[0] + w[1] + w[2]) / s).ok())?
    })
}

fn direction() -> impl Strategy<Value = RayDirection> {
    prop::array::uniform3(0.0f64..1.0)
        .prop_filter_map("nonzero", |w| RayDirection::normalized(w).ok())
}

proptest! {
    #[test]
    fn hashing_is_one_minus_entropy(p in simplex4()) {
        let h = shannon_entropy(&p.probs()).unwrap();
        prop_assert!((hashing_ci(&p) - (1.0 - h)).abs() < 1e-12);
        prop_assert!(hashing_ci(&p) <= 1.0 + 1e-15 && hashing_ci(&p) >= -1.0 - 1e-12);
    }

    #[test]
    fn rays_stay_on_the_simplex(d in direction(), x in 0.0f64..=1.0) {
        let p = ray_at(&d, x).unwrap();
        let s: f64 = p.probs().iter().sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
        prop_assert!((p.p(0) - (1.0 - x)).abs() < 1e-15);
    }

    #[test]
    fn half_way_is_antidegradable(d in direction()) {
        prop_assert!(is_antidegradable(&ray_at(&d, 0.5).unwrap()));
    }

    #[test]
    fn single_letter_threshold_is_a_root(d in direction()) {
        let t = single_letter_threshold(&d);
        prop_assert!(t > 0.0 && t <= 0.5);
        let f = |x: f64| hashing_ci(&ray_at(&d, x).unwrap());
        if t < 0.5 {
            prop_assert!(f(t - 2e-6) > 0.0 && f(t + 2e-6) < 0.0);
        }
    }

    #[test]
    fn binary_entropy_is_symmetric(x in 0.0f64..=1.0) {
        prop_assert!((binary_entropy(x) - binary_entropy(1.0 - x)).abs() < 1e-12);
    }
}

#[test]
fn parse_rejects_bad_points() {
    assert!("0.5,0.5,0,0".parse::<PauliParams>().is_ok());
    assert!("0.5,0.6,0,0".parse::<PauliParams>().is_err());
    assert!("0.5;0.5;0;0".parse::<PauliParams>().is_err());
    assert!("1,0,0".parse::<RayDirection>().is_ok());
}
