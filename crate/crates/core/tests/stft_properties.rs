use proptest::prelude::*;
use stft_dereverb::stft::{analyze, make_window, synthesize_to_len, WindowKind};
use stft_dereverb::{Signal, StftConfigF64};

fn config(kind: WindowKind, q: usize, r: usize) -> StftConfigF64 {
    make_window(kind, q, r).unwrap()
}

fn kinds() -> impl Strategy<Value = WindowKind> {
    prop_oneof![Just(WindowKind::SqrtHann), Just(WindowKind::RectangularScaled)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip(kind in kinds(), q in 1usize..=4, r in 1usize..=16,
                  x in prop::collection::vec(-1.0f64..1.0, 1..300)) {
        let c = config(kind, q, r);
        let s = Signal::new(x.clone(), 8000).unwrap();
        let y = synthesize_to_len(&analyze(&s, &c).unwrap(), x.len()).unwrap();
        for (a, b) in y.samples().iter().zip(&x) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    // tight frame: total coefficient energy is N times the signal energy
    #[test]
    fn parseval(kind in kinds(), q in 1usize..=4, r in 1usize..=16,
                x in prop::collection::vec(-1.0f64..1.0, 1..300)) {
        let c = config(kind, q, r);
        let s = Signal::new(x.clone(), 8000).unwrap();
        let spec = analyze(&s, &c).unwrap();
        let lhs = spec.power() / c.n_bins() as f64;
        let rhs: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
    }

    #[test]
    fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0,
                 x in prop::collection::vec(-1.0f64..1.0, 64),
                 y in prop::collection::vec(-1.0f64..1.0, 64)) {
        let c = config(WindowKind::SqrtHann, 4, 8);
        let mix: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let sx = analyze(&Signal::new(x, 8000).unwrap(), &c).unwrap();
        let sy = analyze(&Signal::new(y, 8000).unwrap(), &c).unwrap();
        let sm = analyze(&Signal::new(mix, 8000).unwrap(), &c).unwrap();
        for ((p, q), m) in sx.data().iter().zip(sy.data()).zip(sm.data()) {
            prop_assert!((p * a + q * b - m).norm() < 1e-10);
        }
    }
}

#[test]
fn single_precision_round_trip() {
    let c = make_window::<f32>(WindowKind::SqrtHann, 4, 64).unwrap();
    let x: Vec<f32> = (0..2000).map(|i| ((i as f32) * 0.37).sin()).collect();
    let s = Signal::new(x.clone(), 16000).unwrap();
    let y = synthesize_to_len(&analyze(&s, &c).unwrap(), x.len()).unwrap();
    let err = y
        .samples()
        .iter()
        .zip(&x)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f32, f32::max);
    assert!(err < 1e-5, "{err}");
}
