mod common;

use mttd3r::diffops::{diff, diff_adjoint, dw_gram, dw_norm_sq, Axis, SmoothWeights};
use mttd3r::io::t3b::{decode, encode_mask, encode_tensor, T3b};
use mttd3r::prelude::*;
use mttd3r::solver::FeasibleSet;
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = [usize; 3]> {
    [1usize..6, 1usize..6, 1usize..5]
}

fn tensor() -> impl Strategy<Value = Tensor3> {
    dims().prop_flat_map(|d| {
        proptest::collection::vec(-1.0f64..1.0, d.iter().product::<usize>())
            .prop_map(move |v| Tensor3::new(d, v).unwrap())
    })
}

fn tensor_pair() -> impl Strategy<Value = (Tensor3, Tensor3)> {
    dims().prop_flat_map(|d| {
        let n = d.iter().product::<usize>();
        (
            proptest::collection::vec(-1.0f64..1.0, n),
            proptest::collection::vec(-1.0f64..1.0, n),
        )
            .prop_map(move |(a, b)| (Tensor3::new(d, a).unwrap(), Tensor3::new(d, b).unwrap()))
    })
}

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::One), Just(Mode::Two), Just(Mode::Three)]
}

fn axis() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::H), Just(Axis::V), Just(Axis::T)]
}

proptest! {
    #[test]
    fn permute_roundtrips(a in tensor(), m in mode()) {
        prop_assert_eq!(a.permute(m).ipermute(m), a.clone());
        prop_assert_eq!(a.permute(m).dims(), m.permuted_dims(a.dims()));
    }

    #[test]
    fn mode_slices_are_lateral_slices_of_permutation(a in tensor(), m in mode()) {
        let lateral = a.permute(m).lateral_slices();
        prop_assert_eq!(lateral.len(), a.dims()[m.index()]);
        for (i, s) in lateral.iter().enumerate() {
            prop_assert_eq!(&a.mode_slice(m, i).unwrap(), s);
        }
    }

    #[test]
    fn unfolding_keeps_entries(a in tensor(), m in mode()) {
        let u = a.matricize(m);
        let mut sorted_u: Vec<f64> = u.iter().copied().collect();
        let mut sorted_a = a.as_slice().to_vec();
        sorted_u.sort_by(f64::total_cmp);
        sorted_a.sort_by(f64::total_cmp);
        prop_assert_eq!(sorted_u, sorted_a);
        prop_assert_eq!(u.nrows(), a.dims()[m.index()]);
    }

    #[test]
    fn difference_adjoint_identity((a, b) in tensor_pair(), ax in axis()) {
        let lhs = diff(&a, ax).inner(&b).unwrap();
        let rhs = a.inner(&diff_adjoint(&b, ax)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn difference_gram_is_quadratic_form(a in tensor(), w in [0.0f64..2.0, 0.0f64..2.0, 0.0f64..2.0]) {
        let sw = SmoothWeights::new(w, 1.0).unwrap();
        let q = a.inner(&dw_gram(&a, &sw)).unwrap();
        prop_assert!((q - dw_norm_sq(&a, &sw)).abs() <= 1e-12 * (1.0 + q.abs()));
        prop_assert!(q >= -1e-12);
    }

    #[test]
    fn differences_annihilate_constants(d in dims(), c in -2.0f64..2.0, ax in axis()) {
        let a = Tensor3::filled(d, c);
        prop_assert_eq!(diff(&a, ax).max_abs(), 0.0);
    }

    #[test]
    fn dft_roundtrip(a in tensor()) {
        let back = a.dft3().idft3();
        prop_assert!(back.re().distance(&a).unwrap() <= 1e-12 * (1.0 + a.fro_norm()));
        prop_assert!(back.max_imag() <= 1e-12);
    }

    #[test]
    fn t3b_tensor_roundtrip(a in tensor()) {
        let bytes = encode_tensor(&a).unwrap();
        prop_assert_eq!(bytes.len(), 17 + 8 * a.len());
        prop_assert_eq!(decode(&bytes).unwrap(), T3b::Tensor(a));
    }

    #[test]
    fn t3b_mask_roundtrip(d in dims(), p in 0.0f64..=1.0, seed in any::<u64>()) {
        let m = random_mask(d, p, seed).unwrap();
        prop_assert_eq!(decode(&encode_mask(&m).unwrap()).unwrap(), T3b::Mask(m));
    }

    #[test]
    fn random_mask_is_reproducible(d in dims(), p in 0.0f64..=1.0, seed in any::<u64>()) {
        prop_assert_eq!(random_mask(d, p, seed).unwrap(), random_mask(d, p, seed).unwrap());
    }

    #[test]
    fn projection_is_idempotent_and_feasible(a in tensor(), seed in any::<u64>()) {
        let m = a.map(|v| 0.5 * (v + 1.0));
        let mut mask = random_mask(a.dims(), 0.5, seed).unwrap();
        if mask.count_observed() == 0 {
            mask = ObservationMask::full(a.dims());
        }
        let set = FeasibleSet::new(&m, mask.clone()).unwrap();
        let mut x = a.map(|v| 3.0 * v);
        set.project(&mut x);
        prop_assert!(common::is_feasible(&x, &m, &mask));
        let once = x.clone();
        set.project(&mut x);
        prop_assert_eq!(x, once);
    }

    #[test]
    fn psnr_is_infinite_only_for_equal_tensors((a, b) in tensor_pair()) {
        prop_assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        if a != b {
            prop_assert!(psnr(&b, &a).unwrap().is_finite() || a.max_abs() == 0.0);
        }
    }
}
