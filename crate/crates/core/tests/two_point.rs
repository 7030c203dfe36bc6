use proptest::prelude::*;
use splitrec::matrix_forms::{propagate_transfer, solve_two_point};
use splitrec::recurrence::RecurrenceCoefficients;
use splitrec::split::{SplitSequences, SplitState};
use splitrec::{c64, Complex64};

fn complex(range: f64) -> impl Strategy<Value = Complex64> {
    (-range..range, -range..range).prop_map(|(re, im)| c64(re, im))
}

prop_compose! {
    fn instance()(n in 3usize..100)
        (a in prop::collection::vec(complex(1.5), n),
         b in prop::collection::vec((0.3f64..1.5, -0.5f64..0.5).prop_map(|(r, i)| c64(r, i)), n),
         f in prop::collection::vec(complex(1.0), n),
         r1 in prop::collection::vec((0.6f64..1.4, 0.2f64..1.2).prop_map(|(r, i)| c64(r, i)), n),
         r2 in prop::collection::vec((0.6f64..1.4, -1.2f64..-0.2).prop_map(|(r, i)| c64(r, i)), n),
         left in complex(1.0))
        -> (RecurrenceCoefficients, SplitSequences, Complex64) {
        (RecurrenceCoefficients::new(1, a, b, f).unwrap(), SplitSequences::new(1, r1, r2).unwrap(), left)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // Eliminating the unknown initial y2 from two affine transfer sweeps
    // gives the same field as the scatter cascade when the sweep is well conditioned.
    #[test]
    fn scatter_cascade_matches_transfer_elimination((coeffs, split, left) in instance()) {
        let n = coeffs.len() - 1;
        let last = 1 + n as i64 - 1;
        let scatter = solve_two_point(&coeffs, &split, 1, last, left, c64(0.0, 0.0)).unwrap();

        let count = n;
        let a = propagate_transfer(&coeffs, &split, 1, SplitState::new(left, c64(0.0, 0.0)), count).unwrap();
        let b = propagate_transfer(&coeffs, &split, 1, SplitState::new(left, c64(1.0, 0.0)), count).unwrap();
        prop_assume!(!a.overflowed() && !b.overflowed());
        // amplification of the homogeneous part bounds the oracle's own error
        let growth = a.field.states.iter().zip(&b.field.states)
            .map(|(p, q)| (q.y1 - p.y1).norm().max((q.y2 - p.y2).norm()))
            .fold(0.0f64, f64::max);
        prop_assume!(growth < 1e4);
        let end_a = a.field.states[count - 1].y2;
        let end_b = b.field.states[count - 1].y2;
        prop_assume!((end_b - end_a).norm() > 1e-6);
        let x = -end_a / (end_b - end_a);
        let sweep = propagate_transfer(&coeffs, &split, 1, SplitState::new(left, x), count).unwrap();
        prop_assume!(!sweep.overflowed());

        let scale = scatter.field.max_abs().max(sweep.field.max_abs());
        for (s, t) in scatter.field.states.iter().zip(&sweep.field.states) {
            prop_assert!((s.y1 - t.y1).norm() <= 1e-9 * scale);
            prop_assert!((s.y2 - t.y2).norm() <= 1e-9 * scale);
        }
    }
}
