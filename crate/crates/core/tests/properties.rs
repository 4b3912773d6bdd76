use gapsandwich::bounds::{
    gap_upper_first_order, improved_upper, jensen_lower, midpoint_evidence, optimal_c,
    optimal_upper, PairedSamples,
};
use gapsandwich::stats::{LogSumExp, MeanVar};
use proptest::prelude::*;

fn positive_vec(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..1e3, n)
}

fn pairs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..200).prop_flat_map(|n| (positive_vec(n..n + 1), positive_vec(n..n + 1)))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn c_zero_matches_first_order((xs, ys) in pairs()) {
        let s = PairedSamples::linear(xs, ys).unwrap();
        let upper = improved_upper(&s, 0.0).unwrap().mean;
        let sum = jensen_lower(&s).mean + gap_upper_first_order(&s).mean;
        prop_assert!(close(upper, sum, 1e-12));
    }

    #[test]
    fn optimal_c_minimises_the_c_bound((xs, ys) in pairs(), d in -2.0f64..2.0) {
        let s = PairedSamples::linear(xs, ys).unwrap();
        let c = optimal_c(&s);
        let best = improved_upper(&s, c).unwrap().mean;
        prop_assert!(best <= improved_upper(&s, c + d).unwrap().mean + 1e-9 * best.abs().max(1.0));
        prop_assert!(close(best, optimal_upper(&s), 1e-12));
    }

    #[test]
    fn scale_shifts_by_log_lambda((xs, ys) in pairs(), lambda in 1e-3f64..1e3) {
        let s = PairedSamples::linear(xs.clone(), ys.clone()).unwrap();
        let t = PairedSamples::linear(
            xs.iter().map(|x| x * lambda).collect(),
            ys.iter().map(|y| y * lambda).collect(),
        ).unwrap();
        let l = lambda.ln();
        prop_assert!(close(jensen_lower(&t).mean, jensen_lower(&s).mean + l, 1e-10));
        prop_assert!(close(improved_upper(&t, 0.3).unwrap().mean, improved_upper(&s, 0.3).unwrap().mean + l, 1e-10));
        prop_assert!(close(optimal_upper(&t), optimal_upper(&s) + l, 1e-10));
        prop_assert!(close(midpoint_evidence(&t), midpoint_evidence(&s) + l, 1e-10));
        prop_assert!(close(optimal_c(&t), optimal_c(&s), 1e-10));
        prop_assert!(close(gap_upper_first_order(&t).mean, gap_upper_first_order(&s).mean, 1e-10));
    }

    #[test]
    fn log_domain_equals_linear_domain((xs, ys) in pairs()) {
        let lin = PairedSamples::linear(xs.clone(), ys.clone()).unwrap();
        let log = PairedSamples::logs(xs.iter().map(|x| x.ln()).collect(), ys.iter().map(|y| y.ln()).collect()).unwrap();
        prop_assert!(close(jensen_lower(&lin).mean, jensen_lower(&log).mean, 1e-12));
        prop_assert!(close(improved_upper(&lin, 0.7).unwrap().mean, improved_upper(&log, 0.7).unwrap().mean, 1e-12));
    }

    #[test]
    fn chunked_accumulators_agree(values in prop::collection::vec(-50.0f64..50.0, 1..400), cut in 0usize..400) {
        let cut = cut.min(values.len());
        let whole: MeanVar = values.iter().copied().collect();
        let (a, b) = values.split_at(cut);
        let merged = a.iter().copied().collect::<MeanVar>().merge(&b.iter().copied().collect());
        prop_assert!(close(whole.mean(), merged.mean(), 1e-9));
        if values.len() > 1 {
            prop_assert!(close(whole.variance(), merged.variance(), 1e-9));
        }
        let lse: LogSumExp = values.iter().copied().collect();
        let lse_merged = a.iter().copied().collect::<LogSumExp>().merge(&b.iter().copied().collect());
        prop_assert!(close(lse.value(), lse_merged.value(), 1e-9));
    }
}
