use std::sync::OnceLock;

use footseq::oracle::{incremental_witness, stores_up_to, GoodStore};
use footseq::pipeline::{Pipeline, PipelineConfig};
use footseq::{regular_rank, regular_total, regular_unrank, Verdict};
use proptest::prelude::*;

fn stores() -> &'static Vec<GoodStore> {
    static STORES: OnceLock<Vec<GoodStore>> = OnceLock::new();
    STORES.get_or_init(|| stores_up_to(7, None).unwrap())
}

fn scores(max_n: usize) -> impl Strategy<Value = Vec<i64>> {
    (1..=max_n).prop_flat_map(|n| prop::collection::vec(0..=3 * (n as i64 - 1), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn verdict_ignores_input_order(
        (s, shuffled) in scores(7).prop_flat_map(|s| (Just(s.clone()), Just(s).prop_shuffle()))
    ) {
        let mut p = Pipeline::new(PipelineConfig::new(s.len())).unwrap();
        let a = p.decide(&s).unwrap();
        let b = p.decide(&shuffled).unwrap();
        prop_assert_eq!(a.is_good(), b.is_good());
        if let Verdict::Good(_, m) = b {
            let sums: Vec<i64> = m.row_sums().into_iter().map(|v| v as i64).collect();
            prop_assert_eq!(sums, shuffled);
        }
    }

    #[test]
    fn rank_and_unrank_are_inverse(n in 1usize..=15, frac in 0.0f64..1.0) {
        let total = regular_total(n);
        let rank = ((total as f64 * frac) as u128).min(total - 1);
        let s = regular_unrank(n, rank).unwrap();
        prop_assert_eq!(s.len(), n);
        prop_assert!(s.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(regular_rank(&s), rank);
    }

    #[test]
    fn witnesses_account_for_every_point(idx in any::<prop::sample::Index>(), n in 2usize..=7) {
        let s = idx.get(stores()[n - 1].sequences()).clone();
        let w = incremental_witness(&s, &stores()[n - 2]).unwrap().unwrap();
        let tail_gain: u32 = w.diffs.iter().map(|&d| d as u32).sum();
        let removed: u32 = w.diffs.iter().map(|&d| match d { 3 => 0, 1 => 1, _ => 3 }).sum();
        prop_assert_eq!(removed, s[0]);
        prop_assert_eq!(s.iter().sum::<u32>(), w.ancestor.iter().sum::<u32>() + tail_gain + s[0]);
        prop_assert!(stores()[n - 2].contains(&w.ancestor));
    }

    #[test]
    fn store_text_round_trips(picks in prop::collection::vec(any::<prop::sample::Index>(), 0..40)) {
        let all = stores()[4].sequences();
        let subset: Vec<Vec<u32>> = picks.iter().map(|i| i.get(all).clone()).collect();
        let store = GoodStore::new(5, subset).unwrap();
        let text = store.to_text();
        let back = GoodStore::from_text(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(back, store);
    }
}
