use std::collections::HashMap;

use pkl_core::join::JoinOptions;
use pkl_core::necklace::occurrence_profile;
use pkl_core::{
    add_mod, canonical_rotation, extend_longest_run, generate_pkl, is_pkl, join, lift_and_join_with, maximal_runs,
    JoinChoice, LinearString, Necklace,
};
use proptest::prelude::*;

fn necklace() -> impl Strategy<Value = Necklace> {
    (2u32..=6).prop_flat_map(|k| {
        prop::collection::vec(0..k as u16, 1..=24).prop_map(move |c| Necklace::new(c, k).unwrap())
    })
}

fn naive(chars: &[u16], m: usize) -> HashMap<Vec<u16>, u64> {
    let n = chars.len();
    let mut out = HashMap::new();
    for i in 0..n {
        *out.entry((0..m).map(|t| chars[(i + t) % n]).collect()).or_default() += 1;
    }
    out
}

fn profile_map(n: &Necklace, m: usize) -> HashMap<Vec<u16>, u64> {
    occurrence_profile(n, m)
        .unwrap()
        .counts
        .into_iter()
        .map(|(s, c)| (s.chars().to_vec(), c))
        .collect()
}

/// P-sequence with a permuted alphabet, reversed or not, rotated.
fn transformed_pkl() -> impl Strategy<Value = Necklace> {
    (2u32..=5, 1u64..=60).prop_flat_map(|(k, l)| {
        let perm = Just((0..k as u16).collect::<Vec<_>>()).prop_shuffle();
        (Just(k), Just(l), perm, any::<bool>(), 0..l as usize).prop_map(|(k, l, perm, rev, rot)| {
            let base = generate_pkl(k, l).unwrap();
            let mut c: Vec<u16> = base.chars().iter().map(|&x| perm[x as usize]).collect();
            if rev {
                c.reverse();
            }
            c.rotate_left(rot);
            Necklace::new(c, k).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn profile_matches_naive_count(n in necklace(), m in 1usize..6) {
        prop_assume!(m <= n.len());
        let got = profile_map(&n, m);
        prop_assert_eq!(got.values().sum::<u64>(), n.len() as u64);
        prop_assert_eq!(got, naive(n.chars(), m));
    }

    #[test]
    fn rotation_invariance(n in necklace(), r in 0usize..24) {
        let rotated = n.rotated(r % n.len());
        prop_assert_eq!(canonical_rotation(&rotated), canonical_rotation(&n));
        prop_assert_eq!(&rotated, &n);
        prop_assert_eq!(is_pkl(&rotated).accepted, is_pkl(&n).accepted);
        for m in 1..=n.len().min(4) {
            prop_assert_eq!(profile_map(&rotated, m), profile_map(&n, m));
        }
    }

    #[test]
    fn translation_equivariance(n in necklace(), j in -10i64..10) {
        let t = add_mod(&n, j);
        prop_assert_eq!(is_pkl(&t).accepted, is_pkl(&n).accepted);
        let m = n.len().min(3);
        let shifted: HashMap<Vec<u16>, u64> = profile_map(&n, m)
            .into_iter()
            .map(|(s, c)| (LinearString::new(s, n.k()).unwrap().add(j).chars().to_vec(), c))
            .collect();
        prop_assert_eq!(profile_map(&t, m), shifted);
    }

    #[test]
    fn join_conserves_short_counts(
        b in necklace(),
        tail in prop::collection::vec(0u16..6, 0..10),
        start in 0usize..24,
        len in 0usize..4,
    ) {
        let k = b.k();
        let len = len.min(b.len());
        let start = start % b.len();
        let w: Vec<u16> = (0..len).map(|t| b.chars()[(start + t) % b.len()]).collect();
        let mut g_chars = w.clone();
        g_chars.extend(tail.iter().map(|&c| c % k as u16));
        prop_assume!(!g_chars.is_empty());
        let g = Necklace::new(g_chars, k).unwrap();
        let joined = join(&b, &g, &LinearString::new(w, k).unwrap(), JoinChoice::First).unwrap();
        prop_assert_eq!(joined.len(), b.len() + g.len());
        for m in 1..=len + 1 {
            if m > b.len() || m > g.len() {
                continue;
            }
            let mut expected = naive(b.chars(), m);
            for (s, c) in naive(g.chars(), m) {
                *expected.entry(s).or_default() += c;
            }
            prop_assert_eq!(naive(joined.chars(), m), expected, "m = {}", m);
        }
    }

    #[test]
    fn run_extension_delta(n in necklace(), c in 1u16..6) {
        prop_assume!(u32::from(c) < n.k() && n.chars().contains(&c));
        let longest = maximal_runs(&n, c).iter().map(|r| r.len).max().unwrap();
        let e = extend_longest_run(&n, c).unwrap();
        prop_assert_eq!(e.len(), n.len() + 1);
        let count = |x: &Necklace| x.chars().iter().filter(|&&y| y == c).count();
        prop_assert_eq!(count(&e), count(&n) + 1);
        let new_longest = maximal_runs(&e, c).iter().map(|r| r.len).max().unwrap();
        prop_assert_eq!(new_longest, longest + 1);
        for other in 0..n.k() as u16 {
            if other != c {
                prop_assert_eq!(
                    e.chars().iter().filter(|&&y| y == other).count(),
                    n.chars().iter().filter(|&&y| y == other).count()
                );
            }
        }
    }

    #[test]
    fn lift_and_join_closure(a in transformed_pkl()) {
        prop_assert!(is_pkl(&a).accepted);
        let (out, trace) = lift_and_join_with(&a, JoinOptions { verify_input: true, check_joins: true }).unwrap();
        prop_assert_eq!(out.len(), a.len() * a.k() as usize);
        prop_assert!(is_pkl(&out).accepted, "{} -> {}", a, out);
        let p = pkl_core::lempel_lift(&a).p() as usize;
        prop_assert_eq!(trace.total_joins(), p - 1);
    }
}
