use arches::noncrossing::{is_noncrossing, sample_ncmatching, Order};
use arches::realizer::{realize_at, rewire, rewired_matching, RealizeRequest};
use arches::render::{render_svg, RenderStyle, Subject};
use arches::stats::{
    arc_length_pmf, circle_density_series, circle_series_tail, trifurcation_scan, ScanEnv,
};
use arches::window::{
    match_parentheses, row_ends_closed_form, walk_range, Half, MateTable, ProfileMethod, SiteState,
};
use arches::{decompose, end_profile, Budget, EndProfile, LazyLine, NcMatching, Window};
use proptest::prelude::*;

fn window_strategy(max_len: usize) -> impl Strategy<Value = Window> {
    (-50i64..50, prop::collection::vec(0usize..4, 0..max_len))
        .prop_map(|(lo, idx)| Window::new(lo, idx.into_iter().map(SiteState::from_index).collect()))
}

fn request_strategy() -> impl Strategy<Value = (RealizeRequest, i64)> {
    (
        0usize..6,
        0usize..6,
        0usize..6,
        0usize..6,
        0usize..5,
        any::<u64>(),
        -20i64..20,
    )
        .prop_filter_map(
            "halves of different parity",
            |(a, b, c, d, extra, seed, lo)| {
                if (a + b) % 2 != (c + d) % 2 {
                    return None;
                }
                let profile = EndProfile::new(a, b, c, d);
                let n_tot = profile.total();
                let sigma = sample_ncmatching(n_tot / 2, seed);
                let len = n_tot.max(1) + ((n_tot.max(1) + a + b) % 2) + 2 * extra;
                RealizeRequest::new(len, profile, sigma)
                    .ok()
                    .map(|r| (r, lo))
            },
        )
}

proptest! {
    #[test]
    fn arcs_nest_without_crossing(w in window_strategy(120)) {
        for half in [Half::Upper, Half::Lower] {
            let p = match_parentheses(w.lo, &w.signs(half), half);
            for a in &p.arcs {
                prop_assert!(a.left < a.right);
                prop_assert_eq!((a.right - a.left) % 2, 1);
                for b in &p.arcs {
                    let crossing = a.left < b.left && b.left < a.right && a.right < b.right;
                    prop_assert!(!crossing);
                }
            }
            // each site is an arc end or a dangling end exactly once
            prop_assert_eq!(2 * p.arcs.len() + p.left_ends.len() + p.right_ends.len(), w.len());
        }
    }

    #[test]
    fn closed_form_matches_stack(w in window_strategy(300)) {
        let stack = end_profile(&w, ProfileMethod::Stack);
        prop_assert_eq!(stack, end_profile(&w, ProfileMethod::ClosedForm));
        prop_assert!(stack.parity_ok(w.len()));
        let (l, r) = row_ends_closed_form(w.signs(Half::Upper));
        prop_assert_eq!((l, r), (stack.nl_up, stack.nr_up));
        prop_assert!(l.max(r) <= walk_range(w.signs(Half::Upper)) + 1);
    }

    #[test]
    fn boundary_matching_is_cyclically_noncrossing(w in window_strategy(200)) {
        let d = decompose(&w);
        prop_assert_eq!(d.sigma.len(), d.profile().total());
        prop_assert!(is_noncrossing(d.sigma.mates(), Order::Cyclic).unwrap());
        prop_assert_eq!(d.profile(), end_profile(&w, ProfileMethod::Stack));
        let covered: usize = d.internal_cycles.iter().map(|c| c.len()).sum::<usize>()
            + d.boundary_paths.iter().map(|p| p.vertices.len()).sum::<usize>();
        prop_assert_eq!(covered, w.len());
    }

    #[test]
    fn mirror_keeps_total_ends(w in window_strategy(100)) {
        let p = end_profile(&w, ProfileMethod::Stack);
        let m = end_profile(&w.mirror(), ProfileMethod::Stack);
        prop_assert_eq!(p.total(), m.total());
    }

    #[test]
    fn word_and_matching_agree(n in 0usize..30, seed in any::<u64>()) {
        let m = sample_ncmatching(n, seed);
        prop_assert_eq!(NcMatching::from_word(&m.to_word()).unwrap(), m.clone());
        prop_assert_eq!(m.to_string().parse::<NcMatching>().unwrap(), m);
    }

    #[test]
    fn realize_roundtrip((req, lo) in request_strategy()) {
        let w = realize_at(&req, lo).unwrap();
        prop_assert_eq!(w.len(), req.len);
        prop_assert_eq!(w.lo, lo);
        let d = decompose(&w);
        prop_assert_eq!(d.profile(), req.profile);
        prop_assert_eq!(d.sigma, req.sigma);
    }

    #[test]
    fn rewire_keeps_profile((req, lo) in request_strategy(), i in 0usize..24, j in 0usize..24) {
        let w = realize_at(&req, lo).unwrap();
        let n = req.profile.total();
        prop_assume!(n >= 2);
        let (i, j) = (i % n, j % n);
        prop_assume!(i != j);
        match rewire(&w, i, j) {
            Ok(out) => {
                let d = decompose(&out);
                prop_assert_eq!(d.profile(), req.profile);
                prop_assert_eq!(d.sigma.mate(i), j);
                prop_assert_eq!(d.sigma, rewired_matching(&req.sigma, i, j).unwrap());
            }
            Err(_) => prop_assert!(rewired_matching(&req.sigma, i, j).is_err()),
        }
    }

    #[test]
    fn partners_are_mutual(seed in any::<u64>(), x in -1000i64..1000) {
        let mut line = LazyLine::new(seed);
        let budget = Budget::new(1, 5000);
        for half in [Half::Upper, Half::Lower] {
            if let Ok(y) = line.partner(x, half, budget) {
                prop_assert_eq!((y - x).abs() % 2, 1);
                prop_assert_eq!(line.partner(y, half, Budget::new(1, 10_000)), Ok(x));
            }
        }
    }

    #[test]
    fn lazy_partners_agree_with_window_table(seed in any::<u64>(), lo in -500i64..500) {
        let mut line = LazyLine::new(seed);
        let w = line.window(lo, 400);
        let table = MateTable::new(&w);
        for x in lo..lo + 400 {
            for half in [Half::Upper, Half::Lower] {
                if let Some(y) = table.mate(x, half) {
                    prop_assert_eq!(line.partner(x, half, Budget::new(1, 400)), Ok(y));
                }
            }
        }
    }

    #[test]
    fn traces_alternate(seed in any::<u64>(), x in -100i64..100) {
        let t = LazyLine::new(seed).trace_cluster(x, Budget::new(2000, 50_000));
        for pair in t.edges.windows(2) {
            prop_assert_ne!(pair[0], pair[1]);
        }
        let mut v = t.vertices.clone();
        v.sort_unstable();
        v.dedup();
        prop_assert_eq!(v.len(), t.vertices.len());
        if t.is_closed() {
            prop_assert_eq!(t.len() % 2, 0);
            prop_assert_eq!(t.edges.len(), t.len());
        }
    }

    #[test]
    fn svg_has_one_element_per_arc_and_end(w in window_strategy(80)) {
        let svg = render_svg(Subject::Window(&w), &RenderStyle::default()).unwrap();
        let mut expected = 0;
        for half in [Half::Upper, Half::Lower] {
            let p = match_parentheses(w.lo, &w.signs(half), half);
            expected += p.arcs.len() + p.left_ends.len() + p.right_ends.len();
        }
        prop_assert_eq!(svg.matches("<path class=\"arc").count(), expected);
        prop_assert_eq!(svg, render_svg(Subject::Window(&w), &RenderStyle::default()).unwrap());
    }

    #[test]
    fn reported_trifurcations_pass_audit(seed in any::<u64>()) {
        let mut line = LazyLine::new(seed);
        let r = trifurcation_scan(ScanEnv::Line(&mut line), 0, 300, Budget::new(5000, 5000));
        let check = LazyLine::new(seed);
        prop_assert_eq!(r.points.len(), r.audit.len());
        for a in &r.audit {
            prop_assert!(a.passes());
            prop_assert!(check.peek(a.site).is_aligned());
            prop_assert!((0..=300).contains(&a.site));
        }
    }
}

#[test]
fn series_tail_bound() {
    for k in [100, 1000, 10_000, 100_000] {
        let gap = circle_density_series(2 * k).value - circle_density_series(k).value;
        assert!(
            gap >= 0.0 && gap <= circle_series_tail(k),
            "k={k} gap={gap}"
        );
    }
}

#[test]
fn pmf_partial_sums_stay_below_one() {
    let mut sum = 0.0;
    for k in 0..100_000 {
        sum += arc_length_pmf(k);
        assert!(sum <= 1.0);
    }
}
