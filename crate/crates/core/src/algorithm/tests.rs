use super::*;
use crate::scalars::{ExtScalar as E, PadicContext};

fn space(p: u64, d: &[i64]) -> Arc<HermSpace> {
    let c = PadicContext::with_default_eps(p).unwrap();
    let e: Vec<E> = d.iter().map(|&x| E::from_int(x)).collect();
    Arc::new(HermSpace::diagonal(c, &e).unwrap())
}

fn scaled_unit(n: usize, i: usize, c: i64) -> Vec<E> {
    (0..n).map(|j| if i == j { E::from_int(c) } else { E::zero() }).collect()
}

fn chain(p: u64, d: &[i64], x: &[(usize, i64)]) -> SubSpaceChain {
    let n = d.len();
    let xs = x.iter().map(|&(i, c)| scaled_unit(n, i, c)).collect();
    let t = Arc::new(SpecialTuple::new(space(p, d), xs).unwrap());
    SubSpaceChain::new(t).unwrap()
}

fn filtered(ch: &SubSpaceChain, b: Bounds) -> Vec<Vertex> {
    let l0 = ch.level(0);
    let fast = l0.building().fast().clone();
    enumerate_level(l0, Some(b), 1 << 20, "oracle")
        .unwrap()
        .into_iter()
        .filter(|v| l0.probes().iter().all(|pr| pr.in_dual(&fast, v.key(), 0).unwrap()))
        .collect()
}

#[test]
fn seeds_lie_in_support() {
    let ch = chain(3, &[1, 1, 3], &[(0, 3), (2, 1)]);
    assert_eq!(ch.valuations(), &[1, 2]);
    assert_eq!(ch.top_stage(), 1);
    for s in 0..ch.top_stage() + 1 {
        let img = ch.phi_s(s, ch.level(s + 1).seed()).unwrap();
        assert_eq!(&img, ch.level(s).seed());
    }
}

#[test]
fn single_vector_matches_filter() {
    let bounds = [Bounds::new(1, 1, 2), Bounds::new(2, 2, 3)];
    for &(i, c) in &[(0, 1), (2, 1), (0, 3), (2, 3), (0, 9)] {
        let ch = chain(3, &[1, 1, 3], &[(i, c)]);
        for &b in &bounds {
            let want = filtered(&ch, b);
            let got = run_multi(&ch, Some(b), &Options::default()).unwrap().support;
            assert_eq!(got, want, "x = {c}e_{i}, {b:?}");
            let rec = recurse_single(&ch, Some(b), &Options::default());
            assert_eq!(rec.unwrap(), want, "recursion, x = {c}e_{i}, {b:?}");
        }
    }
}

#[test]
fn tuples_match_filter() {
    let b = Bounds::new(2, 2, 3);
    for x in [&[(0, 1), (2, 1)][..], &[(0, 3), (2, 1)], &[(0, 1), (1, 3)], &[(0, 3), (1, 3)]] {
        let ch = chain(3, &[1, 1, 3], x);
        let want = filtered(&ch, b);
        assert!(!want.is_empty());
        let got = run_multi(&ch, Some(b), &Options::default()).unwrap();
        assert_eq!(got.support, want, "{x:?}");
    }
}

#[test]
fn full_rank_tuple_is_finite() {
    let ch = chain(3, &[1, 1, 3], &[(0, 1), (1, 3), (2, 1)]);
    let got = run_multi(&ch, None, &Options::default()).unwrap().support;
    let hull = Bounds::hull(
        got.iter().map(|v| ch.level(0).building().fast().window_exponents(ch.level(0).anchor(), v.key()).unwrap()),
    );
    assert_eq!(got, filtered(&ch, hull.grow(1, 1, 2)));
}

#[test]
fn variants_agree_and_fault_is_seen() {
    let ch = chain(3, &[1, 1, 3], &[(0, 3), (2, 1)]);
    let b = Bounds::new(2, 2, 3);
    let d = run_multi(&ch, Some(b), &Options { step2: Step2::Distance, ..Options::default() }).unwrap();
    let c = run_multi(&ch, Some(b), &Options { step2: Step2::CommonOver, ..Options::default() }).unwrap();
    assert_eq!(d.support, c.support);
    let f = run_multi(&ch, Some(b), &Options { fault_phi_stage: Some(0), ..Options::default() });
    assert!(matches!(f, Err(Error::Inconsistent(m)) if m.starts_with("stage S_0")));
}

#[test]
fn ambient_window_matches_ball_filter() {
    use crate::building::ball;
    use crate::cycles::in_cycle;
    let c = PadicContext::with_default_eps(3).unwrap();
    let g = alloc::vec![
        alloc::vec![E::from_int(1), E::from_int(1), E::zero()],
        alloc::vec![E::from_int(1), E::from_int(4), E::zero()],
        alloc::vec![E::zero(), E::zero(), E::from_int(3)],
    ];
    let sp = Arc::new(HermSpace::new(c, g).unwrap());
    let x = alloc::vec![alloc::vec![E::from_int(1), E::from_int(2), E::from_int(3)]];
    let t = Arc::new(SpecialTuple::new(sp, x).unwrap());
    let ch = SubSpaceChain::new(t.clone()).unwrap();
    let amb = ch.ambient().clone();
    let w = ball(&amb, ch.seed_vertex(), 2).unwrap();
    let want: Vec<Vertex> = w.vertices().iter().filter(|v| in_cycle(&amb, v, &t).unwrap()).cloned().collect();
    let got = support_in(&ch, Some(w.vertices()), &Options::default()).unwrap();
    assert_eq!(got.support, want);
}
