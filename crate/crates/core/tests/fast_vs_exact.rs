use std::sync::Arc;

use krsupport_core::lattices::{FastSpace, HermSpace, Lattice};
use krsupport_core::scalars::{ExtScalar as E, PadicContext};
use proptest::prelude::*;

fn space(p: u64, d: &[i64]) -> Arc<HermSpace> {
    let ctx = PadicContext::with_default_eps(p).unwrap();
    let e: Vec<E> = d.iter().map(|&x| E::from_int(x)).collect();
    Arc::new(HermSpace::diagonal(ctx, &e).unwrap())
}

fn gen_lattice(s: &Arc<HermSpace>, raw: &[(i64, i64, i64)], scale: &[i64]) -> Option<Lattice> {
    let n = s.dim();
    let p = s.ctx().p() as i64;
    let gens: Vec<Vec<E>> = raw
        .chunks(n)
        .zip(scale)
        .map(|(c, &k)| {
            c.iter()
                .map(|&(a, b, v)| {
                    let num = p.pow(v.max(0) as u32);
                    let den = p.pow((-v).max(0) as u32);
                    E::from_parts(a * num, den, b * num, den)
                })
                .map(|x| s.ctx().mul(&x, &s.ctx().p_pow(-k)))
                .collect()
        })
        .collect();
    let l = Lattice::from_generators(s.clone(), &gens).ok()?;
    l.is_full_rank().then_some(l)
}

fn entries(n: usize) -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
    prop::collection::vec((-4i64..5, -4i64..5, 0i64..3), n * (n + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn operations_agree(raw1 in entries(3), raw2 in entries(3), sc1 in prop::collection::vec(-1i64..2, 4), sc2 in prop::collection::vec(-1i64..2, 4), which in 0usize..5) {
        let cases: [(u64, &[i64]); 5] = [(3, &[1, 1, 3]), (3, &[1, 3, 3]), (3, &[1, 2, 9]), (5, &[1, 5, 2]), (7, &[3, 1, 7])];
        let s = space(cases[which].0, cases[which].1);
        let f = FastSpace::new(s.clone()).unwrap();
        let (Some(l1), Some(l2)) = (gen_lattice(&s, &raw1, &sc1), gen_lattice(&s, &raw2, &sc2)) else { return Ok(()) };
        let k1 = f.key_of(&l1).unwrap();
        let k2 = f.key_of(&l2).unwrap();
        prop_assert_eq!(&f.lattice_of(&k1), &l1);
        prop_assert_eq!(f.lattice_of(&f.sum(&k1, &k2).unwrap()), l1.sum(&l2).unwrap());
        prop_assert_eq!(f.lattice_of(&f.intersect(&k1, &k2).unwrap()), l1.intersect(&l2).unwrap());
        prop_assert_eq!(f.lattice_of(&f.dual(&k1).unwrap()), l1.dual().unwrap());
        prop_assert_eq!(f.vertex_type(&k1).unwrap(), l1.vertex_type());
        prop_assert_eq!(f.contains(&k1, &k2).unwrap(), l2.is_sublattice_of(&l1).unwrap());
        let dd = f.std_dual(&f.std_dual(&k1).unwrap()).unwrap();
        prop_assert_eq!(&dd, &k1);
        let lhs = f.dual(&f.sum(&k1, &k2).unwrap()).unwrap();
        let rhs = f.intersect(&f.dual(&k1).unwrap(), &f.dual(&k2).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let (a, b) = f.window_exponents(&f.anchor(&k1).unwrap(), &k2).unwrap();
        prop_assert!(l1.scaled(a as i64).is_sublattice_of(&l2).unwrap());
        prop_assert!(l2.is_sublattice_of(&l1.scaled(-(b as i64))).unwrap());
        if a > 0 { prop_assert!(!l1.scaled(a as i64 - 1).is_sublattice_of(&l2).unwrap()); }
        if b > 0 { prop_assert!(!l2.is_sublattice_of(&l1.scaled(-(b as i64) + 1)).unwrap()); }
    }

    #[test]
    fn frame_changes_agree(raw in entries(3), sc in prop::collection::vec(-1i64..2, 4), m in prop::collection::vec(-3i64..4, 9), den in 0u32..2) {
        let s = space(3, &[1, 1, 3]);
        let f = FastSpace::new(s.clone()).unwrap();
        let Some(l) = gen_lattice(&s, &raw, &sc) else { return Ok(()) };
        let ctx = s.ctx();
        let pm: Vec<Vec<E>> = (0..3).map(|i| (0..3).map(|j| E::from_parts(m[3 * i + j], 3i64.pow(den), 0, 1)).collect()).collect();
        let Ok(tr) = f.transform(&pm) else { return Ok(()) };
        let cols: Vec<Vec<E>> = l.basis().iter().map(|b| (0..3).map(|i| (0..3).fold(E::zero(), |acc, j| &acc + &ctx.mul(&pm[i][j], &b[j]))).collect()).collect();
        let Ok(img) = Lattice::from_generators(s.clone(), &cols) else { return Ok(()) };
        if !img.is_full_rank() { return Ok(()) }
        let key = f.map(&tr, &f.key_of(&l).unwrap()).unwrap();
        prop_assert_eq!(f.lattice_of(&key), img);
    }
}
