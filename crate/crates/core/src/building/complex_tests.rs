use super::*;
use crate::building::tests::{building, type_one};

#[test]
fn balls() {
    let b = building(3, &[1, 1, 3]);
    let v = type_one(&b);
    let b0 = ball(&b, &v, 0).unwrap();
    assert_eq!(b0.vertices(), std::slice::from_ref(&v));
    let b1 = ball(&b, &v, 1).unwrap();
    assert_eq!(b1.len(), 1 + b.neighbors(&v).unwrap().len());
    let b2 = ball(&b, &v, 2).unwrap();
    assert!(b1.vertices().iter().all(|w| b2.contains(w)));
    for &(i, j) in b2.edges() {
        let (x, y) = (&b2.vertices()[i], &b2.vertices()[j]);
        assert!(b.contains(x, y).unwrap() || b.contains(y, x).unwrap());
    }
    assert_eq!(connected_components(&b2).len(), 1);
}

#[test]
fn meets_and_distance() {
    let b = building(3, &[1, 1, 3]);
    let v = type_one(&b);
    let up = b.neighbors_above(&v, 3).unwrap();
    let s = ComplexSubset::from_vertices(&b, [up[0].clone()]).unwrap();
    assert!(!s.is_down_closed());
    assert!(b.meets_as_vertex(&up[0], &s).unwrap());
    assert!(b.meets_as_vertex(&up[1], &s).unwrap());
    assert!(!b.meets_as_vertex(&up[1], &ComplexSubset::empty()).unwrap());
    assert_eq!(distance(&b, &up[0], &s, 3).unwrap(), Distance::Finite(0));
    assert_eq!(distance(&b, &up[1], &s, 3).unwrap(), Distance::Finite(1));
    assert_eq!(distance(&b, &v, &s, 3), Err(Error::NotMaximalType));
    let pair = ComplexSubset::from_vertices(&b, [up[0].clone(), up[1].clone()]).unwrap();
    assert_eq!(connected_components(&pair).len(), 2);
    let tri = ComplexSubset::from_vertices(&b, [up[0].clone(), up[1].clone(), v.clone()]).unwrap();
    assert_eq!(connected_components(&tri).len(), 1);
    let far = ComplexSubset::from_vertices(
        &b,
        [b.neighbors_below(&up[1], 1).unwrap().into_iter().find(|w| w != &v).unwrap()],
    )
    .unwrap();
    let d = distance(&b, &up[0], &far, 1).unwrap();
    assert_eq!(d, Distance::Unreachable(1));
    assert_eq!(distance(&b, &up[0], &far, 4).unwrap(), Distance::Finite(2));
}

#[test]
fn restriction_and_depth() {
    let b = building(3, &[1, 1, 3]);
    let seed = type_one(&b);
    let w = ball(&b, &seed, 2).unwrap();
    assert_eq!(w.depth(w.index_of(&seed).unwrap()), Some(0));
    assert!(w.vertices().iter().enumerate().all(|(i, _)| w.depth(i).unwrap() <= 2));
    let inner = w.restrict(|i| w.depth(i).unwrap() <= 1);
    let direct = ball(&b, &seed, 1).unwrap();
    assert_eq!(inner, direct);
    let low = w.restrict(|i| w.vertices()[i].vertex_type() == 0);
    assert!(low.edges().is_empty());
}

#[test]
fn ball_edges_match_induced_subcomplex() {
    for (d, r) in [(&[1, 1, 3][..], 2), (&[1, 1, 1, 3][..], 2), (&[1, 1, 1, 3][..], 1)] {
        let b = building(3, d);
        let v = type_one(&b);
        let s = ball(&b, &v, r).unwrap();
        let full = ComplexSubset::from_vertices(&b, s.vertices().iter().cloned()).unwrap();
        assert_eq!(s, full);
    }
}
