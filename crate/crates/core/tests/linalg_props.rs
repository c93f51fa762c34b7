mod common;

use std::sync::Arc;

use common::{field, rng};
use ncauth::linalg::{solve, solve_count, vandermonde};
use ncauth::{ExtField, Matrix};
use num_bigint::BigUint;
use rand::Rng;

fn random_matrix<R: Rng>(f: &Arc<ExtField>, rows: usize, cols: usize, r: &mut R) -> Matrix {
    let data = (0..rows * cols).map(|_| f.random(r)).collect();
    Matrix::from_vec(f, rows, cols, data).unwrap()
}

/// Random matrix of rank at most `rank`, so that degenerate cases show up.
fn low_rank<R: Rng>(f: &Arc<ExtField>, rows: usize, cols: usize, rank: usize, r: &mut R) -> Matrix {
    let a = random_matrix(f, rows, rank, r);
    let b = random_matrix(f, rank, cols, r);
    a.mul(&b).unwrap()
}

const FIELDS: [(u32, usize); 5] = [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)];

#[test]
fn rank_is_invariant_under_transpose() {
    let mut r = rng(10);
    for case in 0..1000 {
        let (q, l) = FIELDS[case % FIELDS.len()];
        let f = field(q, l);
        let (rows, cols) = (r.gen_range(1..6), r.gen_range(1..6));
        let m = low_rank(&f, rows, cols, r.gen_range(1..5), &mut r);
        assert_eq!(m.rank(), m.transpose().rank());
    }
}

#[test]
fn product_rank_is_bounded() {
    let mut r = rng(11);
    for case in 0..1000 {
        let f = field(FIELDS[case % FIELDS.len()].0, FIELDS[case % FIELDS.len()].1);
        let (a, b, c) = (r.gen_range(1..5), r.gen_range(1..5), r.gen_range(1..5));
        let x = low_rank(&f, a, b, r.gen_range(1..4), &mut r);
        let y = low_rank(&f, b, c, r.gen_range(1..4), &mut r);
        let p = x.mul(&y).unwrap();
        assert!(p.rank() <= x.rank().min(y.rank()));
    }
}

#[test]
fn rref_is_idempotent_and_preserves_rank() {
    let mut r = rng(12);
    for case in 0..1000 {
        let (q, l) = FIELDS[case % FIELDS.len()];
        let f = field(q, l);
        let m = low_rank(&f, r.gen_range(1..6), r.gen_range(1..6), r.gen_range(1..5), &mut r);
        let (e, pivots) = m.rref();
        let (e2, pivots2) = e.rref();
        assert_eq!(e, e2);
        assert_eq!(pivots, pivots2);
        assert_eq!(pivots.len(), m.rank());
        for (i, &p) in pivots.iter().enumerate() {
            assert_eq!(e.get(i, p), f.one());
            assert!((0..e.rows()).filter(|&j| j != i).all(|j| e.get(j, p).is_zero()));
        }
    }
}

#[test]
fn stacking_is_subadditive() {
    let mut r = rng(13);
    for case in 0..1000 {
        let (q, l) = FIELDS[case % FIELDS.len()];
        let f = field(q, l);
        let cols = r.gen_range(1..6);
        let a = low_rank(&f, r.gen_range(1..4), cols, r.gen_range(1..3), &mut r);
        let b = low_rank(&f, r.gen_range(1..4), cols, r.gen_range(1..3), &mut r);
        let s = a.vstack(&b).unwrap();
        assert!(s.rank() <= a.rank() + b.rank());
        assert!(s.rank() >= a.rank().max(b.rank()));
    }
}

/// Counts solutions of `A X = B` by trying every `X`.
fn enumerate_solutions(a: &Matrix, b: &Matrix) -> u64 {
    let f = a.field();
    let elems = f.elements().unwrap();
    let unknowns = a.cols() * b.cols();
    let total = (elems.len() as u64).pow(unknowns as u32);
    let mut count = 0;
    for code in 0..total {
        let mut c = code;
        let data = (0..unknowns)
            .map(|_| {
                let e = elems[(c % elems.len() as u64) as usize];
                c /= elems.len() as u64;
                e
            })
            .collect();
        let x = Matrix::from_vec(f, a.cols(), b.cols(), data).unwrap();
        if a.mul(&x).unwrap() == *b {
            count += 1;
        }
    }
    count
}

#[test]
fn solve_count_matches_enumeration() {
    let mut r = rng(14);
    for case in 0..300 {
        let (q, l) = [(2, 1), (2, 2), (3, 1)][case % 3];
        let f = field(q, l);
        let (rows, cols, rhs_cols) = (r.gen_range(1..4), r.gen_range(1..4), r.gen_range(1..3));
        if (f.order() as u32).pow((cols * rhs_cols) as u32) > 5000 {
            continue;
        }
        let a = low_rank(&f, rows, cols, r.gen_range(1..3), &mut r);
        // half the right-hand sides are consistent by construction
        let b = if r.gen_bool(0.5) {
            a.mul(&random_matrix(&f, cols, rhs_cols, &mut r)).unwrap()
        } else {
            random_matrix(&f, rows, rhs_cols, &mut r)
        };
        let expected = enumerate_solutions(&a, &b);
        let got = solve_count(&a, &b).unwrap();
        assert_eq!(got.count, BigUint::from(expected));
        assert_eq!(got.consistent, expected > 0);
        match solve(&a, &b).unwrap() {
            Some(x) => assert_eq!(a.mul(&x).unwrap(), b),
            None => assert_eq!(expected, 0),
        }
    }
}

#[test]
fn vandermonde_on_distinct_points_has_full_rank() {
    let mut r = rng(15);
    for _ in 0..200 {
        let f = field(3, 2);
        let mut pts = f.elements().unwrap();
        for i in (1..pts.len()).rev() {
            pts.swap(i, r.gen_range(0..=i));
        }
        let v = r.gen_range(1..6);
        let height = r.gen_range(1..6);
        let m = vandermonde(&f, &pts[..v], height).unwrap();
        assert_eq!(m.rank(), v.min(height));
    }
}

#[test]
fn shape_errors_are_reported() {
    let f = field(2, 1);
    let a = Matrix::zeros(&f, 2, 3);
    assert!(a.mul(&Matrix::zeros(&f, 2, 2)).is_err());
    assert!(a.vstack(&Matrix::zeros(&f, 1, 2)).is_err());
    assert!(a.hstack(&Matrix::zeros(&f, 3, 1)).is_err());
    assert!(Matrix::from_vec(&f, 2, 2, vec![f.one(); 3]).is_err());
}
