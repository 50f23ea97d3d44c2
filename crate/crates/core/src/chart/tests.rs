use std::collections::BTreeSet;
use std::sync::Arc;

use num_rational::BigRational;
use proptest::prelude::*;

use super::*;
use crate::fan::{index_set, Fan};
use crate::linalg::int_vector;
use crate::scalar::{Interval, IrrationalBasis, ScalarField, Symbol};

fn q() -> ScalarField {
    ScalarField::rational()
}

fn alpha_field() -> ScalarField {
    let e = Interval::new(BigRational::new(14.into(), 10.into()), BigRational::new(15.into(), 10.into()));
    let sym = Symbol::new("alpha", e, None).unwrap();
    ScalarField::new(Arc::new(IrrationalBasis::new(vec![sym]).unwrap()))
}

fn s(v: &[usize]) -> BTreeSet<usize> {
    index_set(v)
}

fn closed(cal: Calibration, maximal: &[&[usize]]) -> CalibratedFan {
    let fan = Fan::over_calibration(&cal, maximal.iter().map(|m| s(m)).collect()).unwrap().close().unwrap();
    let sets: Vec<BTreeSet<usize>> = fan.cones().iter().map(|c| c.rays.clone()).collect();
    let gens = sets.iter().flatten().copied().collect();
    CalibratedFan::new(cal, sets, gens).unwrap()
}

fn int_fan(d: usize, cols: &[Vec<i64>], maximal: &[&[usize]]) -> CalibratedFan {
    closed(Calibration::from_int_columns(&q(), d, cols, &[]).unwrap(), maximal)
}

fn ex_max(a: i64, b: i64, c: i64) -> CalibratedFan {
    int_fan(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![a, -b, c]], &[&[0, 1, 2, 3]])
}

fn quadrants() -> CalibratedFan {
    int_fan(2, &[vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]])
}

fn id_of(cf: &CalibratedFan, rays: &[usize]) -> usize {
    cf.fan.find(&s(rays)).unwrap()
}

fn ints(v: &[i64]) -> ScalarVector {
    int_vector(v)
}

/// Every chart vector `x` with `h̄ x = 0` is a combination of the basis, and
/// each basis vector is killed.
fn kernel_matches(chart: &Chart, expected: &[ScalarVector]) -> bool {
    if chart.ker_basis.len() != expected.len() {
        return false;
    }
    let m = ScalarMatrix::from_columns(chart.num_coords(), &chart.ker_basis).unwrap();
    expected.iter().all(|e| chart.in_kernel(e) && m.spans(e))
}

#[test]
fn ex_max_chart_kernel() {
    for (a, b, c) in [(1, 1, 1), (2, 3, 5), (1, -2, 4)] {
        let cf = ex_max(a, b, c);
        let id = id_of(&cf, &[0, 1, 2, 3]);
        let chart = build_chart(&cf, id).unwrap();
        assert_eq!(chart.i_tilde, vec![0, 1, 2]);
        assert!(chart.j_set.is_empty());
        assert_eq!(chart.chi, vec![0, 1, 2, 3]);
        assert!(chart.verify_invariant());
        assert!(kernel_matches(&chart, &[ints(&[-a, b, -c, 1])]));
        assert!(!chart.matches_standard_presentation());
    }
}

#[test]
fn irrational_ex_max_kernel() {
    let basis = IrrationalBasis::sqrt_symbols(&[("a", 2), ("b", 3), ("c", 5)]).unwrap();
    let f = ScalarField::new(Arc::new(basis));
    let (a, b, c) = (Scalar::symbol(0), Scalar::symbol(1), Scalar::symbol(2));
    let cols = vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1]), vec![a.clone(), -&b, c.clone()]];
    let cf = closed(Calibration::from_columns(&f, 3, &cols, &[]).unwrap(), &[&[0, 1, 2, 3]]);
    let chart = build_chart(&cf, id_of(&cf, &[0, 1, 2, 3])).unwrap();
    assert!(chart.verify_invariant());
    assert!(kernel_matches(&chart, &[vec![-a, b, -c, Scalar::one()]]));
    assert_eq!(chart.xi.rank, 0);
}

#[test]
fn quantum_line_chart() {
    let f = alpha_field();
    let alpha = Scalar::symbol(0);
    let cal = Calibration::from_columns(&f, 1, &[vec![Scalar::one()], vec![alpha.clone()]], &[]).unwrap();
    let cf = CalibratedFan::new(cal, vec![s(&[]), s(&[0])], s(&[0])).unwrap();
    let chart = build_chart(&cf, 1).unwrap();
    assert_eq!(chart.labels, vec![0]);
    assert_eq!(chart.phi.col(1), vec![alpha.clone()]);
    assert_eq!(chart.phi.col(0), vec![Scalar::one()]);
    assert!(chart.matches_standard_presentation());
    let zero = build_chart(&cf, 0).unwrap();
    assert_eq!(zero.j_set, vec![0]);
    assert!(zero.i_set.is_empty());
    assert_eq!(zero.multiplicative, vec![0]);
    assert_eq!(zero.phi.col(1), vec![alpha]);
}

#[test]
fn non_maximal_cone_in_four_space() {
    let (a, b, c) = (2, 3, 7);
    let cols = vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![a, -b, c, 0]];
    let cf = int_fan(4, &cols, &[&[0, 1, 2, 4]]);
    let chart = build_chart(&cf, id_of(&cf, &[0, 1, 2, 4])).unwrap();
    assert_eq!(chart.i_tilde, vec![0, 1, 2]);
    assert_eq!(chart.j_set, vec![3]);
    assert_eq!(chart.labels, vec![0, 1, 2, 4, 3]);
    assert_eq!(chart.multiplicative, vec![3]);
    assert!(kernel_matches(&chart, &[ints(&[-a, b, -c, 1, 0])]));
    assert!(chart.verify_invariant());
}

#[test]
fn chi_is_minimal() {
    assert_eq!(chi_permutation(4, 3, &[0, 1, 2], &[]), vec![0, 1, 2, 3]);
    assert_eq!(chi_permutation(4, 3, &[0, 1, 3], &[]), vec![0, 1, 3, 2]);
    assert_eq!(chi_permutation(4, 3, &[1, 2, 3], &[]), vec![3, 1, 2, 0]);
    assert_eq!(chi_permutation(5, 3, &[0, 1], &[3]), vec![0, 1, 3, 2, 4]);
    let p = chi_permutation(6, 3, &[4], &[5, 0]);
    assert_eq!(invert_permutation(&invert_permutation(&p)), p);
}

#[test]
fn choice_independence_over_basis_subfamilies() {
    let cf = ex_max(1, 1, 1);
    let id = id_of(&cf, &[0, 1, 2, 3]);
    let subsets = [vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
    let charts: Vec<Chart> = subsets
        .iter()
        .map(|t| {
            let choice = ChartChoice {
                i_tilde: Some(t.clone()),
                completion: None,
            };
            build_chart_with(&cf, id, &choice).unwrap()
        })
        .collect();
    for a in &charts {
        assert!(a.verify_invariant());
        for b in &charts {
            assert!(verify_choice_independence(a, b).unwrap());
        }
    }
    let bad = ChartChoice {
        i_tilde: Some(vec![0, 1]),
        completion: None,
    };
    assert!(matches!(build_chart_with(&cf, id, &bad), Err(ChartError::InvalidChoice(_))));
}

#[test]
fn choice_independence_detects_different_completions() {
    let cols = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1]];
    let cf = int_fan(3, &cols, &[&[0, 1]]);
    let id = id_of(&cf, &[0, 1]);
    let a = build_chart(&cf, id).unwrap();
    let b = build_chart_with(&cf, id, &ChartChoice { i_tilde: None, completion: Some(vec![3]) }).unwrap();
    assert_eq!(verify_choice_independence(&a, &b), Err(ChartError::DifferentCompletions(id)));
}

#[test]
fn torus_presentation_diagram() {
    let cf = ex_max(2, 3, 5);
    let chart = build_chart(&cf, id_of(&cf, &[0, 3])).unwrap();
    assert_eq!(chart.chi, vec![0, 3, 1, 2]);
    let t = torus_presentation(&cf, &chart).unwrap();
    assert!(t.verify().is_ok());
    let mut broken = t.clone();
    broken.big_h.set(0, 0, 2.into());
    assert!(matches!(broken.verify(), Err(ChartError::DiagramFailure(_))));
}

#[test]
fn torus_presentation_with_virtual_column() {
    let f = alpha_field();
    let cols = vec![vec![Scalar::one(), Scalar::zero()], vec![Scalar::zero(), Scalar::one()], vec![Scalar::one(), Scalar::symbol(0)]];
    let cal = Calibration::from_columns(&f, 2, &cols, &[2]).unwrap();
    let cf = CalibratedFan::new(cal, vec![s(&[]), s(&[1])], s(&[1])).unwrap();
    let chart = build_chart(&cf, 1).unwrap();
    assert_eq!(chart.j_set, vec![0]);
    let t = torus_presentation(&cf, &chart).unwrap();
    assert_eq!(t.s.len(), 1);
    assert_eq!(chart.chi[t.s[0].0], 2);
}

#[test]
fn face_restriction_regions() {
    let cf = ex_max(1, 1, 1);
    let sigma = build_chart(&cf, id_of(&cf, &[0, 1, 2, 3])).unwrap();
    let tau = build_chart(&cf, id_of(&cf, &[0, 1])).unwrap();
    let r = face_restriction(&cf, &sigma, &tau).unwrap();
    assert_eq!(r.region.additive, vec![0, 1]);
    assert_eq!(r.region.multiplicative, vec![2, 3]);
    assert_eq!(sigma.h_bar.mul(&r.f).unwrap(), tau.h_bar);

    let quad = quadrants();
    let a = build_chart(&quad, id_of(&quad, &[0, 1])).unwrap();
    let b = build_chart(&quad, id_of(&quad, &[2])).unwrap();
    assert!(matches!(face_restriction(&quad, &a, &b), Err(ChartError::NotAFace { .. })));
}

#[test]
fn gluing_complete_quadrant_fan() {
    let cf = quadrants();
    let atlas = build_atlas(&cf).unwrap();
    let a = &atlas[id_of(&cf, &[0, 1])];
    let b = &atlas[id_of(&cf, &[1, 2])];
    let (fwd, bwd) = gluing(&cf, a, b).unwrap();
    assert_eq!(fwd.union, vec![0, 1, 2]);
    assert_eq!(fwd.k_from, vec![2]);
    assert_eq!(fwd.k_to, vec![0]);
    assert_eq!(fwd.open_from.additive, vec![1]);
    assert_eq!(fwd.open_from.multiplicative, vec![0]);
    assert_eq!(bwd.open_from.multiplicative, vec![2]);
    for x in &atlas {
        for y in &atlas {
            assert!(gluing(&cf, x, y).is_ok(), "cones {} {}", x.cone_id, y.cone_id);
        }
    }
}

#[test]
fn gluing_rejects_overlapping_cones() {
    let cal = Calibration::from_int_columns(&q(), 2, &[vec![1, 0], vec![0, 1], vec![1, 1], vec![-1, 2]], &[]).unwrap();
    let sets = vec![s(&[]), s(&[0]), s(&[1]), s(&[2]), s(&[3]), s(&[0, 1]), s(&[2, 3])];
    let cf = CalibratedFan::new(cal, sets, s(&[0, 1, 2, 3])).unwrap();
    let a = build_chart(&cf, 5).unwrap();
    let b = build_chart(&cf, 6).unwrap();
    assert_eq!(gluing(&cf, &a, &b).err(), Some(ChartError::NoCommonFace(5, 6)));
}

#[test]
fn cocycle_on_atlases() {
    let alpha = Scalar::symbol(0);
    let qline = Calibration::from_columns(&alpha_field(), 1, &[vec![Scalar::one()], vec![-alpha]], &[]).unwrap();
    for cf in [quadrants(), ex_max(2, 3, 5), closed(qline, &[&[0], &[1]])] {
        let atlas = build_atlas(&cf).unwrap();
        for a in &atlas {
            for b in &atlas {
                for c in &atlas {
                    assert!(verify_cocycle(a, b, c).unwrap());
                }
            }
        }
    }
}

#[test]
fn completion_cocycle_in_three_space() {
    let cols = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1], vec![1, 1, 2]];
    let cf = int_fan(3, &cols, &[&[0, 1]]);
    let id = id_of(&cf, &[0, 1]);
    let charts: Vec<Chart> = [2, 3, 4]
        .iter()
        .map(|&j| build_chart_with(&cf, id, &ChartChoice { i_tilde: None, completion: Some(vec![j]) }).unwrap())
        .collect();
    assert_eq!(charts[1].chi, vec![0, 1, 3, 2, 4]);
    let t01 = completion_transition(&charts[0], &charts[1]).unwrap();
    let t12 = completion_transition(&charts[1], &charts[2]).unwrap();
    let t02 = completion_transition(&charts[0], &charts[2]).unwrap();
    let composed = t12.compose(&t01).unwrap();
    assert_eq!(composed.map_linear, t02.map_linear);
    assert_eq!(composed.map_int, t02.map_int);
    let back = completion_transition(&charts[1], &charts[0]).unwrap().compose(&t01).unwrap();
    assert_eq!(back.map_linear, ScalarMatrix::identity(3));
    assert_eq!(back.map_int, IntMatrix::identity(5));
}

#[test]
fn quantum_line_bundle_transition() {
    let alpha = Scalar::symbol(0);
    let cal = Calibration::from_columns(&alpha_field(), 1, &[vec![Scalar::one()], vec![-alpha]], &[]).unwrap();
    let cf = closed(cal, &[&[0], &[1]]);
    let atlas = build_atlas(&cf).unwrap();
    let ts = bundle_transitions(&cf, &atlas).unwrap();
    assert_eq!(ts.len(), 1);
    let t = &ts[0];
    assert!(t.verified);
    assert_eq!(t.k_set, vec![1]);
    assert_eq!(t.t_map, IntMatrix::from_rows(&[vec![1]]));
}

#[test]
fn quadrant_bundle_transitions() {
    let cf = quadrants();
    let atlas = build_atlas(&cf).unwrap();
    let ts = bundle_transitions(&cf, &atlas).unwrap();
    assert_eq!(ts.len(), 4);
    assert!(ts.iter().all(|t| t.verified));
}

#[test]
fn forget_calibration_band_rank() {
    let cf = int_fan(2, &[vec![1, 0], vec![0, 1], vec![1, 1]], &[&[0, 1]]);
    let nc = forget_calibration(&build_chart(&cf, id_of(&cf, &[0, 1])).unwrap()).unwrap();
    assert_eq!(nc.band_rank, 1);
    assert_eq!(nc.lattice_generators.len(), 2);
    assert!(nc.kernel.is_empty());

    let basis = IrrationalBasis::sqrt_symbols(&[("a", 2), ("b", 3), ("c", 5)]).unwrap();
    let f = ScalarField::new(Arc::new(basis));
    let cols = vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1]), vec![Scalar::symbol(0), -Scalar::symbol(1), Scalar::symbol(2)]];
    let cf = closed(Calibration::from_columns(&f, 3, &cols, &[]).unwrap(), &[&[0, 1, 2, 3]]);
    let nc = forget_calibration(&build_chart(&cf, id_of(&cf, &[0, 1, 2, 3])).unwrap()).unwrap();
    assert_eq!(nc.band_rank, 0);
    assert_eq!(nc.lattice_generators.len(), 4);
    assert_eq!(nc.kernel.len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_ex_max_charts(a in -6i64..7, b in -6i64..7, c in 1i64..7, pick in 0usize..4) {
        prop_assume!(a != 0 && b != 0);
        let cf = ex_max(a, b, c);
        let id = id_of(&cf, &[0, 1, 2, 3]);
        let canonical = build_chart(&cf, id).unwrap();
        prop_assert!(canonical.verify_invariant());
        let subsets = [vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
        let choice = ChartChoice { i_tilde: Some(subsets[pick].clone()), completion: None };
        if let Ok(other) = build_chart_with(&cf, id, &choice) {
            prop_assert!(other.verify_invariant());
            prop_assert!(verify_choice_independence(&canonical, &other).unwrap());
            prop_assert!(torus_presentation(&cf, &other).is_ok());
        }
        let atlas = build_atlas(&cf).unwrap();
        for x in &atlas {
            prop_assert!(x.verify_invariant());
            prop_assert!(gluing(&cf, &canonical, x).is_ok());
        }
    }
}
