//! Rational-case recovery: dual cones, Hilbert bases, binomial relations,
//! class groups, Gale transforms, stabilizer comparison and the global
//! quotient presentation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::calibration::Calibration;
use crate::chart::{assemble, choose_basis_subfamily, choose_completion, linear_transition, Chart, ChartError};
use crate::cone::{primitive, Cone, ConeError};
use crate::fan::CalibratedFan;
use crate::linalg::{int_kernel_scalar, IntMatrix, LinalgError, ScalarMatrix, ScalarVector};
use crate::scalar::Scalar;

/// Largest number of lattice points or monomials enumerated.
pub const ENUMERATION_CAP: usize = 1_000_000;
pub const DEFAULT_DEGREE_BOUND: usize = 6;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ClassicalError {
    #[error("enumeration of {0} points exceeds the cap")]
    ScaleExceeded(usize),
    #[error("not a classical calibration: {0}")]
    NotClassical(String),
    #[error("cone has irrational generators")]
    Irrational,
    #[error("cone is not strongly convex")]
    NotStronglyConvex,
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type IntVec = Vec<BigInt>;

fn to_int_vec(v: &[Scalar]) -> Option<IntVec> {
    let rats: Option<Vec<_>> = v.iter().map(Scalar::as_rational).collect();
    Some(primitive(&rats?))
}

fn to_scalar_vec(v: &[BigInt]) -> ScalarVector {
    v.iter().cloned().map(Scalar::from_bigint).collect()
}

/// A calibration with integer columns and no virtual indices.
#[derive(Clone, Debug)]
pub struct ClassicalContext {
    cal: Calibration,
    columns: Vec<IntVec>,
}

impl ClassicalContext {
    pub fn new(cal: &Calibration) -> Result<Self, ClassicalError> {
        if !cal.virtual_set().is_empty() {
            return Err(ClassicalError::NotClassical("virtual set is not empty".into()));
        }
        let mut columns = Vec::with_capacity(cal.n());
        for i in 0..cal.n() {
            let col = cal.column(i);
            let ints: Option<IntVec> = col.iter().map(Scalar::as_integer).collect();
            match ints {
                Some(c) => columns.push(c),
                None => return Err(ClassicalError::NotClassical(format!("column {i} is not integral"))),
            }
        }
        Ok(ClassicalContext { cal: cal.clone(), columns })
    }

    pub fn calibration(&self) -> &Calibration {
        &self.cal
    }

    pub fn column(&self, i: usize) -> &IntVec {
        &self.columns[i]
    }
}

/// `σ^∨`.
pub fn dual_cone(c: &Cone) -> Result<Cone, ClassicalError> {
    Ok(c.dual()?)
}

fn integer_rays(c: &Cone) -> Result<Vec<IntVec>, ClassicalError> {
    if !c.is_strongly_convex()? {
        return Err(ClassicalError::NotStronglyConvex);
    }
    c.extreme_ray_vectors()?
        .iter()
        .map(|r| to_int_vec(r).ok_or(ClassicalError::Irrational))
        .collect()
}

/// Integer facet normals and equations of a rational cone.
struct IntegerCone {
    ineqs: Vec<Vec<i64>>,
    eqs: Vec<Vec<i64>>,
}

impl IntegerCone {
    fn new(c: &Cone) -> Result<Self, ClassicalError> {
        let conv = |vs: &[ScalarVector]| -> Result<Vec<Vec<i64>>, ClassicalError> {
            vs.iter()
                .map(|v| {
                    let p = to_int_vec(v).ok_or(ClassicalError::Irrational)?;
                    p.iter().map(|x| x.to_i64().ok_or(ClassicalError::ScaleExceeded(usize::MAX))).collect()
                })
                .collect()
        };
        Ok(IntegerCone {
            ineqs: conv(c.facets()?)?,
            eqs: conv(c.equations()?)?,
        })
    }

    fn contains(&self, x: &[i64]) -> bool {
        let dot = |a: &Vec<i64>| a.iter().zip(x).map(|(p, q)| p * q).sum::<i64>();
        self.ineqs.iter().all(|a| dot(a) >= 0) && self.eqs.iter().all(|a| dot(a) == 0)
    }

    /// Positive on every nonzero point of a strongly convex cone.
    fn grade(&self, x: &[i64]) -> i64 {
        self.ineqs.iter().map(|a| a.iter().zip(x).map(|(p, q)| p * q).sum::<i64>()).sum()
    }
}

/// Calls `f` on every integer point of the box `lo..=hi`.
fn for_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64]) -> Result<(), ClassicalError>) -> Result<(), ClassicalError> {
    let mut size: usize = 1;
    for (a, b) in lo.iter().zip(hi) {
        size = size.saturating_mul((b - a + 1) as usize);
    }
    if size > ENUMERATION_CAP {
        return Err(ClassicalError::ScaleExceeded(size));
    }
    let mut x = lo.to_vec();
    loop {
        f(&x)?;
        let mut k = 0;
        loop {
            if k == x.len() {
                return Ok(());
            }
            if x[k] < hi[k] {
                x[k] += 1;
                break;
            }
            x[k] = lo[k];
            k += 1;
        }
    }
}

/// Minimal generating set of the semigroup `σ ∩ Z^d`, sorted.
///
/// Candidates are the lattice points of the box around the zonotope
/// `Σ [0,1]·r_i` of the primitive extreme rays; the irreducible ones are kept.
pub fn hilbert_basis(c: &Cone) -> Result<Vec<IntVec>, ClassicalError> {
    let d = c.ambient_dim();
    let rays = integer_rays(c)?;
    let mut lo = vec![0i64; d];
    let mut hi = vec![0i64; d];
    for r in &rays {
        for j in 0..d {
            let x = r[j].to_i64().ok_or(ClassicalError::ScaleExceeded(usize::MAX))?;
            if x < 0 {
                lo[j] += x;
            } else {
                hi[j] += x;
            }
        }
    }
    let ic = IntegerCone::new(c)?;
    let mut points: Vec<Vec<i64>> = Vec::new();
    for_box(&lo, &hi, |x| {
        if x.iter().any(|v| *v != 0) && ic.contains(x) {
            points.push(x.to_vec());
        }
        Ok(())
    })?;
    points.sort_by_key(|p| ic.grade(p));
    let mut basis: Vec<IntVec> = Vec::new();
    for (k, x) in points.iter().enumerate() {
        let gx = ic.grade(x);
        let reducible = points[..k].iter().take_while(|y| ic.grade(y) < gx).any(|y| {
            let diff: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            ic.contains(&diff)
        });
        if !reducible {
            basis.push(x.iter().map(|&v| BigInt::from(v)).collect());
        }
    }
    basis.sort();
    Ok(basis)
}

/// A binomial relation `Π g_i^{lhs_i} = Π g_i^{rhs_i}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Binomial {
    pub lhs: Vec<u64>,
    pub rhs: Vec<u64>,
}

impl Binomial {
    fn from_difference(u: &[i64]) -> Binomial {
        let lhs = u.iter().map(|&x| x.max(0) as u64).collect();
        let rhs = u.iter().map(|&x| (-x).max(0) as u64).collect();
        Binomial { lhs, rhs }
    }

    /// `Σ lhs_i g_i = Σ rhs_i g_i`.
    pub fn holds(&self, gens: &[IntVec]) -> bool {
        let d = gens.first().map_or(0, Vec::len);
        (0..d).all(|j| {
            let l: BigInt = gens.iter().zip(&self.lhs).map(|(g, &a)| &g[j] * BigInt::from(a)).sum();
            let r: BigInt = gens.iter().zip(&self.rhs).map(|(g, &a)| &g[j] * BigInt::from(a)).sum();
            l == r
        })
    }
}

#[derive(Clone, Debug)]
pub struct ToricRelations {
    pub relations: Vec<Binomial>,
    /// every fiber of monomials of degree at most this bound is connected
    pub degree_bound: usize,
}

fn monomials(m: usize, bound: usize) -> Result<Vec<Vec<u64>>, ClassicalError> {
    let mut out = vec![vec![0u64; m]];
    let mut frontier = out.clone();
    for _ in 0..bound {
        let mut next = Vec::new();
        for a in &frontier {
            let last = a.iter().rposition(|&x| x > 0).unwrap_or(0);
            for i in last..m {
                let mut b = a.clone();
                b[i] += 1;
                next.push(b);
            }
        }
        out.extend(next.iter().cloned());
        if out.len() > ENUMERATION_CAP {
            return Err(ClassicalError::ScaleExceeded(out.len()));
        }
        frontier = next;
    }
    Ok(out)
}

fn components(fiber: &[Vec<u64>], moves: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let index: BTreeMap<&Vec<u64>, usize> = fiber.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut seen = vec![false; fiber.len()];
    let mut out = Vec::new();
    for start in 0..fiber.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for u in moves {
                for sign in [1i64, -1] {
                    let b: Option<Vec<u64>> = fiber[i]
                        .iter()
                        .zip(u)
                        .map(|(&a, &x)| u64::try_from(a as i64 + sign * x).ok())
                        .collect();
                    if let Some(&j) = b.as_ref().and_then(|b| index.get(b)) {
                        if !seen[j] {
                            seen[j] = true;
                            comp.push(j);
                            queue.push_back(j);
                        }
                    }
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Binomial generators of the relations among `gens`: a lattice basis of the
/// integer relations, extended until every fiber of monomials of degree at
/// most `degree_bound` is connected by the moves.
pub fn toric_relations(gens: &[IntVec], degree_bound: usize) -> Result<ToricRelations, ClassicalError> {
    let m = gens.len();
    if m == 0 {
        return Ok(ToricRelations { relations: vec![], degree_bound });
    }
    let d = gens[0].len();
    let mut cols = IntMatrix::zeros(d, m);
    for (c, g) in gens.iter().enumerate() {
        for (r, x) in g.iter().enumerate() {
            cols.set(r, c, x.clone());
        }
    }
    let mut moves: Vec<Vec<i64>> = Vec::new();
    for u in cols.int_kernel() {
        let v: Option<Vec<i64>> = u.iter().map(ToPrimitive::to_i64).collect();
        moves.push(v.ok_or(ClassicalError::ScaleExceeded(usize::MAX))?);
    }
    let mut fibers: BTreeMap<IntVec, Vec<Vec<u64>>> = BTreeMap::new();
    for a in monomials(m, degree_bound)? {
        let img: IntVec = (0..d).map(|j| gens.iter().zip(&a).map(|(g, &x)| &g[j] * BigInt::from(x)).sum()).collect();
        fibers.entry(img).or_default().push(a);
    }
    let mut ordered: Vec<Vec<Vec<u64>>> = fibers.into_values().filter(|f| f.len() > 1).collect();
    ordered.sort_by_key(|f| f.iter().map(|a| a.iter().sum::<u64>()).min());
    for fiber in &ordered {
        let comps = components(fiber, &moves);
        if comps.len() < 2 {
            continue;
        }
        let rep = |c: &Vec<usize>| c.iter().map(|&i| &fiber[i]).min_by_key(|a| (a.iter().sum::<u64>(), (*a).clone())).cloned().unwrap();
        let base = rep(&comps[0]);
        for c in &comps[1..] {
            let other = rep(c);
            moves.push(base.iter().zip(&other).map(|(&a, &b)| a as i64 - b as i64).collect());
        }
    }
    let mut relations: Vec<Binomial> = moves.iter().map(|u| Binomial::from_difference(u)).collect();
    relations.sort();
    relations.dedup();
    debug_assert!(relations.iter().all(|b| b.holds(gens)));
    Ok(ToricRelations { relations, degree_bound })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassGroup {
    pub free_rank: usize,
    /// invariant factors greater than one
    pub torsion: Vec<BigInt>,
}

/// `coker(M : Z^d → Z^I)` with `M` the matrix of rows `v_i`, `i ∈ I`.
pub fn class_group(ctx: &ClassicalContext, rays: &BTreeSet<usize>) -> ClassGroup {
    let d = ctx.cal.d();
    let rows: Vec<IntVec> = rays.iter().map(|&i| ctx.column(i).clone()).collect();
    if rows.is_empty() {
        return ClassGroup { free_rank: 0, torsion: vec![] };
    }
    let m = IntMatrix::from_big_rows(rows, d);
    let factors = m.invariant_factors();
    ClassGroup {
        free_rank: rays.len() - factors.len(),
        torsion: factors.into_iter().filter(|x| !x.is_one()).collect(),
    }
}

#[derive(Clone, Debug)]
pub struct GaleTransform {
    /// `N × r`, columns a Z-basis of the integer kernel of `h`
    pub k: Vec<IntVec>,
    pub kernel_rank: usize,
    pub expected_rank: usize,
    pub certified_exact: bool,
}

pub fn gale_transform(cal: &Calibration) -> Result<GaleTransform, ClassicalError> {
    let basis = int_kernel_scalar(cal.matrix());
    for b in &basis {
        if !cal.matrix().mul_vec(&to_scalar_vec(b))?.iter().all(Scalar::is_zero) {
            return Err(ClassicalError::Linalg(LinalgError::Inconsistent));
        }
    }
    let expected = cal.n() - cal.d();
    let r = basis.len();
    let n = cal.n();
    let k = (0..n).map(|i| basis.iter().map(|b| b[i].clone()).collect()).collect();
    Ok(GaleTransform {
        k,
        kernel_rank: r,
        expected_rank: expected,
        certified_exact: r == expected,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerModel {
    pub connected_dim: usize,
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerReport {
    pub cone_id: usize,
    pub calibrated: StabilizerModel,
    pub gale: StabilizerModel,
    pub verdict: String,
}

/// Stabilizers over the deepest stratum `C^Ĩ × T^J` of the chart: the
/// calibrated model gives `E(ker h̄_σ) × Ξ`, the Gale model
/// `k⁻¹(ker h_σC + Ξ)`, a vector group of dimension `dim ker h̄_σ` with
/// discrete part `Ξ / (Ξ ∩ Z^I)`.
pub fn stabilizer_report(cal: &Calibration, chart: &Chart) -> Result<StabilizerReport, ClassicalError> {
    let kdim = chart.ker_basis.len();
    let xi = &chart.xi;
    let calibrated = StabilizerModel {
        connected_dim: kdim,
        free_rank: xi.rank,
        torsion: vec![],
    };
    // Ξ ∩ Z^I, in coordinates on the basis of Ξ
    let sub = int_kernel_scalar(&cal.matrix().select_columns(&chart.i_set));
    let (free_rank, torsion) = if xi.rank == 0 {
        (0, vec![])
    } else {
        let basis = IntMatrix::from_columns(cal.n(), &xi.basis);
        let mut coords = Vec::new();
        for s in &sub {
            let mut full = vec![BigInt::zero(); cal.n()];
            for (&i, x) in chart.i_set.iter().zip(s) {
                full[i] = x.clone();
            }
            coords.push(basis.solve_int(&full)?);
        }
        if coords.is_empty() {
            (xi.rank, vec![])
        } else {
            let m = IntMatrix::from_big_rows(coords, xi.rank);
            let f = m.invariant_factors();
            (xi.rank - f.len(), f.into_iter().filter(|x| !x.is_one()).collect())
        }
    };
    let gale = StabilizerModel {
        connected_dim: kdim,
        free_rank,
        torsion,
    };
    let verdict = if (calibrated.connected_dim, calibrated.free_rank) != (gale.connected_dim, gale.free_rank) {
        "distinct"
    } else {
        "indistinguishable at this invariant"
    };
    Ok(StabilizerReport {
        cone_id: chart.cone_id,
        calibrated,
        gale,
        verdict: verdict.into(),
    })
}

/// Global presentation `[S_A × T^Ã / Z^{N−d} × E(ker h_A)]`.
#[derive(Clone, Debug)]
pub struct GitPresentation {
    pub a: Vec<usize>,
    pub a_tilde: Vec<usize>,
    /// cones of `Δ_h ∩ R^A`, as subsets of `A`
    pub cones: Vec<BTreeSet<usize>>,
    /// chart-shaped data over the labels `A ∪ Ã`; `cone_id` is `usize::MAX`
    pub chart: Chart,
}

pub fn git_presentation(cf: &CalibratedFan) -> Result<GitPresentation, ClassicalError> {
    let a: Vec<usize> = cf.used_indices().into_iter().collect();
    let a_basis = choose_basis_subfamily(&cf.cal, &a);
    let a_tilde = choose_completion(&cf.cal, usize::MAX, &a, &a_basis)?;
    let mut cones = BTreeSet::new();
    for c in cf.fan.cones() {
        let rays: Vec<usize> = c.rays.iter().copied().collect();
        for mask in 0u64..(1u64 << rays.len()) {
            cones.insert(rays.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &r)| r).collect::<BTreeSet<usize>>());
        }
    }
    let chart = assemble(&cf.cal, usize::MAX, a.clone(), a_basis, a_tilde.clone())?;
    Ok(GitPresentation {
        a,
        a_tilde,
        cones: cones.into_iter().collect(),
        chart,
    })
}

impl GitPresentation {
    /// Linear map from the global coordinates `A ∪ Ã` to the chart of a cone,
    /// with `h̄_σ · g = h_A` checked.
    pub fn to_chart(&self, chart: &Chart) -> Result<ScalarMatrix, ClassicalError> {
        let g = linear_transition(&self.chart, chart)?;
        if chart.h_bar.mul(&g)? != self.chart.h_bar {
            return Err(ClassicalError::Chart(ChartError::TransitionFailure("global coordinates do not restrict".into())));
        }
        Ok(g)
    }
}

/// Whether the lattice point `x` of the rational cone `c` is a nonnegative
/// integer combination of `gens`.
pub fn in_semigroup(c: &Cone, gens: &[IntVec], x: &[BigInt]) -> Result<bool, ClassicalError> {
    fn go(ic: &IntegerCone, gens: &[Vec<i64>], x: Vec<i64>, memo: &mut BTreeMap<Vec<i64>, bool>) -> bool {
        if x.iter().all(|v| *v == 0) {
            return true;
        }
        if let Some(&r) = memo.get(&x) {
            return r;
        }
        let gx = ic.grade(&x);
        let mut found = false;
        for g in gens {
            let rest: Vec<i64> = x.iter().zip(g).map(|(a, b)| a - b).collect();
            if ic.contains(&rest) && ic.grade(&rest) < gx && go(ic, gens, rest, memo) {
                found = true;
                break;
            }
        }
        memo.insert(x, found);
        found
    }
    let ic = IntegerCone::new(c)?;
    let small = |v: &[BigInt]| -> Result<Vec<i64>, ClassicalError> {
        v.iter().map(|a| a.to_i64().ok_or(ClassicalError::ScaleExceeded(usize::MAX))).collect()
    };
    let gens: Vec<Vec<i64>> = gens.iter().map(|g| small(g)).collect::<Result<_, _>>()?;
    let x = small(x)?;
    if !ic.contains(&x) {
        return Ok(false);
    }
    Ok(go(&ic, &gens, x, &mut BTreeMap::new()))
}
