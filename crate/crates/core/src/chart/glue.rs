use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;

use super::{invert_permutation, Chart, ChartError};
use crate::fan::CalibratedFan;
use crate::linalg::{IntMatrix, ScalarMatrix};
use crate::scalar::Scalar;

/// Coordinates of a chart split into additive (C) and multiplicative (T)
/// factors, by calibration label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub additive: Vec<usize>,
    pub multiplicative: Vec<usize>,
}

impl Region {
    fn of(chart: &Chart, additive: &BTreeSet<usize>) -> Region {
        let (a, m): (Vec<usize>, Vec<usize>) = chart.labels.iter().partition(|l| additive.contains(l));
        Region {
            additive: a,
            multiplicative: m,
        }
    }
}

/// Linear identification of the τ-chart with the region
/// `C^{I′} × T^{I∖I′} × T^J` of the σ-chart, for a face τ ⪯ σ.
#[derive(Clone, Debug)]
pub struct FaceRestriction {
    pub sigma: usize,
    pub tau: usize,
    pub region: Region,
    /// `|L_σ| × |L_τ|`, with `h̄_σ · f = h̄_τ`
    pub f: ScalarMatrix,
}

/// Transition between two charts on their common open subset.
#[derive(Clone, Debug)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub union: Vec<usize>,
    /// `(I ∪ I′) ∖ I` and `(I ∪ I′) ∖ I′`
    pub k_from: Vec<usize>,
    pub k_to: Vec<usize>,
    pub open_from: Region,
    pub open_to: Region,
    /// `|L_to| × |L_from|`, with `h̄_to · g = h̄_from`
    pub map_linear: ScalarMatrix,
    /// `P_χ_to⁻¹ · P_χ_from`
    pub map_int: IntMatrix,
}

/// Change of completion `J → J′` for one cone: identity on `C^I` and
/// `P_χ′ P_χ⁻¹` from `C^J` to `C^{J′}`.
#[derive(Clone, Debug)]
pub struct CompletionTransition {
    pub cone_id: usize,
    pub from_j: Vec<usize>,
    pub to_j: Vec<usize>,
    pub map_linear: ScalarMatrix,
    pub map_int: IntMatrix,
}

/// Exponent data of the principal-bundle transition `t_στ`.
#[derive(Clone, Debug)]
pub struct BundleTransition {
    pub sigma: usize,
    pub tau: usize,
    /// `χ_τ⁻¹(L_σ) ∖ {0..d−1}`
    pub k_set: Vec<usize>,
    /// `(N−d) × |L_σ|` exponent matrix
    pub t_map: IntMatrix,
    pub verified: bool,
}

/// `|L_to| × |L_from|` matrix sending shared labels to themselves and the
/// other labels `ℓ` to the lift of `h(e_ℓ)` in the target chart.
pub(crate) fn linear_transition(from: &Chart, to: &Chart) -> Result<ScalarMatrix, ChartError> {
    let mut g = ScalarMatrix::zeros(to.num_coords(), from.num_coords());
    for (c, &l) in from.labels.iter().enumerate() {
        match to.label_position(l) {
            Some(r) => g.set(r, c, Scalar::one()),
            None => {
                let v = to.lift(&to.calibration_matrix().col(l))?;
                for (r, x) in v.into_iter().enumerate() {
                    g.set(r, c, x);
                }
            }
        }
    }
    Ok(g)
}

pub(crate) fn lattice_transition(from: &Chart, to: &Chart) -> IntMatrix {
    // P_χto⁻¹ P_χfrom e_m = e_{χto⁻¹(χfrom(m))}
    let inv = invert_permutation(&to.chi);
    let perm: Vec<usize> = from.chi.iter().map(|&x| inv[x]).collect();
    IntMatrix::permutation(&perm)
}

fn columns_in_kernel(chart: &Chart, m: &ScalarMatrix) -> Result<bool, ChartError> {
    Ok(chart.h_bar.mul(m)?.is_zero())
}

/// Face restriction of the σ-chart to the chart of a face τ.
pub fn face_restriction(cf: &CalibratedFan, sigma: &Chart, tau: &Chart) -> Result<FaceRestriction, ChartError> {
    let cs = &cf.fan.cone(sigma.cone_id).cone;
    let ct = &cf.fan.cone(tau.cone_id).cone;
    if !ct.is_face_of(cs)? {
        return Err(ChartError::NotAFace {
            sigma: sigma.cone_id,
            tau: tau.cone_id,
        });
    }
    let mut additive = BTreeSet::new();
    for &i in &sigma.i_set {
        if ct.contains(&cf.cal.column(i))? {
            additive.insert(i);
        }
    }
    let f = linear_transition(tau, sigma)?;
    if sigma.h_bar.mul(&f)? != tau.h_bar {
        return Err(ChartError::TransitionFailure(format!(
            "h̄ of cone {} does not restrict to cone {}",
            sigma.cone_id, tau.cone_id
        )));
    }
    Ok(FaceRestriction {
        sigma: sigma.cone_id,
        tau: tau.cone_id,
        region: Region::of(sigma, &additive),
        f,
    })
}

fn common_face(cf: &CalibratedFan, a: usize, b: usize) -> Result<BTreeSet<usize>, ChartError> {
    let ca = &cf.fan.cone(a).cone;
    let cb = &cf.fan.cone(b).cone;
    let inter = ca.intersect(cb)?;
    if !inter.is_face_of(ca)? || !inter.is_face_of(cb)? {
        return Err(ChartError::NoCommonFace(a, b));
    }
    let mut rays = BTreeSet::new();
    for &i in cf.fan.cone(a).rays.union(&cf.fan.cone(b).rays) {
        let v = cf.cal.column(i);
        if ca.contains(&v)? && cb.contains(&v)? {
            rays.insert(i);
        }
    }
    if cf.fan.find_equal(&rays, &inter)?.is_none() {
        return Err(ChartError::NoCommonFace(a, b));
    }
    Ok(rays)
}

fn transition(cf: &CalibratedFan, from: &Chart, to: &Chart, common: &BTreeSet<usize>) -> Result<Transition, ChartError> {
    let union: BTreeSet<usize> = from.i_set.iter().chain(&to.i_set).copied().collect();
    let k_from = union.iter().filter(|i| !from.i_set.contains(i)).copied().collect();
    let k_to = union.iter().filter(|i| !to.i_set.contains(i)).copied().collect();
    let _ = cf;
    Ok(Transition {
        from: from.cone_id,
        to: to.cone_id,
        union: union.into_iter().collect(),
        k_from,
        k_to,
        open_from: Region::of(from, common),
        open_to: Region::of(to, common),
        map_linear: linear_transition(from, to)?,
        map_int: lattice_transition(from, to),
    })
}

/// Transitions `σ → τ` and `τ → σ` on the common open subset, with the
/// identities `h̄_τ g = h̄_σ`, `g φ_σ ≡ φ_τ M` modulo `ker h̄_τ`, and round
/// trips equal to the identity (modulo the kernel on the linear side,
/// exactly on the lattice side) verified.
pub fn gluing(cf: &CalibratedFan, sigma: &Chart, tau: &Chart) -> Result<(Transition, Transition), ChartError> {
    let common = common_face(cf, sigma.cone_id, tau.cone_id)?;
    let fwd = transition(cf, sigma, tau, &common)?;
    let bwd = transition(cf, tau, sigma, &common)?;
    let fail = |what: &str| Err(ChartError::TransitionFailure(format!("{} for cones {} and {}", what, sigma.cone_id, tau.cone_id)));
    for (t, a, b) in [(&fwd, sigma, tau), (&bwd, tau, sigma)] {
        if b.h_bar.mul(&t.map_linear)? != a.h_bar {
            return fail("h̄ compatibility");
        }
        let lhs = t.map_linear.mul(&a.phi)?;
        let rhs = b.phi.mul(&t.map_int.to_scalar())?;
        if !columns_in_kernel(b, &lhs.sub(&rhs)?)? {
            return fail("lattice equivariance");
        }
    }
    let round = bwd.map_linear.mul(&fwd.map_linear)?;
    if !columns_in_kernel(sigma, &round.sub(&ScalarMatrix::identity(sigma.num_coords()))?)? {
        return fail("linear round trip");
    }
    if bwd.map_int.mul(&fwd.map_int)? != IntMatrix::identity(sigma.n()) {
        return fail("lattice round trip");
    }
    Ok((fwd, bwd))
}

/// `g_τρ ∘ g_στ = g_σρ` modulo `ker h̄_ρ`, and exactly on the lattice side.
pub fn verify_cocycle(a: &Chart, b: &Chart, c: &Chart) -> Result<bool, ChartError> {
    let g_ab = linear_transition(a, b)?;
    let g_bc = linear_transition(b, c)?;
    let g_ac = linear_transition(a, c)?;
    let diff = g_bc.mul(&g_ab)?.sub(&g_ac)?;
    if !columns_in_kernel(c, &diff)? {
        return Ok(false);
    }
    let m = lattice_transition(b, c).mul(&lattice_transition(a, b))?;
    Ok(m == lattice_transition(a, c))
}

/// Change of completion between two charts of one cone sharing `Ĩ`.
pub fn completion_transition(from: &Chart, to: &Chart) -> Result<CompletionTransition, ChartError> {
    if from.cone_id != to.cone_id || from.i_set != to.i_set {
        return Err(ChartError::DifferentCones(from.cone_id, to.cone_id));
    }
    if from.i_tilde != to.i_tilde {
        return Err(ChartError::InvalidChoice("completion changes require the same basis subfamily".into()));
    }
    let inv_from = invert_permutation(&from.chi);
    let mut g = ScalarMatrix::zeros(to.num_coords(), from.num_coords());
    for (c, &l) in from.labels.iter().enumerate() {
        let target = if from.i_set.contains(&l) { l } else { to.chi[inv_from[l]] };
        let r = to.label_position(target).expect("image label belongs to the target chart");
        g.set(r, c, Scalar::one());
    }
    for k in &from.ker_basis {
        if !to.in_kernel(&g.mul_vec(k)?) {
            return Err(ChartError::TransitionFailure("kernel not preserved by completion change".into()));
        }
    }
    // P_χ′ P_χ⁻¹ e_m = e_{χ′(χ⁻¹(m))}
    let perm: Vec<usize> = (0..from.n()).map(|m| to.chi[inv_from[m]]).collect();
    Ok(CompletionTransition {
        cone_id: from.cone_id,
        from_j: from.j_set.clone(),
        to_j: to.j_set.clone(),
        map_linear: g,
        map_int: IntMatrix::permutation(&perm),
    })
}

impl CompletionTransition {
    /// `self ∘ first`, both matrices.
    pub fn compose(&self, first: &CompletionTransition) -> Result<CompletionTransition, ChartError> {
        Ok(CompletionTransition {
            cone_id: self.cone_id,
            from_j: first.from_j.clone(),
            to_j: self.to_j.clone(),
            map_linear: self.map_linear.mul(&first.map_linear)?,
            map_int: self.map_int.mul(&first.map_int)?,
        })
    }
}

/// Embedding `C^{L} → C^N` of a chart's coordinates by label.
fn label_embedding(chart: &Chart) -> ScalarMatrix {
    let mut e = ScalarMatrix::zeros(chart.n(), chart.num_coords());
    for (c, &l) in chart.labels.iter().enumerate() {
        e.set(l, c, Scalar::one());
    }
    e
}

/// For every pair of adjacent maximal cones `σ < τ`, the exponent data of
/// `t_στ`, verified through the exact identity
/// `Emb_σ = Emb_τ · g_στ + A_τ · T` where
/// `A_τ = P_χτ[:, d..] − Emb_τ · φ_τ[:, d..]` has columns in `ker h`.
pub fn bundle_transitions(cf: &CalibratedFan, atlas: &[Chart]) -> Result<Vec<BundleTransition>, ChartError> {
    let maximal = cf.fan.maximal_cones()?;
    let d = cf.d();
    let n = cf.n();
    let mut out = Vec::new();
    for (x, &s) in maximal.iter().enumerate() {
        for &t in &maximal[x + 1..] {
            let cs = &cf.fan.cone(s).cone;
            let ct = &cf.fan.cone(t).cone;
            let inter = cs.intersect(ct)?;
            if inter.dimension()? + 1 != cs.dimension()?.max(ct.dimension()?) {
                continue;
            }
            let (sig, tau) = (&atlas[s], &atlas[t]);
            let g = linear_transition(sig, tau)?;
            let tail: Vec<usize> = (d..n).collect();
            let p_tail = tau.p_chi.select_columns(&tail).to_scalar();
            let emb_t = label_embedding(tau);
            let a_t = p_tail.sub(&emb_t.mul(&tau.phi.select_columns(&tail))?)?;
            let inv = invert_permutation(&tau.chi);
            let mut t_map = IntMatrix::zeros(n - d, sig.num_coords());
            let mut k_set = Vec::new();
            for (c, &l) in sig.labels.iter().enumerate() {
                let m = inv[l];
                if m >= d {
                    k_set.push(m);
                    if tau.label_position(l).is_none() {
                        t_map.set(m - d, c, BigInt::one());
                    }
                }
            }
            k_set.sort_unstable();
            let rhs = emb_t.mul(&g)?.add(&a_t.mul(&t_map.to_scalar())?)?;
            let in_ker = tau.calibration_matrix().mul(&a_t)?.is_zero();
            out.push(BundleTransition {
                sigma: s,
                tau: t,
                k_set,
                t_map,
                verified: in_ker && rhs == label_embedding(sig),
            });
        }
    }
    Ok(out)
}
