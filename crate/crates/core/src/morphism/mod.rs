//! Morphisms `(L, H, s)` of calibrated quantum fans and the linear data of
//! the induced morphisms between affine charts.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::chart::{invert_permutation, lattice_transition, linear_transition, Chart, ChartError};
use crate::cone::ConeError;
use crate::fan::CalibratedFan;
use crate::linalg::{rank_of, IntMatrix, LinalgError, ScalarMatrix, ScalarVector};
use crate::report::ValidationReport;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MorphismError {
    #[error("shape mismatch: {0}")]
    Mismatch(String),
    #[error("no cone of the target fan contains the image of cone {0}")]
    NotMapped(usize),
    #[error("H_χχ′ has a nonzero lower-left block for cones {from} → {to}")]
    BlockFormViolation { from: usize, to: usize },
    #[error("H does not map ker h̄ of cone {from} into ker h̄′ of cone {to}")]
    KernelNotPreserved { from: usize, to: usize },
    #[error("chart morphisms disagree on the underlying (L, H)")]
    Inconsistent,
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanMorphism {
    /// `d′ × d`
    pub l: ScalarMatrix,
    /// `N′ × N`
    pub h: IntMatrix,
    /// virtual index `i ↦ s(i)`
    pub s: BTreeMap<usize, usize>,
}

fn fmt_vec<T: std::fmt::Display>(v: &[T]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", items.join(", "))
}

impl FanMorphism {
    pub fn new(l: ScalarMatrix, h: IntMatrix, s: BTreeMap<usize, usize>) -> Self {
        FanMorphism { l, h, s }
    }

    pub fn identity(cf: &CalibratedFan) -> Self {
        let s = cf.cal.virtual_set().iter().map(|&i| (i, i)).collect();
        FanMorphism::new(ScalarMatrix::identity(cf.d()), IntMatrix::identity(cf.n()), s)
    }

    /// `(c·id, c·id)` on a fan without virtual columns.
    pub fn scaling(cf: &CalibratedFan, c: i64) -> Self {
        let c = BigInt::from(c);
        FanMorphism::new(
            ScalarMatrix::identity(cf.d()).scale(&crate::Scalar::from_bigint(c.clone())),
            IntMatrix::identity(cf.n()).scale(&c),
            BTreeMap::new(),
        )
    }

    fn check_shapes(&self, src: &CalibratedFan, tgt: &CalibratedFan) -> Result<(), MorphismError> {
        if self.l.rows() != tgt.d() || self.l.cols() != src.d() || self.h.rows() != tgt.n() || self.h.cols() != src.n() {
            return Err(MorphismError::Mismatch(format!(
                "L is {}×{}, H is {}×{}; expected {}×{} and {}×{}",
                self.l.rows(),
                self.l.cols(),
                self.h.rows(),
                self.h.cols(),
                tgt.d(),
                src.d(),
                tgt.n(),
                src.n()
            )));
        }
        Ok(())
    }

    /// Whether `L(σ) ⊂ σ′` and `H(Cone(e_I)) ⊂ Cone(e_{I′})`.
    pub fn maps_cone(&self, src: &CalibratedFan, tgt: &CalibratedFan, sigma: usize, target: usize) -> Result<bool, MorphismError> {
        let rays = &src.fan.cone(sigma).rays;
        let t = &tgt.fan.cone(target);
        for &i in rays {
            let img = self.l.mul_vec(&src.cal.column(i))?;
            if !t.cone.contains(&img)? {
                return Ok(false);
            }
            let col = self.h.col(i);
            if col.iter().enumerate().any(|(r, x)| x.is_negative() || (!x.is_zero() && !t.rays.contains(&r))) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Lexicographically least (by ray set) target cone receiving `σ`.
    pub fn target_cone(&self, src: &CalibratedFan, tgt: &CalibratedFan, sigma: usize) -> Result<Option<usize>, MorphismError> {
        let mut ids: Vec<usize> = (0..tgt.fan.len()).collect();
        ids.sort_by(|a, b| tgt.fan.cone(*a).rays.cmp(&tgt.fan.cone(*b).rays));
        for t in ids {
            if self.maps_cone(src, tgt, sigma, t)? {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    pub fn validate(&self, src: &CalibratedFan, tgt: &CalibratedFan) -> Result<ValidationReport, MorphismError> {
        self.check_shapes(src, tgt)?;
        let mut report = ValidationReport::new();

        let lhs = tgt.cal.matrix().mul(&self.h.to_scalar())?;
        let rhs = self.l.mul(src.cal.matrix())?;
        let mut w = Vec::new();
        for c in 0..src.n() {
            if lhs.col(c) != rhs.col(c) {
                w.push(format!("h′H(e_{c}) ≠ L h(e_{c})"));
            }
        }
        report.record("diagram", w);

        let mut w = Vec::new();
        for i in 0..src.n() {
            let img = self.l.mul_vec(&src.cal.column(i))?;
            if tgt.cal.gamma_coordinates(&img).is_none() {
                w.push(format!("L(v_{i}) = {} is not in Γ′", fmt_vec(&img)));
            }
        }
        report.record("lattice", w);

        let mut wl = Vec::new();
        let mut wh = Vec::new();
        for sigma in 0..src.fan.len() {
            let rays = &src.fan.cone(sigma).rays;
            let mut l_ok = false;
            let mut h_ok = false;
            for t in 0..tgt.fan.len() {
                let tc = tgt.fan.cone(t);
                if !l_ok {
                    let mut all = true;
                    for &i in rays {
                        if !tc.cone.contains(&self.l.mul_vec(&src.cal.column(i))?)? {
                            all = false;
                            break;
                        }
                    }
                    l_ok = all;
                }
                if !h_ok {
                    h_ok = rays.iter().all(|&i| {
                        self.h
                            .col(i)
                            .iter()
                            .enumerate()
                            .all(|(r, x)| !x.is_negative() && (x.is_zero() || tc.rays.contains(&r)))
                    });
                }
            }
            let items: Vec<String> = rays.iter().map(|i| i.to_string()).collect();
            if !l_ok {
                wl.push(format!("L(cone {{{}}}) lies in no target cone", items.join(",")));
            }
            if !h_ok {
                wh.push(format!("H(Cone(e_i, i ∈ {{{}}})) lies in no cone of Δ′_h", items.join(",")));
            }
        }
        report.record("cone_mapping_l", wl);
        report.record("cone_mapping_h", wh);

        // virtual indices never generate cones, so Cone(e_𝓘) ∈ Δ_h only when 𝓘 = ∅
        report.record("virtual_cone", vec![]);

        let tv = tgt.cal.virtual_set();
        let mut w = Vec::new();
        for i in src.cal.non_virtual() {
            let col = self.h.col(i);
            if tv.iter().any(|&r| !col[r].is_zero()) {
                w.push(format!("H(e_{i}) has a virtual component"));
            }
        }
        report.record("non_virtual_support", w);

        let mut w = Vec::new();
        for &i in src.cal.virtual_set() {
            match self.s.get(&i) {
                None => w.push(format!("s({i}) undefined")),
                Some(&t) if !tv.contains(&t) => w.push(format!("s({i}) = {t} is not virtual")),
                Some(&t) => {
                    let col = self.h.col(i);
                    if (0..tgt.n()).any(|r| col[r] != BigInt::from((r == t) as i64)) {
                        w.push(format!("H(e_{i}) ≠ e_{t}"));
                    }
                }
            }
        }
        report.record("virtual_map", w);
        Ok(report)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &FanMorphism) -> Result<FanMorphism, MorphismError> {
        if self.l.cols() != first.l.rows() || self.h.cols() != first.h.rows() {
            return Err(MorphismError::Mismatch("morphisms are not composable".into()));
        }
        let s = first.s.iter().filter_map(|(&i, t)| self.s.get(t).map(|&u| (i, u))).collect();
        Ok(FanMorphism::new(self.l.mul(&first.l)?, self.h.mul(&first.h)?, s))
    }
}

/// Linear data of the morphism `U_σ → U_σ′` induced by `(L, H)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartMorphism {
    pub source_cone: usize,
    pub target_cone: usize,
    /// `J̃ ⊂ J`: `L(v_j)` free and outside `L(Vect σ)`
    pub j_tilde: Vec<usize>,
    /// `|L_σ′| × |L_σ|`, `(w, z) ↦ (H w, ψ′⁻¹ L h̄_σ z)`
    pub l_tilde: ScalarMatrix,
    /// `P_χ′⁻¹ H P_χ`
    pub h_chichi: IntMatrix,
    /// lower-right block of `H_χχ′` (rows `k′..`, columns `k..`)
    pub block_m: IntMatrix,
    /// lower-left block of `H_χχ′` vanishes
    pub block_form: bool,
}

/// `emb · ψ⁻¹`, the section of `h̄_σ` through `C^Ĩ ⊕ C^J`.
fn section(chart: &Chart) -> Result<ScalarMatrix, MorphismError> {
    Ok(chart.emb.mul(&chart.psi.inverse()?)?)
}

fn j_tilde(m: &FanMorphism, cf: &CalibratedFan, chart: &Chart) -> Result<Vec<usize>, MorphismError> {
    let dt = m.l.rows();
    let mut vecs: Vec<ScalarVector> = Vec::new();
    for &i in &chart.i_set {
        vecs.push(m.l.mul_vec(&cf.cal.column(i))?);
    }
    let base = rank_of(dt, &vecs);
    let mut chosen = Vec::new();
    for &j in &chart.j_set {
        let mut trial = vecs.clone();
        trial.push(m.l.mul_vec(&cf.cal.column(j))?);
        if rank_of(dt, &trial) == base + chosen.len() + 1 {
            vecs = trial;
            chosen.push(j);
        }
    }
    Ok(chosen)
}

/// Chart morphism between the given charts; `L(σ) ⊂ σ′` and `H(σ̂) ⊂ σ̂′` are
/// checked first. A nonzero lower-left block is an error when `σ′` is
/// simplicial and a recorded flag otherwise.
pub fn induced_chart_morphism(
    m: &FanMorphism,
    src: &CalibratedFan,
    tgt: &CalibratedFan,
    chart: &Chart,
    chart_t: &Chart,
) -> Result<ChartMorphism, MorphismError> {
    m.check_shapes(src, tgt)?;
    let (sigma, target) = (chart.cone_id, chart_t.cone_id);
    if !m.maps_cone(src, tgt, sigma, target)? {
        return Err(MorphismError::NotMapped(sigma));
    }
    let p = chart.num_coords();
    let sec = section(chart)?;
    let proj = ScalarMatrix::identity(p).sub(&sec.mul(&chart.h_bar)?)?;
    // H restricted to chart labels, read in the target labels
    let hs = m.h.to_scalar();
    let mut h_lab = ScalarMatrix::zeros(chart_t.num_coords(), p);
    for (c, &l) in chart.labels.iter().enumerate() {
        let col = hs.col(l);
        for (r, x) in col.into_iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            match chart_t.label_position(r) {
                Some(pos) => h_lab.set(pos, c, x),
                None if chart.i_set.contains(&l) => return Err(MorphismError::KernelNotPreserved { from: sigma, to: target }),
                None => {}
            }
        }
    }
    for k in &chart.ker_basis {
        if !chart_t.in_kernel(&h_lab.mul_vec(k)?) {
            return Err(MorphismError::KernelNotPreserved { from: sigma, to: target });
        }
    }
    let l_tilde = h_lab.mul(&proj)?.add(&section(chart_t)?.mul(&m.l.mul(&chart.h_bar)?)?)?;

    let inv_t = invert_permutation(&chart_t.chi);
    let perm_src = IntMatrix::permutation(&chart.chi);
    let h_chichi = IntMatrix::permutation(&inv_t).mul(&m.h)?.mul(&perm_src)?;
    let (k, kt) = (chart.dim(), chart_t.dim());
    let block_form = (kt..h_chichi.rows()).all(|r| (0..k).all(|c| h_chichi.get(r, c).is_zero()));
    if !block_form && tgt.fan.cone(target).cone.is_simplicial()? {
        return Err(MorphismError::BlockFormViolation { from: sigma, to: target });
    }
    let block_m = h_chichi
        .select_rows(&(kt..h_chichi.rows()).collect::<Vec<_>>())
        .select_columns(&(k..h_chichi.cols()).collect::<Vec<_>>());
    Ok(ChartMorphism {
        source_cone: sigma,
        target_cone: target,
        j_tilde: j_tilde(m, src, chart)?,
        l_tilde,
        h_chichi,
        block_m,
        block_form,
    })
}

impl ChartMorphism {
    /// `self ∘ first` as matrices; the middle charts must coincide.
    pub fn compose(&self, first: &ChartMorphism) -> Result<ChartMorphism, MorphismError> {
        if first.target_cone != self.source_cone {
            return Err(MorphismError::Mismatch("chart morphisms are not composable".into()));
        }
        let h_chichi = self.h_chichi.mul(&first.h_chichi)?;
        let kt = h_chichi.rows() - self.block_m.rows();
        let k = h_chichi.cols() - first.block_m.cols();
        let block_form = (kt..h_chichi.rows()).all(|r| (0..k).all(|c| h_chichi.get(r, c).is_zero()));
        let block_m = h_chichi
            .select_rows(&(kt..h_chichi.rows()).collect::<Vec<_>>())
            .select_columns(&(k..h_chichi.cols()).collect::<Vec<_>>());
        Ok(ChartMorphism {
            source_cone: first.source_cone,
            target_cone: self.target_cone,
            j_tilde: first.j_tilde.clone(),
            l_tilde: self.l_tilde.mul(&first.l_tilde)?,
            h_chichi,
            block_m,
            block_form,
        })
    }

    /// `L̃ φ ≡ φ′ H_χχ′` modulo `ker h̄′_σ′`.
    pub fn verify_diagram(&self, chart: &Chart, chart_t: &Chart) -> Result<bool, MorphismError> {
        let lhs = self.l_tilde.mul(&chart.phi)?;
        let rhs = chart_t.phi.mul(&self.h_chichi.to_scalar())?;
        Ok(chart_t.h_bar.mul(&lhs.sub(&rhs)?)?.is_zero())
    }

    /// `(L, H)` read back from the chart data.
    pub fn extract(&self, chart: &Chart, chart_t: &Chart) -> Result<(ScalarMatrix, IntMatrix), MorphismError> {
        let l = chart_t.h_bar.mul(&self.l_tilde)?.mul(&section(chart)?)?;
        let h = chart_t
            .p_chi
            .mul(&self.h_chichi)?
            .mul(&IntMatrix::permutation(&invert_permutation(&chart.chi)))?;
        Ok((l, h))
    }
}

/// Chart morphisms for every maximal cone, targeting the lexicographically
/// least receiving cone with its chart in `atlas_t`.
pub fn induced_family(
    m: &FanMorphism,
    src: &CalibratedFan,
    tgt: &CalibratedFan,
    atlas: &[Chart],
    atlas_t: &[Chart],
) -> Result<Vec<ChartMorphism>, MorphismError> {
    let mut out = Vec::new();
    for sigma in src.fan.maximal_cones()? {
        let t = m.target_cone(src, tgt, sigma)?.ok_or(MorphismError::NotMapped(sigma))?;
        out.push(induced_chart_morphism(m, src, tgt, &atlas[sigma], &atlas_t[t])?);
    }
    Ok(out)
}

/// The common `(L, H)` of a family, if all members agree.
pub fn extract_family(family: &[ChartMorphism], atlas: &[Chart], atlas_t: &[Chart]) -> Result<(ScalarMatrix, IntMatrix), MorphismError> {
    let mut found: Option<(ScalarMatrix, IntMatrix)> = None;
    for cm in family {
        let lh = cm.extract(&atlas[cm.source_cone], &atlas_t[cm.target_cone])?;
        match &found {
            None => found = Some(lh),
            Some(prev) if *prev != lh => return Err(MorphismError::Inconsistent),
            Some(_) => {}
        }
    }
    found.ok_or(MorphismError::Inconsistent)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GlueCompatibility {
    pub compatible: bool,
    /// source cone pairs `(σ, τ)` where an identity fails
    pub failing_pairs: Vec<(usize, usize)>,
}

/// `g′_σ′τ′ L̃_σ = L̃_τ g_στ` modulo `ker h̄′_τ′` and `k′ H_σ = H_τ k` exactly,
/// for every pair of family members whose source cones meet in a common face.
pub fn glue_compatibility(
    src: &CalibratedFan,
    family: &[ChartMorphism],
    atlas: &[Chart],
    atlas_t: &[Chart],
) -> Result<GlueCompatibility, MorphismError> {
    let mut failing = Vec::new();
    for a in family {
        for b in family {
            if a.source_cone == b.source_cone {
                continue;
            }
            let (cs, ct) = (&atlas[a.source_cone], &atlas[b.source_cone]);
            if crate::chart::gluing(src, cs, ct).is_err() {
                continue;
            }
            let (ts, tt) = (&atlas_t[a.target_cone], &atlas_t[b.target_cone]);
            let lhs = linear_transition(ts, tt)?.mul(&a.l_tilde)?;
            let rhs = b.l_tilde.mul(&linear_transition(cs, ct)?)?;
            let linear_ok = tt.h_bar.mul(&lhs.sub(&rhs)?)?.is_zero();
            let lat_l = lattice_transition(ts, tt).mul(&a.h_chichi)?;
            let lat_r = b.h_chichi.mul(&lattice_transition(cs, ct))?;
            if !linear_ok || lat_l != lat_r {
                failing.push((a.source_cone, b.source_cone));
            }
        }
    }
    Ok(GlueCompatibility {
        compatible: failing.is_empty(),
        failing_pairs: failing,
    })
}

/// Index set helper for morphism documents.
pub fn virtual_map(pairs: &[(usize, usize)]) -> BTreeMap<usize, usize> {
    pairs.iter().copied().collect()
}
