//! Fans on Γ, calibrated quantum fans and the associated fan Δ_h in R^N.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::calibration::Calibration;
use crate::cone::{positively_proportional, Cone, ConeError};
use crate::linalg::{unit_vector, ScalarVector};
use crate::report::ValidationReport;
use crate::scalar::ScalarField;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FanError {
    #[error("ray index {index} out of range in cone {cone}")]
    RayOutOfRange { cone: usize, index: usize },
    #[error("cone {0}: {1}")]
    Cone(usize, ConeError),
    #[error("cones {0} and {1}: {2}")]
    Pair(usize, usize, ConeError),
    #[error("intersection of cones {0} and {1} is not generated by rays of the fan")]
    NotClosable(usize, usize),
    #[error("one-dimensional cones: {0}")]
    Rays(ConeError),
    #[error("calibration is not standard")]
    NonStandardCalibration,
    #[error("generator index {0} is virtual or out of range")]
    BadGenerator(usize),
}

/// One cone of a fan: the indices of its rays in the fan's ray table.
#[derive(Clone, Debug)]
pub struct FanCone {
    pub rays: BTreeSet<usize>,
    pub cone: Cone,
}

/// A finite collection of cones over a shared ray table.
#[derive(Clone)]
pub struct Fan {
    field: ScalarField,
    dim: usize,
    ray_table: Vec<ScalarVector>,
    cones: Vec<FanCone>,
}

fn fmt_set(s: &BTreeSet<usize>) -> String {
    let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

impl Fan {
    pub fn new(field: &ScalarField, dim: usize, ray_table: Vec<ScalarVector>, cone_sets: Vec<BTreeSet<usize>>) -> Result<Self, FanError> {
        let mut cones = Vec::with_capacity(cone_sets.len());
        for (ci, rays) in cone_sets.into_iter().enumerate() {
            if let Some(&i) = rays.iter().find(|&&i| i >= ray_table.len()) {
                return Err(FanError::RayOutOfRange { cone: ci, index: i });
            }
            let gens = rays.iter().map(|&i| ray_table[i].clone()).collect();
            let cone = Cone::new(field, dim, gens).map_err(|e| FanError::Cone(ci, e))?;
            cones.push(FanCone { rays, cone });
        }
        Ok(Fan {
            field: field.clone(),
            dim,
            ray_table,
            cones,
        })
    }

    /// Fan whose rays are the calibration columns.
    pub fn over_calibration(cal: &Calibration, cone_sets: Vec<BTreeSet<usize>>) -> Result<Self, FanError> {
        let table = (0..cal.n()).map(|i| cal.column(i)).collect();
        Fan::new(cal.field(), cal.d(), table, cone_sets)
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn ray_table(&self) -> &[ScalarVector] {
        &self.ray_table
    }

    pub fn cones(&self) -> &[FanCone] {
        &self.cones
    }

    pub fn cone(&self, id: usize) -> &FanCone {
        &self.cones[id]
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    /// Id of the cone with exactly this ray set.
    pub fn find(&self, rays: &BTreeSet<usize>) -> Option<usize> {
        self.cones.iter().position(|c| &c.rays == rays)
    }

    /// Id of a cone equal to `c` as a set, preferring an exact ray-set match.
    pub fn find_equal(&self, rays: &BTreeSet<usize>, c: &Cone) -> Result<Option<usize>, ConeError> {
        if let Some(id) = self.find(rays) {
            return Ok(Some(id));
        }
        for (id, fc) in self.cones.iter().enumerate() {
            if fc.cone.same_as(c)? {
                return Ok(Some(id));
            }
        }
        Ok(None)
    }

    /// Faces of cone `id` as ray-index sets of the fan.
    pub fn face_sets(&self, id: usize) -> Result<Vec<BTreeSet<usize>>, ConeError> {
        let fc = &self.cones[id];
        let pos: Vec<usize> = fc.rays.iter().copied().collect();
        Ok(fc
            .cone
            .faces()?
            .into_iter()
            .map(|f| f.generators.iter().map(|&g| pos[g]).collect())
            .collect())
    }

    /// Ray indices of cones `a` and `b` lying in both cones.
    fn common_rays(&self, a: usize, b: usize) -> Result<BTreeSet<usize>, ConeError> {
        let (ca, cb) = (&self.cones[a], &self.cones[b]);
        let mut out = BTreeSet::new();
        for &i in ca.rays.union(&cb.rays) {
            if ca.cone.contains(&self.ray_table[i])? && cb.cone.contains(&self.ray_table[i])? {
                out.insert(i);
            }
        }
        Ok(out)
    }

    /// Checks every fan axiom, collecting witnesses rather than stopping at
    /// the first failure.
    pub fn validate(&self) -> Result<ValidationReport, FanError> {
        let mut report = ValidationReport::new();
        let zero = self.cones.iter().any(|c| c.cone.generators().is_empty());
        report.record("zero_cone", if zero { vec![] } else { vec!["{0} is not a cone of the fan".into()] });

        let mut convex_w = Vec::new();
        for (id, c) in self.cones.iter().enumerate() {
            if !c.cone.is_strongly_convex().map_err(|e| FanError::Cone(id, e))? {
                convex_w.push(format!("cone {} {} contains a line", id, fmt_set(&c.rays)));
            }
        }
        let all_convex = convex_w.is_empty();
        report.record("strongly_convex", convex_w);

        let mut face_w = Vec::new();
        let mut inter_w = Vec::new();
        let mut inter_face_w = Vec::new();
        if all_convex {
            for id in 0..self.cones.len() {
                for face in self.face_sets(id).map_err(|e| FanError::Cone(id, e))? {
                    let fcone = self.cones[id].cone.face_cone(&self.positions(id, &face));
                    if self.find_equal(&face, &fcone).map_err(|e| FanError::Cone(id, e))?.is_none() {
                        face_w.push(format!("cone {} {}: missing face {}", id, fmt_set(&self.cones[id].rays), fmt_set(&face)));
                    }
                }
            }
            for a in 0..self.cones.len() {
                for b in a + 1..self.cones.len() {
                    let pair = |e| FanError::Pair(a, b, e);
                    let (ca, cb) = (&self.cones[a].cone, &self.cones[b].cone);
                    let inter = ca.intersect(cb).map_err(pair)?;
                    let rays = self.common_rays(a, b).map_err(pair)?;
                    if self.find_equal(&rays, &inter).map_err(pair)?.is_none() {
                        inter_w.push(format!("cones {} and {}: intersection {} is not a cone of the fan", a, b, fmt_set(&rays)));
                    }
                    if !inter.is_face_of(ca).map_err(pair)? || !inter.is_face_of(cb).map_err(pair)? {
                        inter_face_w.push(format!("cones {} and {}: intersection is not a common face", a, b));
                    }
                }
            }
        } else {
            let skip = "skipped: some cone is not strongly convex".to_string();
            face_w.push(skip.clone());
            inter_w.push(skip.clone());
            inter_face_w.push(skip);
        }
        report.record("face_closed", face_w);
        report.record("intersection_closed", inter_w);
        report.record("intersections_are_faces", inter_face_w);
        Ok(report)
    }

    /// Positions inside cone `id` of the given fan ray indices.
    fn positions(&self, id: usize, rays: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.cones[id]
            .rays
            .iter()
            .enumerate()
            .filter(|(_, r)| rays.contains(r))
            .map(|(p, _)| p)
            .collect()
    }

    /// Adds missing faces and pairwise intersections until closed. New cones
    /// are appended in order of (size, ray set) per round.
    pub fn close(&self) -> Result<Fan, FanError> {
        let mut fan = self.clone();
        loop {
            let mut missing: BTreeSet<(usize, BTreeSet<usize>)> = BTreeSet::new();
            for id in 0..fan.cones.len() {
                for face in fan.face_sets(id).map_err(|e| FanError::Cone(id, e))? {
                    let fcone = fan.cones[id].cone.face_cone(&fan.positions(id, &face));
                    if fan.find_equal(&face, &fcone).map_err(|e| FanError::Cone(id, e))?.is_none() {
                        missing.insert((face.len(), face));
                    }
                }
            }
            for a in 0..fan.cones.len() {
                for b in a + 1..fan.cones.len() {
                    let pair = |e| FanError::Pair(a, b, e);
                    let inter = fan.cones[a].cone.intersect(&fan.cones[b].cone).map_err(pair)?;
                    let rays = fan.common_rays(a, b).map_err(pair)?;
                    if fan.find_equal(&rays, &inter).map_err(pair)?.is_some() {
                        continue;
                    }
                    let gens = rays.iter().map(|&i| fan.ray_table[i].clone()).collect();
                    let candidate = Cone::new(&fan.field, fan.dim, gens).map_err(pair)?;
                    if !candidate.same_as(&inter).map_err(pair)? {
                        return Err(FanError::NotClosable(a, b));
                    }
                    missing.insert((rays.len(), rays));
                }
            }
            if missing.is_empty() {
                return Ok(fan);
            }
            for (_, rays) in missing {
                if fan.find(&rays).is_some() {
                    continue;
                }
                let gens = rays.iter().map(|&i| fan.ray_table[i].clone()).collect();
                let cone = Cone::new(&fan.field, fan.dim, gens).map_err(|e| FanError::Cone(fan.cones.len(), e))?;
                fan.cones.push(FanCone { rays, cone });
            }
        }
    }

    /// Ids of cones not properly contained in another cone.
    pub fn maximal_cones(&self) -> Result<Vec<usize>, ConeError> {
        let mut out = Vec::new();
        'outer: for (i, a) in self.cones.iter().enumerate() {
            for (j, b) in self.cones.iter().enumerate() {
                if i != j && b.cone.contains_cone(&a.cone)? && !a.cone.contains_cone(&b.cone)? {
                    continue 'outer;
                }
            }
            // among equal duplicates keep the first
            for b in self.cones.iter().take(i) {
                if b.cone.same_as(&a.cone)? {
                    continue 'outer;
                }
            }
            out.push(i);
        }
        Ok(out)
    }

    /// Ids of the one-dimensional cones.
    pub fn one_cones(&self) -> Result<Vec<usize>, ConeError> {
        let mut out = Vec::new();
        for (i, c) in self.cones.iter().enumerate() {
            if c.cone.dimension()? == 1 && c.cone.is_strongly_convex()? {
                out.push(i);
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sets: Vec<String> = self.cones.iter().map(|c| fmt_set(&c.rays)).collect();
        write!(f, "Fan(dim {}, cones [{}])", self.dim, sets.join(", "))
    }
}

/// A fan on Γ with a standard calibration and a generator set `A`.
#[derive(Clone, Debug)]
pub struct CalibratedFan {
    pub fan: Fan,
    pub cal: Calibration,
    pub gens: BTreeSet<usize>,
}

impl CalibratedFan {
    /// Checks the type invariants: standard calibration, spanning non-virtual
    /// columns, `A` disjoint from the virtual set, and cones over `A`.
    pub fn new(cal: Calibration, cone_sets: Vec<BTreeSet<usize>>, gens: BTreeSet<usize>) -> Result<Self, FanError> {
        if !cal.is_standard() {
            return Err(FanError::NonStandardCalibration);
        }
        if let Some(&i) = gens.iter().find(|&&i| i >= cal.n() || cal.is_virtual(i)) {
            return Err(FanError::BadGenerator(i));
        }
        let fan = Fan::over_calibration(&cal, cone_sets)?;
        Ok(CalibratedFan { fan, cal, gens })
    }

    pub fn d(&self) -> usize {
        self.cal.d()
    }

    pub fn n(&self) -> usize {
        self.cal.n()
    }

    /// Rays of the generators in `A` correspond bijectively, up to positive
    /// scaling, to the one-dimensional cones of the fan.
    pub fn validate_generator_set(&self) -> Result<bool, ConeError> {
        if self.gens.iter().any(|&i| i >= self.n() || self.cal.is_virtual(i)) {
            return Ok(false);
        }
        let f = self.cal.field();
        let ones = self.fan.one_cones()?;
        let mut ray_vectors: Vec<ScalarVector> = Vec::new();
        for id in ones {
            let v = self.fan.cone(id).cone.extreme_ray_vectors()?.remove(0);
            let mut dup = false;
            for w in &ray_vectors {
                if positively_proportional(f, &v, w)? {
                    dup = true;
                }
            }
            if !dup {
                ray_vectors.push(v);
            }
        }
        let mut used = vec![false; ray_vectors.len()];
        for &a in &self.gens {
            let va = self.cal.column(a);
            let mut hit = None;
            for (k, w) in ray_vectors.iter().enumerate() {
                if positively_proportional(f, &va, w)? {
                    hit = Some(k);
                }
            }
            match hit {
                Some(k) if !used[k] => used[k] = true,
                _ => return Ok(false),
            }
        }
        Ok(used.into_iter().all(|u| u))
    }

    /// Full validation: fan axioms plus the generator-set condition.
    pub fn validate(&self) -> Result<ValidationReport, FanError> {
        let mut report = self.fan.validate()?;
        let mut w = Vec::new();
        if !self.cal.validate_virtual_span() {
            w.push("non-virtual columns do not span R^d".to_string());
        }
        report.record("virtual_span", w);
        let ok = self.validate_generator_set().map_err(FanError::Rays)?;
        report.record(
            "generator_set",
            if ok { vec![] } else { vec![format!("A = {} does not match the rays of the fan", fmt_set(&self.gens))] },
        );
        Ok(report)
    }

    /// Δ_h: `Cone(e_i, i ∈ I)` in R^N for each cone with ray set `I`.
    pub fn associated_fan(&self) -> Fan {
        let n = self.n();
        let table = (0..n).map(|i| unit_vector(n, i)).collect();
        let sets = self.fan.cones().iter().map(|c| c.rays.clone()).collect();
        Fan::new(self.cal.field(), n, table, sets).expect("standard basis cones")
    }

    /// `A = ⋃ I` over the cones of the fan.
    pub fn used_indices(&self) -> BTreeSet<usize> {
        self.fan.cones().iter().flat_map(|c| c.rays.iter().copied()).collect()
    }

    pub fn with_fan(&self, fan: Fan) -> CalibratedFan {
        CalibratedFan {
            fan,
            cal: self.cal.clone(),
            gens: self.gens.clone(),
        }
    }
}

pub fn index_set(v: &[usize]) -> BTreeSet<usize> {
    v.iter().copied().collect()
}
