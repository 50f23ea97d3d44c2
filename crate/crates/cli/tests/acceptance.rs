//! One pass/fail line per acceptance criterion. Run with `--nocapture` to
//! see the lines; the test fails if any criterion fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use qtoric::calibration::Calibration;
use qtoric::chart::{build_atlas, build_chart, build_chart_with, completion_transition, forget_calibration, verify_choice_independence, Chart, ChartChoice};
use qtoric::classical::gale_transform;
use qtoric::cone::Cone;
use qtoric::fan::{CalibratedFan, Fan};
use qtoric::io::{parse_scalar, FanDocument};
use qtoric::linalg::int_vector;
use qtoric::morphism::{extract_family, glue_compatibility, induced_chart_morphism, induced_family, FanMorphism};
use qtoric::{IntMatrix, IrrationalBasis, Scalar, ScalarField, ScalarMatrix};
use qtoric_cli::{run, EXIT_PASS};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

use support::{cone_oracle, int_det, nullspace, random_generators, random_unimodular, rank, subsets, to_q, Q};

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn example(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "docs", "examples", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn cli(args: &[&str]) -> Result<Value, String> {
    let o = run(std::iter::once("qtoric").chain(args.iter().copied()));
    if o.code != EXIT_PASS {
        return Err(format!("qtoric {:?} exited with {}: {}", args, o.code, o.stderr));
    }
    serde_json::from_str(&o.stdout).map_err(|e| e.to_string())
}

fn rational_field() -> ScalarField {
    ScalarField::rational()
}

fn closed(cal: Calibration, maximal: &[BTreeSet<usize>]) -> CalibratedFan {
    let fan = Fan::over_calibration(&cal, maximal.to_vec()).unwrap().close().unwrap();
    let sets: Vec<BTreeSet<usize>> = fan.cones().iter().map(|c| c.rays.clone()).collect();
    let gens = sets.iter().flatten().copied().collect();
    CalibratedFan::new(cal, sets, gens).unwrap()
}

fn int_fan(d: usize, cols: &[Vec<i64>], maximal: &[&[usize]]) -> CalibratedFan {
    let sets: Vec<BTreeSet<usize>> = maximal.iter().map(|m| m.iter().copied().collect()).collect();
    closed(Calibration::from_int_columns(&rational_field(), d, cols, &[]).unwrap(), &sets)
}

fn proportional(v: &[Scalar], w: &[Scalar]) -> bool {
    v.len() == w.len()
        && v.iter().any(|x| !x.is_zero())
        && (0..v.len()).all(|i| (0..v.len()).all(|j| v[i].clone() * w[j].clone() == v[j].clone() * w[i].clone()))
}

fn kernel_from_report(report: &Value, basis: &IrrationalBasis) -> Result<Vec<Vec<Scalar>>, String> {
    report["results"]["ker_basis"]
        .as_array()
        .ok_or("no ker_basis")?
        .iter()
        .map(|v| {
            v.as_array()
                .ok_or("kernel vector is not an array")?
                .iter()
                .map(|x| parse_scalar(x.as_str().unwrap_or(""), basis).map_err(|e| e.to_string()))
                .collect()
        })
        .collect()
}

fn criterion_1() -> Outcome {
    for (file, want) in [("ex_max_sqrt.json", ["-a", "b", "-c", "1"]), ("ex_max.json", ["-1", "1", "-1", "1"])] {
        let text = std::fs::read_to_string(example(file)).map_err(|e| e.to_string())?;
        let doc = FanDocument::parse(&text).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let report = cli(&["chart", &example(file), "--cone", "0"])?;
        ensure(start.elapsed() < Duration::from_secs(1), format!("{} took {:?}", file, start.elapsed()))?;
        let k = kernel_from_report(&report, doc.basis())?;
        let want: Vec<Scalar> = want.iter().map(|s| parse_scalar(s, doc.basis()).unwrap()).collect();
        ensure(k.len() == 1, format!("{}: kernel has dimension {}", file, k.len()))?;
        ensure(proportional(&k[0], &want), format!("{}: kernel {:?} is not proportional to {:?}", file, k[0], want))?;
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let r = cli(&["classical", &example("ex_max.json"), "--cone", "0", "--degree-bound", "4"])?;
    let hilbert: Vec<Vec<i64>> = serde_json::from_value(r["results"]["hilbert"].clone()).map_err(|e| e.to_string())?;
    ensure(hilbert.len() == 4, format!("Hilbert basis has {} elements", hilbert.len()))?;
    let cols = [vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, 1]];
    for h in &hilbert {
        ensure(cols.iter().all(|c| c.iter().zip(h).map(|(a, b)| a * b).sum::<i64>() >= 0), format!("{:?} is not in the dual cone", h))?;
    }
    let rels = r["results"]["relations"].as_array().ok_or("no relations")?;
    ensure(rels.len() == 1, format!("{} relations", rels.len()))?;
    let lhs: Vec<u64> = serde_json::from_value(rels[0]["lhs"].clone()).map_err(|e| e.to_string())?;
    let rhs: Vec<u64> = serde_json::from_value(rels[0]["rhs"].clone()).map_err(|e| e.to_string())?;
    // yt − xz up to relabeling: two disjoint squarefree quadratic monomials
    // covering all four variables
    let support = |m: &[u64]| m.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i).collect::<BTreeSet<_>>();
    ensure(lhs.iter().chain(&rhs).all(|&e| e <= 1), "relation is not squarefree")?;
    ensure(support(&lhs).len() == 2 && support(&rhs).len() == 2, "relation is not of type yt − xz")?;
    ensure(support(&lhs).union(&support(&rhs)).count() == 4, "relation does not involve all four variables")?;
    for j in 0..3 {
        let side = |m: &[u64]| m.iter().zip(&hilbert).map(|(&e, h)| e as i64 * h[j]).sum::<i64>();
        ensure(side(&lhs) == side(&rhs), "relation does not hold on the Hilbert basis")?;
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let r = cli(&["classical", &example("ex_max.json"), "--cone", "0", "--degree-bound", "4"])?;
    let cg = &r["results"]["class_group"];
    // oracle: invariant factors d_k = gcd of k×k minors of the 4×3 ray matrix
    let rows = [vec![1i64, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, 1]];
    let mut minors_gcd = vec![BigInt::from(0); 4];
    for k in 1..=3 {
        for rs in subsets(4, k) {
            for cs in subsets(3, k) {
                let m: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| rows[i][j]).collect()).collect();
                let det = int_det(&m).to_integer();
                minors_gcd[k] = num_integer::Integer::gcd(&minors_gcd[k], &det);
            }
        }
    }
    let torsion: Vec<BigInt> = (1..=3).map(|k| &minors_gcd[k] / if k == 1 { BigInt::from(1) } else { minors_gcd[k - 1].clone() }).filter(|f| *f != BigInt::from(1)).collect();
    let free = 4 - (1..=3).filter(|&k| minors_gcd[k] != BigInt::from(0)).count();
    ensure(cg["free_rank"] == free, format!("free rank {} vs oracle {}", cg["free_rank"], free))?;
    ensure(cg["free_rank"] == 1, "free rank is not 1")?;
    ensure(cg["torsion"].as_array().map_or(false, Vec::is_empty) && torsion.is_empty(), "unexpected torsion")
}

fn criterion_4() -> Outcome {
    for (a, b, c) in [(1, 1, 1), (2, 3, 5)] {
        let cf = int_fan(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![a, -b, c]], &[&[0, 1, 2, 3]]);
        let id = cf.fan.find(&[0, 1, 2, 3].into_iter().collect()).unwrap();
        let charts: Vec<Chart> = subsets(4, 3)
            .into_iter()
            .map(|t| build_chart_with(&cf, id, &ChartChoice { i_tilde: Some(t), completion: None }).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        ensure(charts.len() == 4, "expected 4 full-rank subfamilies")?;
        for x in &charts {
            for y in &charts {
                ensure(verify_choice_independence(x, y).map_err(|e| e.to_string())?, format!("Ĩ = {:?} vs {:?}", x.i_tilde, y.i_tilde))?;
            }
        }
    }
    Ok(())
}

fn completion_cocycles(cols: &[Vec<i64>]) -> Outcome {
    let cf = int_fan(3, cols, &[&[0, 1]]);
    let id = cf.fan.find(&[0, 1].into_iter().collect()).unwrap();
    let charts: Vec<Chart> = (2..cols.len())
        .map(|j| build_chart_with(&cf, id, &ChartChoice { i_tilde: None, completion: Some(vec![j]) }).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let mut completions = BTreeSet::new();
    for c in &charts {
        completions.insert(c.j_set.clone());
    }
    ensure(completions.len() == charts.len() && charts.len() >= 3, "completions are not distinct")?;
    for x in &charts {
        for y in &charts {
            for z in &charts {
                let t_xy = completion_transition(x, y).map_err(|e| e.to_string())?;
                let t_yz = completion_transition(y, z).map_err(|e| e.to_string())?;
                let t_xz = completion_transition(x, z).map_err(|e| e.to_string())?;
                let comp = t_yz.compose(&t_xy).map_err(|e| e.to_string())?;
                ensure(comp.map_linear == t_xz.map_linear && comp.map_int == t_xz.map_int, format!("J = {:?}, {:?}, {:?}", x.j_set, y.j_set, z.j_set))?;
                // lattice side against P_χ″⁻¹ P_χ computed from the permutations
                let direct = IntMatrix::permutation(&inverse(&z.chi)).mul(&IntMatrix::permutation(&x.chi)).map_err(|e| e.to_string())?;
                ensure(t_xz.map_int == direct || t_xz.map_int == direct.transpose(), "lattice transition is not a permutation change")?;
            }
        }
    }
    Ok(())
}

fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

fn criterion_5() -> Outcome {
    completion_cocycles(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1], vec![1, 1, 2]])?;
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..10 {
        let mut cols = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        while cols.len() < 6 {
            let v = random_generators(&mut rng, 3, 1, 3).remove(0);
            if v[2] != 0 {
                cols.push(v);
            }
        }
        completion_cocycles(&cols)?;
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let mut done = 0;
    while done < 50 {
        let d = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=d);
        let rays = random_generators(&mut rng, d, k, 3);
        if rank(&rays.iter().map(|r| to_q(r)).collect::<Vec<_>>()) != k {
            continue;
        }
        let mut cols: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
        cols.extend(rays.iter().cloned());
        let cone: Vec<usize> = (d..d + k).collect();
        let cf = int_fan(d, &cols, &[&cone]);
        let id = cf.fan.find(&cone.iter().copied().collect()).unwrap();
        let chart = build_chart(&cf, id).map_err(|e| e.to_string())?;
        ensure(chart.ker_basis.is_empty(), format!("nonempty kernel for {:?}", rays))?;
        ensure(chart.matches_standard_presentation(), format!("not the standard presentation for {:?}", rays))?;
        // oracle: h̄_σ is injective
        let hbar: Vec<Vec<Q>> = chart.h_bar.to_rows().iter().map(|r| r.iter().map(|x| x.as_rational().unwrap()).collect()).collect();
        ensure(nullspace(&hbar, chart.h_bar.cols()).is_empty(), "h̄ has a kernel")?;
        done += 1;
    }
    Ok(())
}

fn lmat(rows: &[Vec<i64>]) -> ScalarMatrix {
    ScalarMatrix::from_int_rows(rows)
}

fn shifted_copy(cf: &CalibratedFan, l: &ScalarMatrix) -> (CalibratedFan, FanMorphism) {
    let (d, n) = (cf.d(), cf.n());
    let lh = l.mul(cf.cal.matrix()).unwrap();
    let cal = Calibration::new(cf.cal.field(), d, ScalarMatrix::identity(d).hstack(&lh).unwrap(), BTreeSet::new()).unwrap();
    let sets: Vec<BTreeSet<usize>> = cf.fan.cones().iter().map(|c| c.rays.iter().map(|i| i + d).collect()).collect();
    let gens = cf.gens.iter().map(|i| i + d).collect();
    let tgt = CalibratedFan::new(cal, sets, gens).unwrap();
    let mut h = IntMatrix::zeros(d + n, n);
    for i in 0..n {
        h.set(d + i, i, 1.into());
    }
    (tgt, FanMorphism::new(l.clone(), h, BTreeMap::new()))
}

/// A complete simplicial fan in the plane on random primitive rays.
fn random_plane_fan(rng: &mut StdRng) -> CalibratedFan {
    loop {
        let mut rays: Vec<(f64, Vec<i64>)> = Vec::new();
        let count = rng.gen_range(3..=6);
        for v in random_generators(rng, 2, count, 3) {
            let g = num_integer::gcd(v[0], v[1]).abs();
            let p = vec![v[0] / g, v[1] / g];
            let angle = (p[1] as f64).atan2(p[0] as f64);
            if rays.iter().all(|(_, w)| *w != p) {
                rays.push((angle, p));
            }
        }
        rays.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let k = rays.len();
        let cross = |a: &[i64], b: &[i64]| a[0] * b[1] - a[1] * b[0];
        if k < 3 || (0..k).any(|i| cross(&rays[i].1, &rays[(i + 1) % k].1) <= 0) {
            continue;
        }
        let mut cols = vec![vec![1, 0], vec![0, 1]];
        cols.extend(rays.iter().map(|r| r.1.clone()));
        let cones: Vec<Vec<usize>> = (0..k).map(|i| vec![2 + i, 2 + (i + 1) % k]).collect();
        let refs: Vec<&[usize]> = cones.iter().map(Vec::as_slice).collect();
        return int_fan(2, &cols, &refs);
    }
}

fn quantum_line() -> CalibratedFan {
    let basis = IrrationalBasis::sqrt_symbols(&[("alpha", 2)]).unwrap();
    let f = ScalarField::new(Arc::new(basis));
    let cal = Calibration::from_columns(&f, 1, &[vec![Scalar::one()], vec![-Scalar::symbol(0)]], &[]).unwrap();
    closed(cal, &[[0].into_iter().collect(), [1].into_iter().collect()])
}

fn base_fan(rng: &mut StdRng) -> (CalibratedFan, Vec<FanMorphism>) {
    match rng.gen_range(0..5) {
        0 => {
            let cf = quantum_line();
            let id = FanMorphism::identity(&cf);
            (cf, vec![id])
        }
        1 => {
            let cf = int_fan(2, &[vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]);
            let rot = FanMorphism::new(lmat(&[vec![0, -1], vec![1, 0]]), IntMatrix::permutation(&[1, 2, 3, 0]), BTreeMap::new());
            let refl = FanMorphism::new(lmat(&[vec![0, 1], vec![1, 0]]), IntMatrix::permutation(&[1, 0, 3, 2]), BTreeMap::new());
            let id = FanMorphism::identity(&cf);
            (cf, vec![id, rot, refl])
        }
        2 => {
            let cf = int_fan(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, 1]], &[&[0, 1, 2, 3]]);
            let swap = FanMorphism::new(lmat(&[vec![0, 1, 1], vec![1, 0, -1], vec![0, 0, 1]]), IntMatrix::permutation(&[1, 0, 3, 2]), BTreeMap::new());
            let id = FanMorphism::identity(&cf);
            (cf, vec![id, swap])
        }
        _ => {
            let cf = random_plane_fan(rng);
            let id = FanMorphism::identity(&cf);
            (cf, vec![id])
        }
    }
}

fn check_functor(src: &CalibratedFan, mid: &CalibratedFan, tgt: &CalibratedFan, f: &FanMorphism, g: &FanMorphism) -> Outcome {
    let e = |x: qtoric::morphism::MorphismError| x.to_string();
    ensure(f.validate(src, mid).map_err(e)?.passed(), "f is not valid")?;
    ensure(g.validate(mid, tgt).map_err(e)?.passed(), "g is not valid")?;
    let gf = g.compose(f).map_err(e)?;
    ensure(gf.validate(src, tgt).map_err(e)?.passed(), "g∘f is not valid")?;
    let atlas_s = build_atlas(src).map_err(|x| x.to_string())?;
    let atlas_m = build_atlas(mid).map_err(|x| x.to_string())?;
    let atlas_t = build_atlas(tgt).map_err(|x| x.to_string())?;
    for sigma in src.fan.maximal_cones().map_err(|x| x.to_string())? {
        let m = f.target_cone(src, mid, sigma).map_err(e)?.ok_or("f maps no cone")?;
        let t = g.target_cone(mid, tgt, m).map_err(e)?.ok_or("g maps no cone")?;
        let cf1 = induced_chart_morphism(f, src, mid, &atlas_s[sigma], &atlas_m[m]).map_err(e)?;
        let cg = induced_chart_morphism(g, mid, tgt, &atlas_m[m], &atlas_t[t]).map_err(e)?;
        let cgf = induced_chart_morphism(&gf, src, tgt, &atlas_s[sigma], &atlas_t[t]).map_err(e)?;
        let comp = cg.compose(&cf1).map_err(e)?;
        ensure(comp.l_tilde == cgf.l_tilde && comp.h_chichi == cgf.h_chichi, format!("induced(g∘f) ≠ induced(g)·induced(f) on cone {}", sigma))?;
    }
    for (m, a, b, s, t) in [(f, src, mid, &atlas_s, &atlas_m), (g, mid, tgt, &atlas_m, &atlas_t), (&gf, src, tgt, &atlas_s, &atlas_t)] {
        let family = induced_family(m, a, b, s, t).map_err(e)?;
        ensure(glue_compatibility(a, &family, s, t).map_err(e)?.compatible, "family is not glue compatible")?;
        let (l, h) = extract_family(&family, s, t).map_err(e)?;
        ensure(l == m.l && h == m.h, "extracted (L, H) differs")?;
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..100 {
        let (cf, autos) = base_fan(&mut rng);
        let d = cf.d();
        let l = lmat(&random_unimodular(&mut rng, d, 4));
        let (copy, g) = shifted_copy(&cf, &l);
        if rng.gen_bool(0.5) {
            let auto = &autos[rng.gen_range(0..autos.len())];
            let f = auto.compose(&FanMorphism::scaling(&cf, rng.gen_range(1..4))).map_err(|e| e.to_string())?;
            check_functor(&cf, &cf, &copy, &f, &g)?;
        } else {
            let l2 = lmat(&random_unimodular(&mut rng, d, 4));
            let (copy2, g2) = shifted_copy(&copy, &l2);
            check_functor(&cf, &copy, &copy2, &g, &g2)?;
        }
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let f = rational_field();
    for _ in 0..50 {
        let d = rng.gen_range(1..=4);
        let extra = rng.gen_range(1..=3);
        let mut cols: Vec<Vec<Q>> = (0..d).map(|i| (0..d).map(|j| support::q(i64::from(i == j))).collect()).collect();
        for _ in 0..extra {
            let den = rng.gen_range(1..=3);
            cols.push((0..d).map(|_| Q::new(rng.gen_range(-3..=3).into(), BigInt::from(den))).collect());
        }
        let scalar_cols: Vec<Vec<Scalar>> = cols.iter().map(|c| c.iter().map(|x| Scalar::from_rational(x.clone())).collect()).collect();
        let cal = Calibration::from_columns(&f, d, &scalar_cols, &[]).map_err(|e| e.to_string())?;
        let g = gale_transform(&cal).map_err(|e| e.to_string())?;
        let n = cols.len();
        let kernel: Vec<Vec<Q>> = (0..g.k.first().map_or(0, Vec::len))
            .map(|j| (0..n).map(|i| Q::from_integer(g.k[i][j].clone())).collect())
            .collect();
        for v in &kernel {
            for row in 0..d {
                let s: Q = (0..n).map(|i| &cols[i][row] * &v[i]).sum();
                ensure(s == support::q(0), "h·k ≠ 0")?;
            }
        }
        ensure(rank(&kernel) == n - d, format!("rank(k) = {} but N − d = {}", rank(&kernel), n - d))?;
        ensure(g.certified_exact, "exact sequence not certified")?;
    }
    let line = cli(&["gale", &example("quantum_line.json")])?;
    ensure(line["results"]["non_exact"] == true, "quantum line not flagged")?;
    let basis = IrrationalBasis::sqrt_symbols(&[("alpha", 2)]).unwrap();
    let cal = Calibration::from_columns(&ScalarField::new(Arc::new(basis)), 1, &[vec![Scalar::one()], vec![Scalar::symbol(0)]], &[]).unwrap();
    ensure(!gale_transform(&cal).map_err(|e| e.to_string())?.certified_exact, "(1, α) not flagged")
}

fn criterion_9() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let f = rational_field();
    for _ in 0..200 {
        let dim = rng.gen_range(1..=4);
        let count = rng.gen_range(1..=6);
        let gens = random_generators(&mut rng, dim, count, 3);
        let cone = Cone::from_int(&f, dim, &gens).map_err(|e| e.to_string())?;
        let oracle = cone_oracle(&gens);
        let e = |x: qtoric::cone::ConeError| x.to_string();
        ensure(cone.is_strongly_convex().map_err(e)? == oracle.pointed, format!("strong convexity of {:?}", gens))?;
        if oracle.pointed {
            let faces: BTreeSet<BTreeSet<usize>> = cone.faces().map_err(e)?.into_iter().map(|x| x.generators).collect();
            ensure(faces == oracle.faces, format!("faces of {:?}", gens))?;
            ensure(cone.extreme_rays().map_err(e)? == oracle.extreme, format!("extreme rays of {:?}", gens))?;
        }
        ensure(cone.dual().map_err(e)?.dual().map_err(e)?.same_as(&cone).map_err(e)?, format!("dual of dual of {:?}", gens))?;
    }
    Ok(())
}

fn criterion_10() -> Outcome {
    let cf = int_fan(2, &[vec![1, 0], vec![0, 1], vec![1, 1]], &[&[0, 2], &[1, 2]]);
    for id in 0..cf.fan.len() {
        let chart = build_chart(&cf, id).map_err(|e| e.to_string())?;
        let band = forget_calibration(&chart).map_err(|e| e.to_string())?.band_rank;
        ensure(band == 1, format!("band rank {} on cone {}", band, id))?;
    }
    let r = cli(&["chart", &example("ex_max_sqrt.json"), "--cone", "0"])?;
    ensure(r["results"]["band_rank"] == 0, format!("irrational ex_max band rank {}", r["results"]["band_rank"]))?;
    let generic = Calibration::from_columns(
        &ScalarField::new(Arc::new(IrrationalBasis::sqrt_symbols(&[("a", 2), ("b", 3), ("c", 5)]).unwrap())),
        3,
        &[int_vector(&[1, 0, 0]), int_vector(&[0, 1, 0]), int_vector(&[0, 0, 1]), vec![Scalar::symbol(0), -Scalar::symbol(1), Scalar::symbol(2)]],
        &[],
    )
    .unwrap();
    ensure(generic.xi_lattice().rank == 0, "Ξ is not trivial")
}

fn criterion_11() -> Outcome {
    let r = cli(&["chart", &example("ex_max.json"), "--cone", "0"])?;
    let s = &r["results"]["stabilizer"];
    let tag = |m: &Value| (m["connected_dim"].clone(), m["discrete_rank"].clone());
    ensure(tag(&s["calibrated"]) != tag(&s["gale"]), format!("tags agree: {}", s))?;
    ensure(s["verdict"] == "distinct", "verdict is not distinct")?;
    // a simplicial cone shows no such difference
    let simp = int_fan(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], &[&[0, 1, 2]]);
    let id = simp.fan.find(&[0, 1, 2].into_iter().collect()).unwrap();
    let chart = build_chart(&simp, id).map_err(|e| e.to_string())?;
    let rep = qtoric::classical::stabilizer_report(&simp.cal, &chart).map_err(|e| e.to_string())?;
    ensure(rep.verdict != "distinct", "simplicial cone reported distinct")
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 11] = [
        ("kernel of the non-simplicial chart", criterion_1, Some(2)),
        ("classical recovery: 4 Hilbert generators, one relation yt - xz", criterion_2, Some(5)),
        ("class group of the quadric cone is Z", criterion_3, Some(1)),
        ("choice independence over the 4 subfamilies", criterion_4, None),
        ("completion cocycle", criterion_5, None),
        ("simplicial reduction on 50 random cones", criterion_6, None),
        ("functoriality on 100 random composable pairs", criterion_7, None),
        ("Gale exactness on 50 random calibrations, quantum line flagged", criterion_8, None),
        ("cone engine against subset enumeration on 200 random cones", criterion_9, Some(60)),
        ("band rank", criterion_10, None),
        ("stabilizer distinction", criterion_11, None),
    ];
    let mut failed = Vec::new();
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(()), Some(l)) if elapsed > Duration::from_secs(*l) => Err(format!("took {:.2} s, limit {} s", elapsed.as_secs_f64(), l)),
            (r, _) => r,
        };
        match &result {
            Ok(()) => println!("criterion {:>2}: PASS  {} ({:.2} s)", i + 1, name, elapsed.as_secs_f64()),
            Err(e) => {
                println!("criterion {:>2}: FAIL  {} ({:.2} s): {}", i + 1, name, elapsed.as_secs_f64(), e);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {:?}", failed);
}
