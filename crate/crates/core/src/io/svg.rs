use std::collections::BTreeSet;
use std::fmt::Write;

use crate::fan::Fan;

use super::IoError;

/// Canvas and orthographic camera for [`emit_svg`]. Angles are in degrees
/// and only matter for `d = 3`.
#[derive(Clone, Debug, PartialEq)]
pub struct View {
    pub size: f64,
    pub azimuth: f64,
    pub elevation: f64,
}

impl Default for View {
    fn default() -> Self {
        View {
            size: 400.0,
            azimuth: 35.0,
            elevation: 25.0,
        }
    }
}

impl View {
    fn project(&self, p: &[f64]) -> (f64, f64) {
        let get = |i: usize| p.get(i).copied().unwrap_or(0.0);
        let (x, y) = match p.len() {
            0..=2 => (get(0), get(1)),
            _ => {
                let (sa, ca) = self.azimuth.to_radians().sin_cos();
                let (se, ce) = self.elevation.to_radians().sin_cos();
                let (x, y, z) = (get(0), get(1), get(2));
                let u = ca * x - sa * y;
                let v = ce * z - se * (sa * x + ca * y);
                (u, v)
            }
        };
        let r = 0.4 * self.size;
        (self.size / 2.0 + r * x, self.size / 2.0 - r * y)
    }
}

fn unit(field: &crate::scalar::ScalarField, v: &[crate::scalar::Scalar]) -> Vec<f64> {
    let f: Vec<f64> = v.iter().map(|x| field.approx_f64(x)).collect();
    let n = f.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        f
    } else {
        f.into_iter().map(|x| x / n).collect()
    }
}

fn point(p: (f64, f64)) -> String {
    format!("{:.3},{:.3}", p.0, p.1)
}

const PALETTE: [&str; 6] = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2"];

/// Draws the fan: rays as segments from the origin, two-dimensional faces
/// as shaded sectors. Irrational coordinates are drawn at interval
/// midpoints.
pub fn emit_svg(fan: &Fan, view: &View) -> Result<String, IoError> {
    let d = fan.ambient_dim();
    if d > 3 {
        return Err(IoError::DimUnsupported(d));
    }
    let field = fan.field();
    let origin = view.project(&vec![0.0; d]);
    let mut out = String::new();
    let s = view.size;
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s:.3}" height="{s:.3}" viewBox="0 0 {s:.3} {s:.3}">"#).unwrap();
    writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##).unwrap();
    let axes: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.1 } else { 0.0 }).collect())
        .collect();
    for (i, a) in axes.iter().enumerate() {
        let tip = view.project(a);
        writeln!(
            out,
            r##"<line class="axis" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#bbbbbb" stroke-dasharray="4 3"/><text class="axis-label" x="{:.3}" y="{:.3}" font-size="11" fill="#888888">e{}</text>"##,
            origin.0,
            origin.1,
            tip.0,
            tip.1,
            tip.0 + 3.0,
            tip.1 - 3.0,
            i + 1
        )
        .unwrap();
    }
    let mut rays: BTreeSet<usize> = BTreeSet::new();
    for (ci, fc) in fan.cones().iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let ext: Vec<usize> = fc.cone.extreme_rays()?;
        let gen_ids: Vec<usize> = fc.rays.iter().copied().collect();
        rays.extend(ext.iter().map(|&k| gen_ids[k]));
        let sectors: Vec<Vec<usize>> = match fc.cone.dimension()? {
            2 => vec![ext.clone()],
            3 => fc
                .cone
                .faces()?
                .into_iter()
                .filter(|f| f.dim == 2)
                .map(|f| ext.iter().copied().filter(|k| f.generators.contains(k)).collect())
                .collect(),
            _ => Vec::new(),
        };
        for sec in sectors {
            let pts: Vec<(f64, f64)> = sec.iter().map(|&k| view.project(&unit(field, &fc.cone.generators()[k]))).collect();
            let mut poly = vec![point(origin)];
            poly.extend(pts.iter().map(|&p| point(p)));
            writeln!(
                out,
                r#"<polygon class="cone" data-cone="{}" points="{}" fill="{}" fill-opacity="0.25" stroke="{}" stroke-width="1"/>"#,
                ci,
                poly.join(" "),
                color,
                color
            )
            .unwrap();
        }
    }
    for &r in &rays {
        let tip = view.project(&unit(field, &fan.ray_table()[r]));
        writeln!(
            out,
            r##"<line class="ray" data-ray="{}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#222222" stroke-width="2"/><text x="{:.3}" y="{:.3}" font-size="12">{}</text>"##,
            r,
            origin.0,
            origin.1,
            tip.0,
            tip.1,
            tip.0 + 4.0,
            tip.1 + 4.0,
            r
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}
