//! JSON documents for fans and morphisms, and SVG plots.
//!
//! Scalars are written either as strings (`"3"`, `"-1/2"`, or an expression
//! such as `"2*a - b/3"` over the declared symbol names) or as
//! `{"poly": {"num": [[coeff, exponents], ...], "den": [...]}}` with
//! exponent vectors indexed by symbol position. Printing is canonical:
//! rationals become `"p/q"` strings, everything else the `poly` object.

mod scalar_text;
mod svg;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::calibration::{Calibration, CalibrationError};
use crate::cone::ConeError;
use crate::fan::{CalibratedFan, FanError};
use crate::linalg::{IntMatrix, ScalarMatrix, ScalarVector};
use crate::morphism::FanMorphism;
use crate::scalar::{parse_rational, DigitStream, Interval, IrrationalBasis, Poly, Refiner, Scalar, ScalarField, SqrtRefiner, Symbol};

pub use scalar_text::{format_scalar, parse_scalar};
pub use svg::{emit_svg, View};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("plots need d <= 3, got d = {0}")]
    DimUnsupported(usize),
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

impl IoError {
    pub fn pointer(&self) -> Option<&str> {
        match self {
            IoError::Schema { pointer, .. } => Some(pointer),
            _ => None,
        }
    }
}

fn schema(pointer: &str, message: impl Into<String>) -> IoError {
    IoError::Schema {
        pointer: if pointer.is_empty() { "/".to_string() } else { pointer.to_string() },
        message: message.into(),
    }
}

fn child(pointer: &str, key: impl std::fmt::Display) -> String {
    let k = key.to_string().replace('~', "~0").replace('/', "~1");
    format!("{}/{}", pointer, k)
}

fn object<'a>(v: &'a Value, ptr: &str) -> Result<&'a Map<String, Value>, IoError> {
    v.as_object().ok_or_else(|| schema(ptr, "expected an object"))
}

fn array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array().ok_or_else(|| schema(ptr, "expected an array"))
}

fn required<'a>(m: &'a Map<String, Value>, ptr: &str, key: &str) -> Result<&'a Value, IoError> {
    m.get(key).ok_or_else(|| schema(&child(ptr, key), "missing required field"))
}

fn reject_unknown(m: &Map<String, Value>, ptr: &str, allowed: &[&str]) -> Result<(), IoError> {
    match m.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(&child(ptr, k), "unknown field")),
        None => Ok(()),
    }
}

fn index(v: &Value, ptr: &str, bound: usize) -> Result<usize, IoError> {
    let i = v.as_u64().ok_or_else(|| schema(ptr, "expected a non-negative integer"))? as usize;
    if i >= bound {
        return Err(schema(ptr, format!("index {} out of range (< {})", i, bound)));
    }
    Ok(i)
}

fn index_set(v: &Value, ptr: &str, bound: usize) -> Result<BTreeSet<usize>, IoError> {
    let mut out = BTreeSet::new();
    for (k, x) in array(v, ptr)?.iter().enumerate() {
        if !out.insert(index(x, &child(ptr, k), bound)?) {
            return Err(schema(&child(ptr, k), "repeated index"));
        }
    }
    Ok(out)
}

fn rational(v: &Value, ptr: &str) -> Result<BigRational, IoError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(schema(ptr, "expected a rational")),
    };
    parse_rational(&text).map_err(|e| schema(ptr, e.to_string()))
}

fn integer(v: &Value, ptr: &str) -> Result<BigInt, IoError> {
    let q = rational(v, ptr)?;
    if !q.is_integer() {
        return Err(schema(ptr, "expected an integer"));
    }
    Ok(q.to_integer())
}

fn rational_text(q: &BigRational) -> Value {
    Value::String(q.to_string())
}

fn int_value(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(n) => json!(n),
        Err(_) => Value::String(x.to_string()),
    }
}

fn poly_from_value(v: &Value, ptr: &str, m: usize) -> Result<Poly, IoError> {
    let mut terms = Vec::new();
    for (k, t) in array(v, ptr)?.iter().enumerate() {
        let tp = child(ptr, k);
        let pair = array(t, &tp)?;
        if pair.len() != 2 {
            return Err(schema(&tp, "expected [coefficient, exponents]"));
        }
        let c = rational(&pair[0], &child(&tp, 0))?;
        let ep = child(&tp, 1);
        let exps = array(&pair[1], &ep)?;
        if exps.len() > m {
            return Err(schema(&ep, format!("{} exponents for {} symbols", exps.len(), m)));
        }
        let e = exps
            .iter()
            .enumerate()
            .map(|(j, x)| {
                x.as_u64()
                    .and_then(|n| u32::try_from(n).ok())
                    .ok_or_else(|| schema(&child(&ep, j), "expected a non-negative exponent"))
            })
            .collect::<Result<Vec<u32>, IoError>>()?;
        terms.push((c, e));
    }
    Ok(Poly::from_terms(terms))
}

fn poly_to_value(p: &Poly, m: usize) -> Value {
    let terms = p
        .terms()
        .map(|(e, c)| {
            let mut full = e.clone();
            full.resize(m.max(e.len()), 0);
            json!([rational_text(c), full])
        })
        .collect();
    Value::Array(terms)
}

/// Reads one scalar literal.
pub fn scalar_from_value(v: &Value, ptr: &str, basis: &IrrationalBasis) -> Result<Scalar, IoError> {
    match v {
        Value::String(s) => parse_scalar(s, basis).map_err(|e| schema(ptr, e.to_string())),
        Value::Number(_) => Ok(Scalar::from_rational(rational(v, ptr)?)),
        Value::Object(m) => {
            reject_unknown(m, ptr, &["poly"])?;
            let pp = child(ptr, "poly");
            let body = object(required(m, ptr, "poly")?, &pp)?;
            reject_unknown(body, &pp, &["num", "den"])?;
            let num = poly_from_value(required(body, &pp, "num")?, &child(&pp, "num"), basis.len())?;
            let den = match body.get("den") {
                Some(d) => poly_from_value(d, &child(&pp, "den"), basis.len())?,
                None => Poly::one(),
            };
            Scalar::from_fraction(num, den).map_err(|e| schema(&child(&pp, "den"), e.to_string()))
        }
        _ => Err(schema(ptr, "expected a scalar literal")),
    }
}

/// Canonical literal of a scalar.
pub fn scalar_to_value(x: &Scalar, basis: &IrrationalBasis) -> Value {
    if let Some(q) = x.as_rational() {
        return rational_text(&q);
    }
    let x = x.clone().normalized();
    json!({"poly": {"num": poly_to_value(x.numerator(), basis.len()), "den": poly_to_value(x.denominator(), basis.len())}})
}

fn scalar_vector(v: &Value, ptr: &str, len: usize, basis: &IrrationalBasis) -> Result<ScalarVector, IoError> {
    let items = array(v, ptr)?;
    if items.len() != len {
        return Err(schema(ptr, format!("expected {} entries, found {}", len, items.len())));
    }
    items
        .iter()
        .enumerate()
        .map(|(k, x)| scalar_from_value(x, &child(ptr, k), basis))
        .collect()
}

fn scalar_rows(v: &Value, ptr: &str, basis: &IrrationalBasis) -> Result<Vec<ScalarVector>, IoError> {
    let rows = array(v, ptr)?;
    let width = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
    rows.iter()
        .enumerate()
        .map(|(k, r)| scalar_vector(r, &child(ptr, k), width, basis))
        .collect()
}

fn vector_value(v: &[Scalar], basis: &IrrationalBasis) -> Value {
    Value::Array(v.iter().map(|x| scalar_to_value(x, basis)).collect())
}

/// One declared irrational symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolDecl {
    pub name: String,
    pub enclosure: Interval,
    pub digits: Option<String>,
    pub sqrt: Option<BigRational>,
}

impl SymbolDecl {
    fn from_value(v: &Value, ptr: &str) -> Result<Self, IoError> {
        let m = object(v, ptr)?;
        reject_unknown(m, ptr, &["name", "enclosure", "digits", "sqrt"])?;
        let np = child(ptr, "name");
        let name = required(m, ptr, "name")?.as_str().ok_or_else(|| schema(&np, "expected a string"))?.to_string();
        let mut chars = name.chars();
        let ident = chars.next().is_some_and(|c| c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_');
        if !ident {
            return Err(schema(&np, "symbol names must be identifiers"));
        }
        let digits = match m.get("digits") {
            Some(Value::String(s)) => {
                DigitStream::parse(s).map_err(|e| schema(&child(ptr, "digits"), e.to_string()))?;
                Some(s.clone())
            }
            Some(_) => return Err(schema(&child(ptr, "digits"), "expected a string")),
            None => None,
        };
        let sqrt = match m.get("sqrt") {
            Some(x) => {
                let sp = child(ptr, "sqrt");
                let q = rational(x, &sp)?;
                SqrtRefiner::new(q.clone()).map_err(|e| schema(&sp, e.to_string()))?;
                Some(q)
            }
            None => None,
        };
        if digits.is_some() && sqrt.is_some() {
            return Err(schema(ptr, "give at most one of digits and sqrt"));
        }
        let enclosure = match m.get("enclosure") {
            Some(e) => {
                let ep = child(ptr, "enclosure");
                let pair = array(e, &ep)?;
                if pair.len() != 2 {
                    return Err(schema(&ep, "expected [lower, upper]"));
                }
                let lo = rational(&pair[0], &child(&ep, 0))?;
                let hi = rational(&pair[1], &child(&ep, 1))?;
                if lo >= hi {
                    return Err(schema(&ep, "lower must be below upper"));
                }
                Interval::new(lo, hi)
            }
            None => match (&digits, &sqrt) {
                (Some(ds), _) => {
                    let ds = DigitStream::parse(ds).expect("checked above");
                    ds.enclosure_with_digits(ds.available_digits())
                }
                (_, Some(q)) => SqrtRefiner::new(q.clone()).expect("checked above").refine(8),
                _ => return Err(schema(&child(ptr, "enclosure"), "missing required field")),
            },
        };
        Ok(SymbolDecl { name, enclosure, digits, sqrt })
    }

    fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("enclosure".into(), json!([rational_text(&self.enclosure.lo), rational_text(&self.enclosure.hi)]));
        if let Some(d) = &self.digits {
            m.insert("digits".into(), Value::String(d.clone()));
        }
        if let Some(q) = &self.sqrt {
            m.insert("sqrt".into(), rational_text(q));
        }
        Value::Object(m)
    }

    fn symbol(&self) -> Symbol {
        let refiner: Option<Arc<dyn Refiner>> = match (&self.digits, &self.sqrt) {
            (Some(d), _) => Some(Arc::new(DigitStream::parse(d).expect("validated digits"))),
            (_, Some(q)) => Some(Arc::new(SqrtRefiner::new(q.clone()).expect("validated radicand"))),
            _ => None,
        };
        Symbol::new(self.name.clone(), self.enclosure.clone(), refiner).expect("validated enclosure")
    }
}

fn parse_symbols(root: &Map<String, Value>) -> Result<(Vec<SymbolDecl>, Arc<IrrationalBasis>), IoError> {
    let decls = match root.get("symbols") {
        Some(v) => array(v, "/symbols")?
            .iter()
            .enumerate()
            .map(|(k, s)| SymbolDecl::from_value(s, &child("/symbols", k)))
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    let basis = IrrationalBasis::new(decls.iter().map(SymbolDecl::symbol).collect()).map_err(|e| schema("/symbols", e.to_string()))?;
    Ok((decls, Arc::new(basis)))
}

fn parse_json(text: &str) -> Result<Value, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))
}

fn check_version(root: &Map<String, Value>) -> Result<(), IoError> {
    match root.get("schema_version") {
        None => Ok(()),
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => Ok(()),
        Some(_) => Err(schema("/schema_version", format!("unsupported version, expected {}", SCHEMA_VERSION))),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// A calibrated fan with its declared symbols.
#[derive(Clone, Debug)]
pub struct FanDocument {
    pub symbols: Vec<SymbolDecl>,
    pub d: usize,
    /// The `N` columns `h(e_i)`, each of length `d`.
    pub columns: Vec<ScalarVector>,
    pub virtual_set: BTreeSet<usize>,
    pub gens: Option<BTreeSet<usize>>,
    pub cones: Vec<BTreeSet<usize>>,
    pub morphisms: Vec<MorphismDocument>,
    basis: Arc<IrrationalBasis>,
}

impl FanDocument {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        FanDocument::from_value(&parse_json(text)?)
    }

    pub fn from_value(v: &Value) -> Result<Self, IoError> {
        let root = object(v, "")?;
        reject_unknown(root, "", &["schema_version", "symbols", "calibration", "A", "cones", "morphisms"])?;
        check_version(root)?;
        let (symbols, basis) = parse_symbols(root)?;

        let cal = object(required(root, "", "calibration")?, "/calibration")?;
        reject_unknown(cal, "/calibration", &["d", "N", "columns", "virtual"])?;
        let d = required(cal, "/calibration", "d")?
            .as_u64()
            .ok_or_else(|| schema("/calibration/d", "expected a non-negative integer"))? as usize;
        let cols = array(required(cal, "/calibration", "columns")?, "/calibration/columns")?;
        let columns = cols
            .iter()
            .enumerate()
            .map(|(k, c)| scalar_vector(c, &child("/calibration/columns", k), d, &basis))
            .collect::<Result<Vec<_>, _>>()?;
        let n = columns.len();
        if let Some(nv) = cal.get("N") {
            if nv.as_u64() != Some(n as u64) {
                return Err(schema("/calibration/N", format!("does not match the {} columns", n)));
            }
        }
        let virtual_set = match cal.get("virtual") {
            Some(x) => index_set(x, "/calibration/virtual", n)?,
            None => BTreeSet::new(),
        };
        let gens = root.get("A").map(|x| index_set(x, "/A", n)).transpose()?;
        let mut cones = Vec::new();
        for (k, c) in array(required(root, "", "cones")?, "/cones")?.iter().enumerate() {
            let cp = child("/cones", k);
            let m = object(c, &cp)?;
            reject_unknown(m, &cp, &["rays"])?;
            cones.push(index_set(required(m, &cp, "rays")?, &child(&cp, "rays"), n)?);
        }
        let mut morphisms = Vec::new();
        if let Some(ms) = root.get("morphisms") {
            for (k, m) in array(ms, "/morphisms")?.iter().enumerate() {
                morphisms.push(MorphismDocument::from_value_at(m, &child("/morphisms", k), &basis)?);
            }
        }
        Ok(FanDocument {
            symbols,
            d,
            columns,
            virtual_set,
            gens,
            cones,
            morphisms,
            basis,
        })
    }

    pub fn to_value(&self) -> Value {
        let mut root = Map::new();
        root.insert("schema_version".into(), json!(SCHEMA_VERSION));
        if !self.symbols.is_empty() {
            root.insert("symbols".into(), Value::Array(self.symbols.iter().map(SymbolDecl::to_value).collect()));
        }
        let mut cal = Map::new();
        cal.insert("d".into(), json!(self.d));
        cal.insert("N".into(), json!(self.columns.len()));
        cal.insert("columns".into(), Value::Array(self.columns.iter().map(|c| vector_value(c, &self.basis)).collect()));
        if !self.virtual_set.is_empty() {
            cal.insert("virtual".into(), json!(self.virtual_set));
        }
        root.insert("calibration".into(), Value::Object(cal));
        if let Some(a) = &self.gens {
            root.insert("A".into(), json!(a));
        }
        root.insert("cones".into(), Value::Array(self.cones.iter().map(|c| json!({"rays": c})).collect()));
        if !self.morphisms.is_empty() {
            root.insert("morphisms".into(), Value::Array(self.morphisms.iter().map(|m| m.to_value(&self.basis)).collect()));
        }
        Value::Object(root)
    }

    /// Canonical text: pretty JSON with sorted keys and a trailing newline.
    pub fn print(&self) -> String {
        pretty(&self.to_value())
    }

    pub fn basis(&self) -> &Arc<IrrationalBasis> {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn field(&self, max_bits: u32) -> ScalarField {
        ScalarField::new(self.basis.clone()).with_max_bits(max_bits)
    }

    pub fn calibration(&self, field: &ScalarField) -> Result<Calibration, IoError> {
        Ok(Calibration::from_columns(field, self.d, &self.columns, &self.virtual_set.iter().copied().collect::<Vec<_>>())?)
    }

    /// The calibrated fan; `A` defaults to the union of the cones' rays and
    /// `close` adds all faces and intersections first.
    pub fn calibrated_fan(&self, field: &ScalarField, close: bool) -> Result<CalibratedFan, IoError> {
        let cal = self.calibration(field)?;
        let gens = self.gens.clone().unwrap_or_else(|| self.cones.iter().flatten().copied().collect());
        let cf = CalibratedFan::new(cal, self.cones.clone(), gens)?;
        if close {
            let closed = cf.fan.close()?;
            return Ok(cf.with_fan(closed));
        }
        Ok(cf)
    }
}

/// `(L, H, s)` of a fan morphism in a document.
#[derive(Clone, Debug)]
pub struct MorphismDocument {
    pub l: Vec<ScalarVector>,
    pub h: Vec<Vec<BigInt>>,
    pub s: BTreeMap<usize, usize>,
}

impl MorphismDocument {
    /// Parses a standalone morphism document; scalars use the symbols of
    /// `basis`, and a `symbols` list, if present, must name the same symbols.
    pub fn parse(text: &str, basis: &IrrationalBasis) -> Result<Self, IoError> {
        let v = parse_json(text)?;
        let root = object(&v, "")?;
        check_version(root)?;
        if let Some(s) = root.get("symbols") {
            let names: Vec<String> = (0..basis.len()).map(|i| basis.name(i)).collect();
            let given = array(s, "/symbols")?
                .iter()
                .enumerate()
                .map(|(k, x)| SymbolDecl::from_value(x, &child("/symbols", k)).map(|d| d.name))
                .collect::<Result<Vec<_>, _>>()?;
            if given != names {
                return Err(schema("/symbols", "symbols differ from those of the fan documents"));
            }
        }
        let mut body = root.clone();
        body.remove("symbols");
        body.remove("schema_version");
        MorphismDocument::from_value_at(&Value::Object(body), "", basis)
    }

    fn from_value_at(v: &Value, ptr: &str, basis: &IrrationalBasis) -> Result<Self, IoError> {
        let m = object(v, ptr)?;
        reject_unknown(m, ptr, &["L", "H", "s"])?;
        let l = scalar_rows(required(m, ptr, "L")?, &child(ptr, "L"), basis)?;
        let hp = child(ptr, "H");
        let hrows = array(required(m, ptr, "H")?, &hp)?;
        let width = hrows.first().and_then(Value::as_array).map_or(0, Vec::len);
        let mut h = Vec::new();
        for (i, r) in hrows.iter().enumerate() {
            let rp = child(&hp, i);
            let entries = array(r, &rp)?;
            if entries.len() != width {
                return Err(schema(&rp, format!("expected {} entries, found {}", width, entries.len())));
            }
            h.push(entries.iter().enumerate().map(|(j, x)| integer(x, &child(&rp, j))).collect::<Result<Vec<_>, _>>()?);
        }
        let mut s = BTreeMap::new();
        if let Some(sv) = m.get("s") {
            let sp = child(ptr, "s");
            for (k, x) in object(sv, &sp)? {
                let kp = child(&sp, k);
                let from: usize = k.parse().map_err(|_| schema(&kp, "keys must be indices"))?;
                s.insert(from, index(x, &kp, usize::MAX)?);
            }
        }
        Ok(MorphismDocument { l, h, s })
    }

    pub fn to_value(&self, basis: &IrrationalBasis) -> Value {
        let s: Map<String, Value> = self.s.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        let h: Vec<Vec<Value>> = self.h.iter().map(|r| r.iter().map(int_value).collect()).collect();
        json!({
            "L": self.l.iter().map(|r| vector_value(r, basis)).collect::<Vec<_>>(),
            "H": h,
            "s": s,
        })
    }

    pub fn print(&self, basis: &IrrationalBasis) -> String {
        pretty(&self.to_value(basis))
    }

    /// Checks shapes against the source and target fans and builds the
    /// morphism.
    pub fn morphism(&self, src: &CalibratedFan, tgt: &CalibratedFan) -> Result<FanMorphism, IoError> {
        let (d, d_t, n, n_t) = (src.d(), tgt.d(), src.n(), tgt.n());
        if self.l.len() != d_t || self.l.iter().any(|r| r.len() != d) {
            return Err(schema("/L", format!("expected a {} x {} matrix", d_t, d)));
        }
        if self.h.len() != n_t || self.h.iter().any(|r| r.len() != n) {
            return Err(schema("/H", format!("expected a {} x {} matrix", n_t, n)));
        }
        for (k, v) in &self.s {
            if !src.cal.is_virtual(*k) || !tgt.cal.is_virtual(*v) {
                return Err(schema(&child("/s", k), "s must map virtual indices to virtual indices"));
            }
        }
        let l = if d == 0 || d_t == 0 { ScalarMatrix::zeros(d_t, d) } else { ScalarMatrix::from_rows(self.l.clone()).expect("rectangular") };
        let h = IntMatrix::from_big_rows(self.h.clone(), n);
        Ok(FanMorphism::new(l, h, self.s.clone()))
    }
}
