//! JSON forms of the domain types. Objects are `serde_json::Map`s, whose keys serialize in
//! sorted order, so equal values always print identically.
//!
//! Field elements are integers when e = 1 and coordinate vectors (low to high) otherwise.

use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::carlitz::RatZeta;
use crate::fq::{FieldParams, Fq};
use crate::hodge_pink::{GrassLine, OmegaReport};
use crate::matrix::{BoundedReport, CheckStatus, MatSeries};
use crate::rigid::PeriodValue;
use crate::series::{Center, Series, ZSeries};
use crate::shtuka::{RZCoords, ShtukaTriple, VerifyReport};
use crate::trunc::{TruncElem, TruncRing};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid JSON input: {0}")]
pub struct JsonError(pub String);

type Res<T> = Result<T, JsonError>;

fn bad(msg: impl Into<String>) -> JsonError {
    JsonError(msg.into())
}

fn get<'a>(v: &'a Value, key: &str) -> Res<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing key \"{key}\"")))
}
fn get_i64(v: &Value, key: &str) -> Res<i64> {
    get(v, key)?.as_i64().ok_or_else(|| bad(format!("\"{key}\" must be an integer")))
}
fn get_arr<'a>(v: &'a Value, key: &str) -> Res<&'a Vec<Value>> {
    get(v, key)?.as_array().ok_or_else(|| bad(format!("\"{key}\" must be an array")))
}
fn as_arr(v: &Value) -> Res<&Vec<Value>> {
    v.as_array().ok_or_else(|| bad("expected an array"))
}
fn as_i64(v: &Value) -> Res<i64> {
    v.as_i64().ok_or_else(|| bad("expected an integer"))
}
fn obj(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

pub fn field_coeff(f: &Fq, raw: u16) -> Value {
    if f.params().e == 1 {
        json!(raw)
    } else {
        json!(f.coords(raw))
    }
}

pub fn field_coeff_from(f: &Fq, v: &Value) -> Res<u16> {
    match v {
        Value::Number(_) if f.params().e == 1 => {
            let n = as_i64(v)?;
            Ok(f.from_int(n))
        }
        Value::Array(a) => {
            let c = a.iter().map(|x| x.as_u64().map(|u| u as u32).ok_or_else(|| bad("coordinates must be nonnegative integers"))).collect::<Res<Vec<_>>>()?;
            f.from_coords(&c).map_err(|e| bad(e.to_string()))
        }
        _ => Err(bad("field element must be an integer (prime field) or a coordinate vector")),
    }
}

pub fn field_params(f: &Fq) -> Value {
    let p = f.params();
    obj(vec![("p", json!(p.p)), ("e", json!(p.e)), ("modulus", json!(p.modulus))])
}

/// Reads {"q"} or {"p", "e", "modulus"}.
pub fn field_from(v: &Value) -> Res<Arc<Fq>> {
    let params = if let Some(m) = v.get("modulus") {
        let p = get_i64(v, "p")? as u32;
        let e = get_i64(v, "e")? as u32;
        let modulus = as_arr(m)?.iter().map(|x| as_i64(x).map(|n| n as u32)).collect::<Res<Vec<_>>>()?;
        FieldParams { p, e, modulus }
    } else {
        FieldParams::of_size(get_i64(v, "q")? as u32).map_err(|e| bad(e.to_string()))?
    };
    let f = Fq::new(params).map_err(|e| bad(e.to_string()))?;
    if let Some(q) = v.get("q") {
        if as_i64(q)? as usize != f.q() {
            return Err(bad("q does not match p^e"));
        }
    }
    Ok(f)
}

pub fn ring_params(r: &TruncRing) -> Value {
    let f = r.field();
    let p = f.params();
    obj(vec![("N", json!(r.order())), ("q", json!(f.q())), ("p", json!(p.p)), ("e", json!(p.e)), ("modulus", json!(p.modulus))])
}

pub fn ring_from(v: &Value) -> Res<Arc<TruncRing>> {
    let f = field_from(v)?;
    TruncRing::new(&f, get_i64(v, "N")? as usize).map_err(|e| bad(e.to_string()))
}

pub fn trunc_elem(a: &TruncElem) -> Value {
    let r = a.ring();
    let f = r.field();
    let terms: Vec<Value> = a.terms().map(|(i, j, c)| json!([i, j, field_coeff(f, c)])).collect();
    obj(vec![("N", json!(r.order())), ("q", json!(f.q())), ("terms", Value::Array(terms))])
}

/// Reads a TruncElem into `ring`; the stated N and q must match.
pub fn trunc_elem_from(v: &Value, ring: &Arc<TruncRing>) -> Res<TruncElem> {
    if get_i64(v, "N")? as usize != ring.order() || get_i64(v, "q")? as usize != ring.q() {
        return Err(bad("element ring does not match"));
    }
    let mut triples = Vec::new();
    for t in get_arr(v, "terms")? {
        let t = as_arr(t)?;
        if t.len() != 3 {
            return Err(bad("terms are [i, j, coeff]"));
        }
        let (i, j) = (as_i64(&t[0])?, as_i64(&t[1])?);
        if i < 0 || j < 0 {
            return Err(bad("exponents must be nonnegative"));
        }
        triples.push((i as usize, j as usize, field_coeff_from(ring.field(), &t[2])?));
    }
    Ok(TruncElem::from_raw_terms(ring, &triples))
}

/// A standalone TruncElem (its ring built from q and N).
pub fn trunc_elem_standalone(v: &Value) -> Res<TruncElem> {
    let f = field_from(v)?;
    let ring = TruncRing::new(&f, get_i64(v, "N")? as usize).map_err(|e| bad(e.to_string()))?;
    trunc_elem_from(v, &ring)
}

pub fn series(s: &ZSeries) -> Value {
    let coeffs: Vec<Value> = s.terms().map(|(e, c)| json!([e, trunc_elem(c)])).collect();
    obj(vec![("center", json!(s.center().name())), ("lo", json!(s.lo())), ("prec", json!(s.prec())), ("coeffs", Value::Array(coeffs))])
}

pub fn series_from(v: &Value, ring: &Arc<TruncRing>) -> Res<ZSeries> {
    let center = Center::parse(get(v, "center")?.as_str().unwrap_or("")).ok_or_else(|| bad("center must be \"z\" or \"z-zeta\""))?;
    let prec = match get(v, "prec")? {
        Value::Null => None,
        p => Some(as_i64(p)?),
    };
    let mut terms = Vec::new();
    for t in get_arr(v, "coeffs")? {
        let t = as_arr(t)?;
        if t.len() != 2 {
            return Err(bad("coefficients are [exp, TruncElem]"));
        }
        terms.push((as_i64(&t[0])?, trunc_elem_from(&t[1], ring)?));
    }
    Ok(Series::from_terms(ring, center, terms, prec))
}

pub fn matrix(m: &MatSeries) -> Value {
    let rows: Vec<Value> = m.rows().iter().map(|r| Value::Array(r.iter().map(series).collect())).collect();
    obj(vec![("r", json!(m.rank())), ("center", json!(m.center().name())), ("entries", Value::Array(rows))])
}

pub fn matrix_from(v: &Value, ring: &Arc<TruncRing>) -> Res<MatSeries> {
    let r = get_i64(v, "r")? as usize;
    let rows = get_arr(v, "entries")?
        .iter()
        .map(|row| as_arr(row)?.iter().map(|s| series_from(s, ring)).collect::<Res<Vec<_>>>())
        .collect::<Res<Vec<_>>>()?;
    if rows.len() != r {
        return Err(bad("entries must have r rows"));
    }
    MatSeries::from_rows(rows).map_err(|e| bad(e.to_string()))
}

pub fn triple(t: &ShtukaTriple) -> Value {
    obj(vec![("n", json!(t.level())), ("ring", ring_params(t.ring())), ("tau", matrix(t.tau())), ("eta", matrix(t.eta()))])
}

pub fn triple_from(v: &Value) -> Res<ShtukaTriple> {
    let ring = ring_from(get(v, "ring")?)?;
    let n = get_i64(v, "n")?;
    if n < 0 {
        return Err(bad("level must be nonnegative"));
    }
    let tau = matrix_from(get(v, "tau")?, &ring)?;
    let eta = matrix_from(get(v, "eta")?, &ring)?;
    ShtukaTriple::new(&ring, n as u32, tau, eta).map_err(|e| bad(e.to_string()))
}

pub fn coords(c: &RZCoords) -> Value {
    obj(vec![("i", json!(c.i)), ("j", json!(c.j)), ("n", json!(c.n)), ("h", trunc_elem(&c.h))])
}

pub fn coords_from(v: &Value) -> Res<RZCoords> {
    let h = trunc_elem_standalone(get(v, "h")?)?;
    RZCoords::new(get_i64(v, "i")?, get_i64(v, "j")?, h, get_i64(v, "n")? as u32).map_err(|e| bad(e.to_string()))
}

pub fn check_status(s: &CheckStatus) -> Value {
    match s.detail() {
        Some(d) => obj(vec![("status", json!(s.label())), ("detail", json!(d))]),
        None => obj(vec![("status", json!(s.label()))]),
    }
}

pub fn bounded_report(b: &BoundedReport) -> Value {
    obj(vec![
        ("divisibility", Value::Array(b.divisibility.iter().map(check_status).collect())),
        ("det_unit", check_status(&b.det_unit)),
        ("passed", json!(b.passed())),
    ])
}

pub fn verify_report(r: &VerifyReport) -> Value {
    obj(vec![
        ("identity", check_status(&r.identity)),
        ("bounded", bounded_report(&r.bounded)),
        ("reduction", check_status(&r.reduction)),
        ("reduction_exps", json!(r.reduction_exps.map(|(a, b)| [a, b]))),
        ("in_functor", json!(r.in_functor())),
        ("passed", json!(r.all_passed())),
    ])
}

pub fn omega_report(r: &OmegaReport) -> Value {
    let mut pairs: Vec<(&str, Value)> = r.checks().iter().map(|(k, s)| (*k, check_status(s))).collect();
    pairs.push(("passed", json!(r.passed())));
    obj(pairs)
}

fn poly_coeffs(f: &Fq, c: &[u16]) -> Value {
    Value::Array(c.iter().map(|&x| field_coeff(f, x)).collect())
}

pub fn rat_zeta(r: &RatZeta) -> Value {
    let f = r.num().field();
    obj(vec![("num", poly_coeffs(f, r.num().coeffs())), ("den", poly_coeffs(f, r.den().coeffs()))])
}

/// [[h_deg, [[zeta_exp, coeff], ...]], ...] over the h-degrees with known nonzero data.
pub fn period_value(p: &PeriodValue) -> Value {
    let f = p.ring().field();
    let parts: Vec<Value> = p
        .parts()
        .iter()
        .enumerate()
        .filter(|(_, z)| !z.is_known_zero())
        .map(|(d, z)| json!([d, Value::Array(z.terms().map(|(e, c)| json!([e, field_coeff(f, c)])).collect())]))
        .collect();
    Value::Array(parts)
}

/// Least ζ-precision over the h-parts of `p` (null when exact).
pub fn period_prec(p: &PeriodValue) -> Value {
    json!(p.min_prec())
}

pub fn grass_line(g: &GrassLine) -> Value {
    obj(vec![
        ("chart", json!(g.chart.name())),
        ("slope", period_value(g.coordinate())),
        ("zeta_prec", period_prec(g.coordinate())),
    ])
}
