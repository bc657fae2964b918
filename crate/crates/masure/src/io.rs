//! JSON literals for points, germs, norms and saved masures.
//!
//! Rationals are strings `"p/q"` (integers may also be given as JSON numbers).

use crate::apartment::{HalfSpaceSpec, PolyNorm};
use crate::masure::{ApartmentId, FoldingLetter, Masure, MasureConfig, MasurePoint};
use crate::metrics::{ThetaSpec, XiSpec};
use crate::rat::{self, Vector, Q};
use crate::rootsys::{preset, validate_gcm, GcmRealization, SectorGermId};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad {what}: {detail}")]
pub struct IoError {
    pub what: &'static str,
    pub detail: String,
}

fn bad(what: &'static str, detail: impl ToString) -> IoError {
    IoError { what, detail: detail.to_string() }
}

pub type Result<T> = std::result::Result<T, IoError>;

pub fn parse_json(s: &str) -> Result<Value> {
    serde_json::from_str(s).map_err(|e| bad("json", e))
}

pub fn q_json(x: &Q) -> Value {
    Value::String(rat::fmt_q(x))
}

pub fn vec_json(v: &[Q]) -> Value {
    Value::Array(v.iter().map(q_json).collect())
}

pub fn parse_q_value(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => rat::parse_q(s).ok_or_else(|| bad("rational", s)),
        Value::Number(n) => n
            .as_i64()
            .map(rat::q)
            .or_else(|| rat::parse_q(&n.to_string()))
            .ok_or_else(|| bad("rational", n)),
        other => Err(bad("rational", other)),
    }
}

pub fn parse_vector(v: &Value) -> Result<Vector> {
    v.as_array().ok_or_else(|| bad("vector", v))?.iter().map(parse_q_value).collect()
}

fn as_i64(v: &Value, what: &'static str) -> Result<i64> {
    v.as_i64().ok_or_else(|| bad(what, v))
}

pub fn parse_word(v: &Value) -> Result<ApartmentId> {
    let arr = v.as_array().ok_or_else(|| bad("apartment word", v))?;
    let mut out = Vec::with_capacity(arr.len());
    for l in arr {
        let t = l.as_array().filter(|t| t.len() == 3).ok_or_else(|| bad("folding letter", l))?;
        let root = usize::try_from(as_i64(&t[0], "root index")?).map_err(|e| bad("root index", e))?;
        let k = as_i64(&t[1], "wall level")?;
        let sheet = u32::try_from(as_i64(&t[2], "sheet")?).map_err(|e| bad("sheet", e))?;
        out.push(FoldingLetter { root, k, sheet });
    }
    Ok(ApartmentId(out))
}

pub fn word_json(w: &ApartmentId) -> Value {
    Value::Array(w.0.iter().map(|l| json!([l.root, l.k, l.sheet])).collect())
}

/// `{"w": word, "b": coordinates}`; the word is not checked against a registry.
pub fn parse_point(v: &Value) -> Result<(ApartmentId, Vector)> {
    let w = v.get("w").map(parse_word).transpose()?.unwrap_or_default();
    let b = parse_vector(v.get("b").ok_or_else(|| bad("point", "missing \"b\""))?)?;
    Ok((w, b))
}

pub fn point_json(p: &MasurePoint) -> Value {
    json!({"w": word_json(&p.word), "b": vec_json(&p.b)})
}

pub fn parse_germ(real: &GcmRealization, v: &Value) -> Result<SectorGermId> {
    let s = v.as_str().ok_or_else(|| bad("germ", v))?;
    SectorGermId::parse(real, s).map_err(|e| bad("germ", e))
}

pub fn parse_theta(real: &GcmRealization, v: &Value) -> Result<ThetaSpec> {
    let norm = match v.get("norm") {
        None => PolyNorm::L1,
        Some(n) => n.as_str().and_then(PolyNorm::parse).ok_or_else(|| bad("norm", n))?,
    };
    let germ = parse_germ(real, v.get("germ").ok_or_else(|| bad("theta", "missing \"germ\""))?)?;
    Ok(ThetaSpec { norm, germ })
}

pub fn theta_json(t: &ThetaSpec) -> Value {
    json!({"norm": t.norm.name(), "germ": t.germ.to_string()})
}

/// `{"plus": theta, "minus": theta}` or a two-element array.
pub fn parse_xi(real: &GcmRealization, v: &Value) -> Result<XiSpec> {
    let (a, b) = match v {
        Value::Array(a) if a.len() == 2 => (&a[0], &a[1]),
        Value::Object(_) => (
            v.get("plus").ok_or_else(|| bad("xi", "missing \"plus\""))?,
            v.get("minus").ok_or_else(|| bad("xi", "missing \"minus\""))?,
        ),
        _ => return Err(bad("xi", v)),
    };
    XiSpec::new(parse_theta(real, a)?, parse_theta(real, b)?).map_err(|e| bad("xi", e))
}

pub fn xi_json(x: &XiSpec) -> Value {
    json!({"plus": theta_json(&x.plus), "minus": theta_json(&x.minus)})
}

pub fn parse_halfspace(v: &Value) -> Result<HalfSpaceSpec> {
    let root = v
        .get("root")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("half-space", v))?
        .iter()
        .map(|c| as_i64(c, "root coefficient"))
        .collect::<Result<Vec<_>>>()?;
    let k = parse_q_value(v.get("k").ok_or_else(|| bad("half-space", "missing \"k\""))?)?;
    Ok(HalfSpaceSpec { root, k })
}

pub fn halfspace_json(h: &HalfSpaceSpec) -> Value {
    json!({"root": h.root, "k": q_json(&h.k)})
}

/// Realization from `{"preset": name}` or `{"matrix": [[..]]}`.
pub fn parse_realization(v: &Value) -> Result<GcmRealization> {
    if let Some(p) = v.get("preset").and_then(Value::as_str) {
        return preset(p).map_err(|e| bad("preset", e));
    }
    let rows = v.get("matrix").and_then(Value::as_array).ok_or_else(|| bad("masure file", "needs preset or matrix"))?;
    let m = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| bad("matrix", r))?
                .iter()
                .map(|c| as_i64(c, "matrix entry"))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    validate_gcm(&m).map_err(|e| bad("matrix", e))
}

pub fn realization_json(real: &GcmRealization) -> Value {
    json!({"matrix": real.matrix})
}

pub fn masure_json(m: &Masure) -> Value {
    json!({
        "config": {
            "matrix": m.real().matrix,
            "height": m.table().h,
            "thickness": m.config.thickness,
            "depth": m.config.max_depth,
        },
        "apartments": m.apartments().filter(|a| !a.is_root()).map(word_json).collect::<Vec<_>>(),
    })
}

/// `{"config": {...}, "apartments": [words]}`; the config keys may also sit at top level.
pub fn parse_masure(v: &Value) -> Result<Masure> {
    let c = v.get("config").unwrap_or(v);
    let real = parse_realization(c)?;
    let get = |k: &'static str, default: i64| c.get(k).map_or(Ok(default), |x| as_i64(x, k));
    let cfg = MasureConfig::new(
        real,
        get("height", 20)?,
        u32::try_from(get("thickness", 2)?).map_err(|e| bad("thickness", e))?,
        usize::try_from(get("depth", 6)?).map_err(|e| bad("depth", e))?,
    )
    .map_err(|e| bad("masure file", e))?;
    let mut m = Masure::new(cfg);
    if let Some(list) = v.get("apartments") {
        for w in list.as_array().ok_or_else(|| bad("apartments", list))? {
            m.register_word(&parse_word(w)?).map_err(|e| bad("apartment", e))?;
        }
    }
    Ok(m)
}
