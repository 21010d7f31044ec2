use serde_json::{json, Map, Value};

use super::{GraphMap, OpenSetModel};
use crate::error::{Error, Result};
use crate::expr::{parse_expr, VarStyle};
use crate::grid::DomainBox;

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn floats(v: &Value, what: &str) -> Result<Vec<f64>> {
    serde_json::from_value(v.clone()).map_err(|e| invalid(format!("{what}: {e}")))
}

fn float(v: Option<&Value>, what: &str) -> Result<f64> {
    v.and_then(Value::as_f64)
        .ok_or_else(|| invalid(format!("{what}: expected a number")))
}

fn count(v: Option<&Value>, what: &str) -> Result<usize> {
    v.and_then(Value::as_u64)
        .map(|n| n as usize)
        .ok_or_else(|| invalid(format!("{what}: expected a non-negative integer")))
}

fn domain_box(v: &Value) -> Result<DomainBox> {
    serde_json::from_value(v.clone()).map_err(|e| invalid(format!("box: {e}")))
}

fn field<'a>(obj: &'a Value, key: &str, alias: &str) -> Option<&'a Value> {
    obj.get(key).or_else(|| obj.get(alias))
}

impl OpenSetModel {
    /// Parses the tagged-union JSON form. Exactly one variant key must be
    /// present; `punctured_axis` also takes a sibling `dim`.
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| invalid("set must be a JSON object with one variant key"))?;
        let tags: Vec<&String> = obj.keys().filter(|k| k.as_str() != "dim").collect();
        let [tag] = tags.as_slice() else {
            return Err(invalid(format!("set must have exactly one variant key, got {tags:?}")));
        };
        let body = &obj[tag.as_str()];
        let set = match tag.as_str() {
            "half_space" => OpenSetModel::HalfSpace {
                a: floats(
                    field(body, "a", "normal").ok_or_else(|| invalid("half_space.a missing"))?,
                    "half_space.a",
                )?,
                b: float(field(body, "b", "offset"), "half_space.b")?,
            },
            "ball" => OpenSetModel::Ball {
                center: floats(
                    field(body, "center", "c").ok_or_else(|| invalid("ball.center missing"))?,
                    "ball.center",
                )?,
                radius: float(field(body, "radius", "r"), "ball.radius")?,
            },
            "ball_exterior" => OpenSetModel::BallExterior {
                center: floats(
                    field(body, "center", "c").ok_or_else(|| invalid("ball_exterior.center missing"))?,
                    "ball_exterior.center",
                )?,
                radius: float(field(body, "radius", "r"), "ball_exterior.radius")?,
            },
            "box" => OpenSetModel::Box(domain_box(body)?),
            "graph_complement" => {
                let n = count(body.get("dim"), "graph_complement.dim")?;
                let sources: Vec<String> = body
                    .get("f")
                    .and_then(|f| serde_json::from_value(f.clone()).ok())
                    .ok_or_else(|| invalid("graph_complement.f: expected a list of expressions"))?;
                let refs: Vec<&str> = sources.iter().map(String::as_str).collect();
                OpenSetModel::GraphComplement(GraphMap::parse(n, &refs)?)
            }
            "reinhardt_log" => OpenSetModel::ReinhardtLog(Box::new(Self::from_json(body)?)),
            "intersection" | "union" => {
                let parts = body
                    .as_array()
                    .ok_or_else(|| invalid(format!("{tag}: expected a list of sets")))?
                    .iter()
                    .map(Self::from_json)
                    .collect::<Result<Vec<_>>>()?;
                if tag.as_str() == "union" {
                    OpenSetModel::Union(parts)
                } else {
                    OpenSetModel::Intersection(parts)
                }
            }
            "oracle" => {
                let dim = count(body.get("dim"), "oracle.dim")?;
                let src = body
                    .get("expr")
                    .and_then(Value::as_str)
                    .ok_or_else(|| invalid("oracle.expr: expected a string"))?;
                let bbox = domain_box(body.get("bbox").ok_or_else(|| invalid("oracle.bbox missing"))?)?;
                OpenSetModel::Oracle {
                    dim,
                    expr: parse_expr(src, dim)?,
                    bbox,
                }
            }
            "punctured_axis" => {
                let dim = count(obj.get("dim"), "punctured_axis needs a sibling dim")?;
                let one_based: Vec<u64> = match body {
                    Value::Number(_) => vec![body.as_u64().ok_or_else(|| invalid("punctured_axis: bad axis"))?],
                    _ => serde_json::from_value(body.clone()).map_err(|e| invalid(format!("punctured_axis: {e}")))?,
                };
                if one_based.contains(&0) {
                    return Err(invalid("punctured_axis axes are 1-based"));
                }
                OpenSetModel::PuncturedAxis {
                    dim,
                    axes: one_based.into_iter().map(|a| a as usize - 1).collect(),
                }
            }
            "whole" => OpenSetModel::Whole {
                dim: count(Some(body), "whole")?,
            },
            other => return Err(invalid(format!("unknown set variant '{other}'"))),
        };
        if obj.contains_key("dim") && tag.as_str() != "punctured_axis" {
            return Err(invalid("'dim' is only a sibling key of punctured_axis"));
        }
        set.validate()?;
        Ok(set)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| invalid(format!("set JSON: {e}")))?;
        Self::from_json(&v)
    }

    pub fn to_json(&self) -> Value {
        match self {
            OpenSetModel::HalfSpace { a, b } => json!({ "half_space": { "a": a, "b": b } }),
            OpenSetModel::Ball { center, radius } => json!({ "ball": { "center": center, "radius": radius } }),
            OpenSetModel::BallExterior { center, radius } => {
                json!({ "ball_exterior": { "center": center, "radius": radius } })
            }
            OpenSetModel::Box(b) => json!({ "box": b }),
            OpenSetModel::GraphComplement(g) => {
                let style = VarStyle::Real { dim: g.n };
                let f: Vec<String> = g.f.iter().map(|e| e.to_source(style)).collect();
                json!({ "graph_complement": { "dim": g.n, "f": f } })
            }
            OpenSetModel::ReinhardtLog(v) => json!({ "reinhardt_log": v.to_json() }),
            OpenSetModel::Intersection(p) => json!({ "intersection": p.iter().map(Self::to_json).collect::<Vec<_>>() }),
            OpenSetModel::Union(p) => json!({ "union": p.iter().map(Self::to_json).collect::<Vec<_>>() }),
            OpenSetModel::Oracle { dim, expr, bbox } => json!({
                "oracle": { "dim": dim, "expr": expr.to_source(VarStyle::Real { dim: *dim }), "bbox": bbox }
            }),
            OpenSetModel::PuncturedAxis { dim, axes } => {
                let mut m = Map::new();
                m.insert(
                    "punctured_axis".into(),
                    json!(axes.iter().map(|a| a + 1).collect::<Vec<_>>()),
                );
                m.insert("dim".into(), json!(dim));
                Value::Object(m)
            }
            OpenSetModel::Whole { dim } => json!({ "whole": dim }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let cases = [
            r#"{"box":[[0,1],[0,1]]}"#,
            r#"{"punctured_axis":1,"dim":2}"#,
            r#"{"ball":{"center":[0,0],"radius":1}}"#,
            r#"{"half_space":{"a":[1,0],"b":0}}"#,
            r#"{"graph_complement":{"dim":1,"f":["-x1^2"]}}"#,
            r#"{"reinhardt_log":{"box":[[-1,1]]}}"#,
            r#"{"union":[{"box":[[0,1]]},{"box":[[2,3]]}]}"#,
            r#"{"intersection":[{"ball":{"c":[0],"r":2}},{"box":[[0,null]]}]}"#,
            r#"{"oracle":{"dim":2,"expr":"1-x1^2-x2^2","bbox":[[-1,1],[-1,1]]}}"#,
            r#"{"whole":3}"#,
            r#"{"ball_exterior":{"center":[0,0],"radius":1}}"#,
        ];
        for c in cases {
            let s = OpenSetModel::from_json_str(c).unwrap();
            let back = OpenSetModel::from_json(&s.to_json()).unwrap();
            assert_eq!(s, back, "{c}");
        }
        let p = OpenSetModel::from_json_str(r#"{"punctured_axis":1,"dim":2}"#).unwrap();
        assert_eq!(p, OpenSetModel::PuncturedAxis { dim: 2, axes: vec![0] });
    }

    #[test]
    fn rejects_bad_input() {
        for c in [
            r#"{"box":[[1,0]]}"#,
            r#"{"punctured_axis":0,"dim":2}"#,
            r#"{"punctured_axis":3,"dim":2}"#,
            r#"{"ball":{"center":[0],"radius":-1}}"#,
            r#"{"oracle":{"dim":1,"expr":"x1","bbox":[[0,null]]}}"#,
            r#"{"sphere":{}}"#,
            r#"{"box":[[0,1]],"ball":{"center":[0],"radius":1}}"#,
            r#"{"union":[{"box":[[0,1]]},{"box":[[0,1],[0,1]]}]}"#,
            r#"[1]"#,
        ] {
            assert!(OpenSetModel::from_json_str(c).is_err(), "{c}");
        }
    }
}
