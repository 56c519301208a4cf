//! Tree JSON: `{"faces":[{"a":2,"b":3,"classes":["leaf", {"faces":[...]}]}]}`.
//! Unknown keys are rejected and integers must be plain decimals.

use num_bigint::BigInt;
use serde_json::{Map, Number, Value};

use super::{Bamboo, BranchClass, Face};
use crate::error::{Error, Result};

pub fn parse_tree_json(text: &str) -> Result<Bamboo> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::tree("/", format!("malformed JSON: {e}")))?;
    parse_bamboo(&value, "")
}

pub fn tree_to_json(tree: &Bamboo) -> Value {
    let faces = tree
        .faces
        .iter()
        .map(|f| {
            let classes = f
                .classes
                .iter()
                .map(|c| match c {
                    BranchClass::Leaf => Value::String("leaf".into()),
                    BranchClass::Sub(sub) => tree_to_json(sub),
                })
                .collect();
            let mut obj = Map::new();
            obj.insert("a".into(), int_value(&f.a));
            obj.insert("b".into(), int_value(&f.b));
            obj.insert("classes".into(), Value::Array(classes));
            Value::Object(obj)
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("faces".into(), Value::Array(faces));
    Value::Object(obj)
}

fn int_value(v: &BigInt) -> Value {
    Value::Number(v.to_string().parse::<Number>().expect("decimal integer"))
}

fn object<'a>(value: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::tree(display(path), "expected an object"))?;
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::tree(display(path), format!("unknown key {key:?}")));
        }
    }
    Ok(obj)
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::tree(display(path), format!("missing key {key:?}")))
}

fn display(path: &str) -> String {
    if path.is_empty() {
        "/".to_string()
    } else {
        path.to_string()
    }
}

fn parse_bamboo(value: &Value, path: &str) -> Result<Bamboo> {
    let obj = object(value, path, &["faces"])?;
    let faces_path = format!("{path}/faces");
    let faces = field(obj, "faces", path)?
        .as_array()
        .ok_or_else(|| Error::tree(&faces_path, "expected an array"))?;
    let faces = faces
        .iter()
        .enumerate()
        .map(|(i, f)| parse_face(f, &format!("{faces_path}/{i}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Bamboo { faces })
}

fn parse_face(value: &Value, path: &str) -> Result<Face> {
    let obj = object(value, path, &["a", "b", "classes"])?;
    let a = parse_int(field(obj, "a", path)?, &format!("{path}/a"))?;
    let b = parse_int(field(obj, "b", path)?, &format!("{path}/b"))?;
    let classes_path = format!("{path}/classes");
    let classes = field(obj, "classes", path)?
        .as_array()
        .ok_or_else(|| Error::tree(&classes_path, "expected an array"))?
        .iter()
        .enumerate()
        .map(|(l, c)| {
            let cpath = format!("{classes_path}/{l}");
            match c {
                Value::String(s) if s == "leaf" => Ok(BranchClass::Leaf),
                Value::Object(_) => parse_bamboo(c, &cpath).map(BranchClass::Sub),
                _ => Err(Error::tree(cpath, "expected \"leaf\" or a bamboo object")),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Face { a, b, classes })
}

fn parse_int(value: &Value, path: &str) -> Result<BigInt> {
    let Value::Number(n) = value else {
        return Err(Error::tree(path, "expected an integer"));
    };
    let text = n.to_string();
    let digits = text.strip_prefix('-').unwrap_or(&text);
    let plain = !digits.is_empty()
        && digits.bytes().all(|c| c.is_ascii_digit())
        && (digits == "0" || !digits.starts_with('0'));
    if !plain {
        return Err(Error::tree(path, format!("expected a decimal integer, got {text}")));
    }
    text.parse::<BigInt>()
        .map_err(|e| Error::tree(path, format!("bad integer {text}: {e}")))
}
