//! JSON envelopes and CSV series shared by the command-line front end.

use std::fmt::Write as _;

use serde::Serialize;

use crate::linalg::CMatrix;

pub const SCHEMA_VERSION: u32 = 1;

/// Pretty JSON with `schema` and `kind` fields in front of `body`'s fields.
/// Bodies that are not objects go under `data`.
pub fn to_json<T: Serialize>(kind: &str, body: &T) -> String {
    let mut env = serde_json::Map::new();
    env.insert("schema".into(), SCHEMA_VERSION.into());
    env.insert("kind".into(), kind.into());
    match serde_json::to_value(body).expect("report serializes") {
        serde_json::Value::Object(fields) => env.extend(fields),
        other => {
            env.insert("data".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
    s.push('\n');
    s
}

/// CSV with a header line; values use the shortest round-trip float format.
pub fn csv<R: AsRef<[String]>>(header: &[&str], rows: impl IntoIterator<Item = R>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.as_ref().join(","));
        out.push('\n');
    }
    out
}

pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// `row,col,re,im` for every nonzero entry.
pub fn matrix_csv(m: &CMatrix) -> String {
    let mut out = String::from("row,col,re,im\n");
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let z = m[(r, c)];
            if z.re != 0.0 || z.im != 0.0 {
                let _ = writeln!(out, "{r},{c},{:?},{:?}", z.re, z.im);
            }
        }
    }
    out
}
