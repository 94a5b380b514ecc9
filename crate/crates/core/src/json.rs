//! JSON structure files.
//!
//! ```json
//! {
//!   "name": "Z2",
//!   "signature": {"functions": [{"name": "add", "arity": 2}], "relations": []},
//!   "universe": 2,
//!   "functions": {"add": [[0, 1], [1, 0]]},
//!   "relations": {}
//! }
//! ```
//!
//! `universe` is either a size or an array of distinct element names.
//! Function tables nest one array level per argument; constants are bare
//! integers. Relations list their tuples.

use serde_json::{json, Map, Value};

use crate::model::{table_len, FiniteStructure, ModelError, Result, Signature, Symbol};

fn malformed(msg: impl Into<String>) -> ModelError {
    ModelError::Malformed(msg.into())
}

fn parse_symbols(value: Option<&Value>, what: &str) -> Result<Vec<Symbol>> {
    let Some(value) = value else {
        return Ok(Vec::new());
    };
    let items = value
        .as_array()
        .ok_or_else(|| malformed(format!("signature.{what} must be an array")))?;
    items
        .iter()
        .map(|item| {
            let name = item
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| malformed(format!("signature.{what} entry lacks a name")))?;
            let arity = item
                .get("arity")
                .and_then(Value::as_u64)
                .ok_or_else(|| malformed(format!("symbol `{name}` lacks a nonnegative arity")))?;
            Ok(Symbol::new(name, arity as usize))
        })
        .collect()
}

pub fn signature_from_json(value: &Value) -> Result<Signature> {
    let obj = value
        .as_object()
        .ok_or_else(|| malformed("signature must be an object"))?;
    Signature::new(
        parse_symbols(obj.get("functions"), "functions")?,
        parse_symbols(obj.get("relations"), "relations")?,
    )
}

pub fn signature_to_json(sig: &Signature) -> Value {
    let syms = |s: &[Symbol]| -> Vec<Value> {
        s.iter()
            .map(|s| json!({"name": s.name, "arity": s.arity}))
            .collect()
    };
    json!({"functions": syms(sig.functions()), "relations": syms(sig.relations())})
}

fn flatten_table(
    value: &Value,
    depth: usize,
    n: usize,
    symbol: &str,
    out: &mut Vec<usize>,
) -> Result<()> {
    if depth == 0 {
        let v = value
            .as_u64()
            .ok_or_else(|| ModelError::OutOfRangeElement(symbol.to_string()))?
            as usize;
        if v >= n {
            return Err(ModelError::OutOfRangeElement(symbol.to_string()));
        }
        out.push(v);
        return Ok(());
    }
    let rows = value
        .as_array()
        .ok_or_else(|| ModelError::ArityMismatch(symbol.to_string()))?;
    if rows.len() != n {
        return Err(ModelError::ArityMismatch(symbol.to_string()));
    }
    for row in rows {
        flatten_table(row, depth - 1, n, symbol, out)?;
    }
    Ok(())
}

/// Decodes and validates a structure file.
pub fn structure_from_json(value: &Value) -> Result<FiniteStructure> {
    let obj = value
        .as_object()
        .ok_or_else(|| malformed("structure file must be an object"))?;
    let sig = signature_from_json(
        obj.get("signature")
            .ok_or_else(|| malformed("missing `signature`"))?,
    )?;
    let (n, names) = match obj.get("universe") {
        Some(Value::Number(num)) => (
            num.as_u64()
                .ok_or_else(|| malformed("universe size must be a nonnegative integer"))?
                as usize,
            None,
        ),
        Some(Value::Array(items)) => {
            let names = items
                .iter()
                .map(|v| {
                    v.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| malformed("element names must be strings"))
                })
                .collect::<Result<Vec<_>>>()?;
            (names.len(), Some(names))
        }
        _ => return Err(malformed("missing or malformed `universe`")),
    };
    if n == 0 {
        return Err(ModelError::EmptyUniverse);
    }

    let empty = Map::new();
    let funcs_obj = match obj.get("functions") {
        Some(v) => v
            .as_object()
            .ok_or_else(|| malformed("`functions` must be an object"))?,
        None => &empty,
    };
    let rels_obj = match obj.get("relations") {
        Some(v) => v
            .as_object()
            .ok_or_else(|| malformed("`relations` must be an object"))?,
        None => &empty,
    };
    for key in funcs_obj.keys() {
        if sig.function_index(key).is_none() {
            return Err(ModelError::UnknownSymbol(key.clone()));
        }
    }
    for key in rels_obj.keys() {
        if sig.relation_index(key).is_none() {
            return Err(ModelError::UnknownSymbol(key.clone()));
        }
    }

    let mut func_tables = Vec::new();
    for sym in sig.functions() {
        let raw = funcs_obj
            .get(&sym.name)
            .ok_or_else(|| ModelError::MissingTable(sym.name.clone()))?;
        let mut table = Vec::with_capacity(table_len(n, sym.arity));
        flatten_table(raw, sym.arity, n, &sym.name, &mut table)?;
        func_tables.push(table);
    }

    let mut rel_tuples = Vec::new();
    for sym in sig.relations() {
        let raw = rels_obj
            .get(&sym.name)
            .ok_or_else(|| ModelError::MissingTable(sym.name.clone()))?;
        let tuples = raw
            .as_array()
            .ok_or_else(|| ModelError::ArityMismatch(sym.name.clone()))?;
        let mut parsed = Vec::with_capacity(tuples.len());
        for t in tuples {
            let items = t
                .as_array()
                .ok_or_else(|| ModelError::ArityMismatch(sym.name.clone()))?;
            let tuple = items
                .iter()
                .map(|x| {
                    x.as_u64()
                        .map(|x| x as usize)
                        .ok_or_else(|| ModelError::OutOfRangeElement(sym.name.clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            parsed.push(tuple);
        }
        rel_tuples.push(parsed);
    }

    let mut structure = FiniteStructure::from_tuples(sig, n, func_tables, rel_tuples)?;
    if let Some(names) = names {
        structure = structure.with_elem_names(names)?;
    }
    if let Some(name) = obj.get("name").and_then(Value::as_str) {
        structure = structure.with_name(name);
    }
    Ok(structure)
}

pub fn structure_from_str(text: &str) -> Result<FiniteStructure> {
    let value: Value = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    structure_from_json(&value)
}

fn nest(table: &[usize], n: usize, depth: usize) -> Value {
    if depth == 0 {
        return json!(table[0]);
    }
    let stride = table.len() / n;
    Value::Array(
        (0..n)
            .map(|i| nest(&table[i * stride..(i + 1) * stride], n, depth - 1))
            .collect(),
    )
}

pub fn structure_to_json(m: &FiniteStructure) -> Value {
    let mut obj = Map::new();
    if let Some(name) = m.name() {
        obj.insert("name".into(), json!(name));
    }
    obj.insert("signature".into(), signature_to_json(m.signature()));
    obj.insert(
        "universe".into(),
        match m.elem_names() {
            Some(names) => json!(names),
            None => json!(m.size()),
        },
    );
    let mut funcs = Map::new();
    for (f, sym) in m.signature().functions().iter().enumerate() {
        funcs.insert(
            sym.name.clone(),
            nest(m.function_table(f), m.size(), sym.arity),
        );
    }
    obj.insert("functions".into(), Value::Object(funcs));
    let mut rels = Map::new();
    for (r, sym) in m.signature().relations().iter().enumerate() {
        rels.insert(sym.name.clone(), json!(m.relation_tuples(r)));
    }
    obj.insert("relations".into(), Value::Object(rels));
    Value::Object(obj)
}
