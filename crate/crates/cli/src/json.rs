//! JSON codecs for the workbench's file formats. Rationals always
//! serialize as "p/q" strings (bare integers when the denominator is 1)
//! so every round trip is bit-exact.

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use coarse_core::decomposition::{DecompositionWitness, WitnessTree};
use coarse_core::group::{FinSuppMap, ProductElement, WreathElement};
use coarse_core::linrep::LaurentPoly;
use coarse_core::metric::{Cover, FiniteMetricSpace, Piece};
use coarse_core::ratio::{format_rational, parse_rational, Rational};

// ---------- group elements ----------

pub fn encode_wreath_z(g: &WreathElement<i64>) -> Value {
    let lamps: Vec<Value> = g
        .lamps
        .decompose_deltas()
        .into_iter()
        .map(|(v, b)| json!([v, b]))
        .collect();
    json!({ "lamps": lamps, "shift": g.shift })
}

pub fn decode_wreath_z(v: &Value) -> Result<WreathElement<i64>> {
    let obj = v.as_object().ok_or_else(|| anyhow!("element must be a JSON object"))?;
    let shift = obj
        .get("shift")
        .and_then(Value::as_i64)
        .ok_or_else(|| anyhow!("element needs an integer \"shift\""))?;
    let lamps = obj
        .get("lamps")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("element needs a \"lamps\" array"))?;
    let mut map: FinSuppMap<i64> = FinSuppMap::empty();
    for entry in lamps {
        let pair = entry
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| anyhow!("each lamp must be a [position, value] pair"))?;
        let pos = pair[0].as_i64().ok_or_else(|| anyhow!("lamp position must be an integer"))?;
        let val = pair[1].as_i64().ok_or_else(|| anyhow!("lamp value must be an integer"))?;
        let existing = map.get(pos);
        map.set(pos, existing + val);
    }
    Ok(WreathElement::new(map, shift))
}

#[allow(dead_code)] // format symmetry with the decoder; exercised in tests
pub fn encode_wreath_nested(g: &WreathElement<WreathElement<i64>>) -> Value {
    let lamps: Vec<Value> = g
        .lamps
        .decompose_deltas()
        .into_iter()
        .map(|(v, b)| json!([v, encode_wreath_z(&b)]))
        .collect();
    json!({ "lamps": lamps, "shift": g.shift })
}

pub fn decode_wreath_nested(v: &Value) -> Result<WreathElement<WreathElement<i64>>> {
    let obj = v.as_object().ok_or_else(|| anyhow!("element must be a JSON object"))?;
    let shift = obj
        .get("shift")
        .and_then(Value::as_i64)
        .ok_or_else(|| anyhow!("element needs an integer \"shift\""))?;
    let lamps = obj
        .get("lamps")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("element needs a \"lamps\" array"))?;
    let mut map: FinSuppMap<WreathElement<i64>> = FinSuppMap::empty();
    for entry in lamps {
        let pair = entry
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| anyhow!("each lamp must be a [position, value] pair"))?;
        let pos = pair[0].as_i64().ok_or_else(|| anyhow!("lamp position must be an integer"))?;
        let val = decode_wreath_z(&pair[1]).context("nested lamp value")?;
        let existing = map.get(pos);
        map.set(pos, existing.multiply(&val));
    }
    Ok(WreathElement::new(map, shift))
}

#[allow(dead_code)] // format symmetry with the decoder; exercised in tests
pub fn encode_product(g: &ProductElement) -> Value {
    json!({
        "coordinates": g.coordinates.iter().map(encode_wreath_z).collect::<Vec<_>>()
    })
}

pub fn decode_product(v: &Value) -> Result<ProductElement> {
    let coords = v
        .get("coordinates")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("product element needs a \"coordinates\" array"))?;
    let coordinates = coords
        .iter()
        .map(decode_wreath_z)
        .collect::<Result<Vec<_>>>()?;
    if coordinates.is_empty() {
        bail!("product element needs at least one coordinate");
    }
    Ok(ProductElement::new(coordinates))
}

// ---------- metric spaces and covers ----------

pub fn encode_space(space: &FiniteMetricSpace) -> Value {
    let dist: Vec<Vec<String>> = space
        .dist_table()
        .iter()
        .map(|row| row.iter().map(format_rational).collect())
        .collect();
    json!({ "points": space.labels(), "dist": dist })
}

pub fn decode_space(v: &Value) -> Result<FiniteMetricSpace> {
    let points = v
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("space needs a \"points\" array"))?;
    let labels: Vec<String> = points
        .iter()
        .map(|p| {
            p.as_str()
                .map(str::to_owned)
                .ok_or_else(|| anyhow!("point labels must be strings"))
        })
        .collect::<Result<_>>()?;
    let dist_rows = v
        .get("dist")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("space needs a \"dist\" matrix"))?;
    let dist: Vec<Vec<Rational>> = dist_rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| anyhow!("distance rows must be arrays"))?
                .iter()
                .map(|cell| {
                    let s = cell
                        .as_str()
                        .ok_or_else(|| anyhow!("distances must be \"p/q\" strings"))?;
                    parse_rational(s).ok_or_else(|| anyhow!("bad rational {s:?}"))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    FiniteMetricSpace::new(labels, dist).map_err(|e| anyhow!("invalid metric space: {e}"))
}

pub fn encode_cover(cover: &Cover) -> Value {
    json!({
        "pieces": cover
            .pieces
            .iter()
            .map(|p| p.members().to_vec())
            .collect::<Vec<_>>()
    })
}

pub fn decode_cover(v: &Value) -> Result<Cover> {
    let pieces = v
        .get("pieces")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("cover needs a \"pieces\" array"))?;
    let pieces = pieces
        .iter()
        .map(|p| {
            let idx = p
                .as_array()
                .ok_or_else(|| anyhow!("pieces must be arrays of point indices"))?
                .iter()
                .map(|i| {
                    i.as_u64()
                        .map(|i| i as usize)
                        .ok_or_else(|| anyhow!("point indices must be nonnegative integers"))
                })
                .collect::<Result<Vec<usize>>>()?;
            Ok(Piece::new(idx))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Cover::new(pieces))
}

// ---------- witness trees ----------

fn encode_piece_list(family: &[Piece]) -> Value {
    Value::Array(
        family
            .iter()
            .map(|p| json!(p.members().to_vec()))
            .collect(),
    )
}

fn decode_piece_list(v: &Value) -> Result<Vec<Piece>> {
    v.as_array()
        .ok_or_else(|| anyhow!("family must be an array of pieces"))?
        .iter()
        .map(|p| {
            let idx = p
                .as_array()
                .ok_or_else(|| anyhow!("pieces must be arrays of indices"))?
                .iter()
                .map(|i| {
                    i.as_u64()
                        .map(|i| i as usize)
                        .ok_or_else(|| anyhow!("indices must be nonnegative integers"))
                })
                .collect::<Result<Vec<usize>>>()?;
            Ok(Piece::new(idx))
        })
        .collect()
}

/// Root encoding is flat (one witness); deeper nodes carry one witness
/// per child space in a "witnesses" array.
pub fn encode_witness_tree(tree: &WitnessTree) -> Result<Value> {
    match tree {
        WitnessTree::Leaf { bound } => Ok(json!({ "leaf": format_rational(bound) })),
        WitnessTree::Node { witnesses, child } => {
            let child = encode_child(child)?;
            match witnesses.as_slice() {
                [w] => Ok(json!({
                    "scale": format_rational(&w.scale),
                    "family0": encode_piece_list(&w.family0),
                    "family1": encode_piece_list(&w.family1),
                    "child": child,
                })),
                _ => bail!("root node must decompose exactly one space"),
            }
        }
    }
}

fn encode_child(tree: &WitnessTree) -> Result<Value> {
    match tree {
        WitnessTree::Leaf { bound } => Ok(json!({ "leaf": format_rational(bound) })),
        WitnessTree::Node { witnesses, child } => Ok(json!({
            "witnesses": witnesses
                .iter()
                .map(|w| json!({
                    "scale": format_rational(&w.scale),
                    "family0": encode_piece_list(&w.family0),
                    "family1": encode_piece_list(&w.family1),
                }))
                .collect::<Vec<_>>(),
            "child": encode_child(child)?,
        })),
    }
}

pub fn decode_witness_tree(v: &Value) -> Result<WitnessTree> {
    if let Some(leaf) = v.get("leaf") {
        let s = leaf.as_str().ok_or_else(|| anyhow!("leaf bound must be a string"))?;
        let bound = parse_rational(s).ok_or_else(|| anyhow!("bad rational {s:?}"))?;
        return Ok(WitnessTree::Leaf { bound });
    }
    if v.get("scale").is_some() {
        // flat root form
        let w = decode_flat_witness(v)?;
        let child = decode_witness_tree(
            v.get("child").ok_or_else(|| anyhow!("node needs a \"child\""))?,
        )?;
        return Ok(WitnessTree::Node {
            witnesses: vec![w],
            child: Box::new(child),
        });
    }
    if let Some(ws) = v.get("witnesses") {
        let witnesses = ws
            .as_array()
            .ok_or_else(|| anyhow!("\"witnesses\" must be an array"))?
            .iter()
            .map(decode_flat_witness)
            .collect::<Result<Vec<_>>>()?;
        let child = decode_witness_tree(
            v.get("child").ok_or_else(|| anyhow!("node needs a \"child\""))?,
        )?;
        return Ok(WitnessTree::Node {
            witnesses,
            child: Box::new(child),
        });
    }
    bail!("witness node needs \"leaf\", \"scale\" or \"witnesses\"")
}

fn decode_flat_witness(v: &Value) -> Result<DecompositionWitness> {
    let s = v
        .get("scale")
        .and_then(Value::as_str)
        .ok_or_else(|| anyhow!("witness needs a \"scale\" string"))?;
    let scale = parse_rational(s).ok_or_else(|| anyhow!("bad rational {s:?}"))?;
    let family0 = decode_piece_list(
        v.get("family0").ok_or_else(|| anyhow!("witness needs \"family0\""))?,
    )?;
    let family1 = decode_piece_list(
        v.get("family1").ok_or_else(|| anyhow!("witness needs \"family1\""))?,
    )?;
    Ok(DecompositionWitness {
        scale,
        family0,
        family1,
    })
}

// ---------- Laurent polynomials ----------

pub fn encode_laurent(p: &LaurentPoly) -> Value {
    json!({ "terms": p.terms().map(|(e, c)| json!([e, c])).collect::<Vec<_>>() })
}

#[allow(dead_code)] // format symmetry with the encoder; exercised in tests
pub fn decode_laurent(v: &Value) -> Result<LaurentPoly> {
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("Laurent polynomial needs a \"terms\" array"))?;
    let pairs = terms
        .iter()
        .map(|t| {
            let pair = t
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| anyhow!("terms must be [exponent, coefficient] pairs"))?;
            let e = pair[0].as_i64().ok_or_else(|| anyhow!("exponent must be an integer"))?;
            let c = pair[1].as_i64().ok_or_else(|| anyhow!("coefficient must be an integer"))?;
            Ok((e, c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LaurentPoly::from_terms(pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use coarse_core::decomposition::strategy_z_tree;
    use coarse_core::ratio::rat_int;

    #[test]
    fn element_round_trips() {
        let g = WreathElement::new(FinSuppMap::from_pairs([(2, 3), (-1, -4)]), 5);
        assert_eq!(decode_wreath_z(&encode_wreath_z(&g)).unwrap(), g);
        let nested = WreathElement::new(FinSuppMap::delta(1, g.clone()), -2);
        assert_eq!(
            decode_wreath_nested(&encode_wreath_nested(&nested)).unwrap(),
            nested
        );
        let p = ProductElement::new(vec![g.clone(), WreathElement::identity()]);
        assert_eq!(decode_product(&encode_product(&p)).unwrap(), p);
    }

    #[test]
    fn documented_element_example_parses() {
        let v: Value = serde_json::from_str(r#"{"lamps":[[2,3]],"shift":0}"#).unwrap();
        let g = decode_wreath_z(&v).unwrap();
        assert_eq!(g, WreathElement::new(FinSuppMap::delta(2, 3), 0));
    }

    #[test]
    fn space_and_cover_round_trip() {
        let space = coarse_core::metric::line_space(0, 4);
        let back = decode_space(&encode_space(&space)).unwrap();
        assert_eq!(back, space);
        let cover = Cover::new(vec![Piece::new(vec![0, 1, 2]), Piece::new(vec![2, 3, 4])]);
        assert_eq!(decode_cover(&encode_cover(&cover)).unwrap(), cover);
    }

    #[test]
    fn witness_tree_round_trips() {
        let tree = strategy_z_tree(&(0..=20).collect::<Vec<_>>(), rat_int(3));
        let v = encode_witness_tree(&tree).unwrap();
        assert_eq!(decode_witness_tree(&v).unwrap(), tree);
        // flat root JSON has scale/family0/family1 keys
        assert!(v.get("scale").is_some());
        assert!(v.get("child").and_then(|c| c.get("leaf")).is_some());
    }

    #[test]
    fn laurent_round_trips_sorted() {
        let p = LaurentPoly::from_terms([(3, -2), (-1, 5), (0, 1)]);
        let v = encode_laurent(&p);
        let exps: Vec<i64> = v["terms"]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| t[0].as_i64().unwrap())
            .collect();
        assert_eq!(exps, vec![-1, 0, 3]);
        assert_eq!(decode_laurent(&v).unwrap(), p);
    }
}
