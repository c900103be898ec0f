//! Browser bindings. Each export takes text, returns text, and throws the
//! error message as a string.

use superpoints::expr::{parse_element, parse_superfunction};
use superpoints::skeleton::superfunction_mul;
use superpoints::{Error, SuperMatrix};
use wasm_bindgen::prelude::*;

fn throw(e: Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

pub fn normalize_element(n: usize, text: &str) -> Result<String, Error> {
    Ok(parse_element(text, n)?.to_string())
}

pub fn invert_element(n: usize, text: &str) -> Result<String, Error> {
    Ok(parse_element(text, n)?.inv()?.to_string())
}

pub fn multiply_superfunctions(p: usize, q: usize, f: &str, g: &str) -> Result<String, Error> {
    let f = parse_superfunction(f, p, q)?;
    let g = parse_superfunction(g, p, q)?;
    Ok(superfunction_mul(&f, &g)?.to_string())
}

fn parse_matrix(json: &str) -> Result<SuperMatrix, Error> {
    serde_json::from_str(json).map_err(|e| Error::Invalid(format!("invalid JSON: {e}")))
}

pub fn matrix_supertrace(json: &str) -> Result<String, Error> {
    Ok(parse_matrix(json)?.supertrace().to_string())
}

pub fn matrix_inverse(json: &str) -> Result<String, Error> {
    let inv = parse_matrix(json)?.inverse()?;
    serde_json::to_string_pretty(&inv).map_err(|e| Error::Invalid(e.to_string()))
}

#[wasm_bindgen(js_name = normalizeElement)]
pub fn normalize_element_js(n: usize, text: &str) -> Result<String, JsValue> {
    normalize_element(n, text).map_err(throw)
}

#[wasm_bindgen(js_name = invertElement)]
pub fn invert_element_js(n: usize, text: &str) -> Result<String, JsValue> {
    invert_element(n, text).map_err(throw)
}

#[wasm_bindgen(js_name = multiplySuperfunctions)]
pub fn multiply_superfunctions_js(p: usize, q: usize, f: &str, g: &str) -> Result<String, JsValue> {
    multiply_superfunctions(p, q, f, g).map_err(throw)
}

#[wasm_bindgen(js_name = matrixSupertrace)]
pub fn matrix_supertrace_js(json: &str) -> Result<String, JsValue> {
    matrix_supertrace(json).map_err(throw)
}

#[wasm_bindgen(js_name = matrixInverse)]
pub fn matrix_inverse_js(json: &str) -> Result<String, JsValue> {
    matrix_inverse(json).map_err(throw)
}
