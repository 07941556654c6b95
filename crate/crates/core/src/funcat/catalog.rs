//! Named functions with parameters bound at instantiation and the family
//! memberships they are known to satisfy.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::FunctionExpr;
use crate::classify::Family;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedMembership {
    pub family: Family,
    pub order: f64,
    /// Where the claim comes from (closed form of the defining functional).
    pub cite: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub expr: FunctionExpr,
    pub params: BTreeMap<String, f64>,
    pub expected: Vec<ExpectedMembership>,
    /// Univalent on the unit disk (cited, never checked numerically).
    pub univalent: bool,
}

#[derive(Serialize)]
struct EntryJson<'a> {
    name: &'a str,
    expr: String,
    params: &'a BTreeMap<String, f64>,
    expected: &'a [ExpectedMembership],
}

pub const NAMES: [&str; 10] = [
    "quarter-plus-inverse",
    "scaled-cot",
    "neg-inv-log",
    "power-family",
    "one-minus-z-over-z",
    "koebe-reciprocal",
    "koebe",
    "neg-log",
    "half-plane",
    "mobius",
];

fn claim(family: Family, order: f64, cite: &str) -> ExpectedMembership {
    ExpectedMembership {
        family,
        order,
        cite: cite.to_string(),
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn entry(
    name: &'static str,
    text: &str,
    params: &[(&str, f64)],
    expected: Vec<ExpectedMembership>,
    singular: &[Complex64],
) -> CatalogEntry {
    let expr = FunctionExpr::parse(text)
        .expect("catalog expressions are valid")
        .with_singularities(singular.iter().copied());
    CatalogEntry {
        name,
        expr,
        params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        expected,
        univalent: true,
    }
}

/// `b cot(b z)` with `b = sqrt((1 - alpha) / pi)`; `S_f = 2 b^2` everywhere.
pub fn scaled_cot(alpha: f64) -> CatalogEntry {
    let b = ((1.0 - alpha) / PI).sqrt();
    entry(
        "scaled-cot",
        &format!("{b}*cot({b}*z)"),
        &[("alpha", alpha), ("b", b)],
        vec![claim(Family::BC, alpha, "Re(z b cot(b z)) >= (1+alpha)/2 on the disk")],
        &[],
    )
}

/// `eta / (1 - (1 - z)^eta)` with `eta = 2 alpha - 1`, `alpha != 1/2`.
pub fn power_family(alpha: f64) -> CatalogEntry {
    let eta = 2.0 * alpha - 1.0;
    entry(
        "power-family",
        &format!("({eta})/(1-(1-z)^{eta})"),
        &[("alpha", alpha), ("eta", eta)],
        vec![claim(
            Family::BCI,
            alpha,
            "reciprocal has 1 + z f''/f' = 1 + 2z(1-alpha)/(1-z)",
        )],
        &[one()],
    )
}

/// Instantiates a catalog entry; `alpha` overrides the default parameter of
/// the parametrised entries and is ignored by the others.
pub fn instantiate(name: &str, alpha: Option<f64>) -> Result<CatalogEntry> {
    Ok(match name {
        "quarter-plus-inverse" => entry(
            "quarter-plus-inverse",
            "z/4 + 1/z",
            &[],
            vec![claim(
                Family::BC,
                0.5,
                "1 + z f''/f' = (z^2+4)/(z^2-4), real part < -1/2",
            )],
            &[],
        ),
        "scaled-cot" => scaled_cot(alpha.unwrap_or(0.3)),
        "neg-inv-log" => entry(
            "neg-inv-log",
            "-(1)/log(1-z)",
            &[],
            vec![claim(
                Family::BCI,
                0.5,
                "reciprocal -log(1-z) has 1 + z f''/f' = 1/(1-z)",
            )],
            &[one()],
        ),
        "power-family" => power_family(alpha.unwrap_or(0.25)),
        "one-minus-z-over-z" => entry(
            "one-minus-z-over-z",
            "(1-z)/z",
            &[],
            vec![
                claim(Family::BC, 0.5, "1 + z g''/g' = -1 identically"),
                claim(Family::BSstar, 0.5, "-z g'/g = 1/(1-z)"),
            ],
            &[],
        ),
        "koebe-reciprocal" => entry(
            "koebe-reciprocal",
            "z + 1/z - 2",
            &[],
            vec![claim(
                Family::BSstar,
                0.0,
                "reciprocal of the Koebe function, which is starlike",
            )],
            &[one()],
        ),
        "koebe" => entry(
            "koebe",
            "z/(1-z)^2",
            &[],
            vec![claim(Family::Sstar, 0.0, "z k'/k = (1+z)/(1-z)")],
            &[one()],
        ),
        "neg-log" => entry(
            "neg-log",
            "-log(1-z)",
            &[],
            vec![claim(Family::C, 0.5, "1 + z f''/f' = 1/(1-z)")],
            &[one()],
        ),
        "half-plane" => entry(
            "half-plane",
            "z/(1-z)",
            &[],
            vec![
                claim(Family::C, 0.0, "1 + z f''/f' = (1+z)/(1-z)"),
                claim(Family::Sstar, 0.5, "z f'/f = 1/(1-z)"),
            ],
            &[one()],
        ),
        "mobius" => entry("mobius", "(2*z+1)/(z+3)", &[], vec![], &[Complex64::new(-3.0, 0.0)]),
        other => return Err(Error::UnknownCatalogEntry(other.to_string())),
    })
}

/// Every entry with default parameters.
pub fn entries() -> Vec<CatalogEntry> {
    NAMES
        .iter()
        .map(|n| instantiate(n, None).expect("catalog names are valid"))
        .collect()
}

/// The catalog as a JSON array of `{name, expr, params, expected}`.
pub fn to_json(entries: &[CatalogEntry]) -> serde_json::Value {
    let docs: Vec<EntryJson<'_>> = entries
        .iter()
        .map(|e| EntryJson {
            name: e.name,
            expr: e.expr.to_string(),
            params: &e.params,
            expected: &e.expected,
        })
        .collect();
    serde_json::to_value(docs).expect("catalog serialises")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses_and_prints() {
        for e in entries() {
            let printed = e.expr.to_string();
            let back = FunctionExpr::parse(&printed).unwrap();
            let z = Complex64::new(0.31, -0.22);
            let (a, b) = (e.expr.eval(z).unwrap(), back.eval(z).unwrap());
            assert!((a - b).norm() <= 1e-14 * a.norm().max(1.0), "{}", e.name);
        }
    }

    #[test]
    fn unknown_entry() {
        assert!(matches!(instantiate("nope", None), Err(Error::UnknownCatalogEntry(_))));
    }

    #[test]
    fn json_shape() {
        let v = to_json(&entries());
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), NAMES.len());
        for item in arr {
            let obj = item.as_object().unwrap();
            let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
            assert_eq!(keys, ["expected", "expr", "name", "params"]);
            for claim in obj["expected"].as_array().unwrap() {
                assert!(claim["family"].is_string());
                assert!(claim["order"].is_number());
                assert!(claim["cite"].is_string());
            }
        }
    }

    #[test]
    fn b_form_entries_have_stable_constant_term() {
        for name in [
            "quarter-plus-inverse",
            "scaled-cot",
            "neg-inv-log",
            "power-family",
            "one-minus-z-over-z",
            "koebe-reciprocal",
        ] {
            let e = instantiate(name, None).unwrap();
            let probes: Vec<_> = [0.05, 0.02, 0.01]
                .iter()
                .map(|r| e.expr.laurent_b_check(*r).unwrap())
                .collect();
            for p in &probes {
                assert!(p.is_b_form, "{name}");
            }
            for w in probes.windows(2) {
                assert!((w[0].a0_estimate - w[1].a0_estimate).norm() < 1e-6, "{name}");
            }
        }
    }
}
