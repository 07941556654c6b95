use meroconvex::funcat::catalog;
use meroconvex::palpha::QFunction;
use meroconvex::theorems::{verify_factorization, verify_inclusions, verify_sufficiency, TheoremId, TheoremReport};
use meroconvex::{DiskSampler, Family, FunctionExpr};

fn sampler() -> DiskSampler {
    DiskSampler::new(0.999, 16, 128)
}

fn json_keys(r: &TheoremReport) -> Vec<String> {
    let v = serde_json::to_value(r).unwrap();
    v.as_object().unwrap().keys().cloned().collect()
}

#[test]
fn inclusions_hold_for_inverse_convex_entries() {
    let s = sampler();
    for e in catalog::entries() {
        for c in e.expected.iter().filter(|c| c.family == Family::BCI) {
            let alphas = [0.0, 0.5 * c.order, c.order];
            for r in verify_inclusions(&e.expr, &alphas, &s).unwrap() {
                assert!(r.consistent, "{}: {r:?}", e.name);
                assert!(r.conclusion_check.pass, "{}: {r:?}", e.name);
            }
        }
    }
}

#[test]
fn nesting_fails_above_the_order() {
    let g = catalog::power_family(0.3).expr;
    let reports = verify_inclusions(&g, &[0.2, 0.3, 0.6], &sampler()).unwrap();
    let nest = &reports[0];
    assert_eq!(nest.theorem_id, TheoremId::InclusionMonotone);
    let passes: Vec<bool> = nest.hypothesis_checks.iter().map(|c| c.pass).collect();
    assert_eq!(passes, [true, true, false]);
    assert!(nest.consistent);
}

#[test]
fn sufficiency_across_orders() {
    let s = sampler();
    for alpha in [0.0, 0.3, 0.6, 0.9] {
        let f = catalog::scaled_cot(alpha).expr;
        let r = verify_sufficiency(&f, &QFunction::arctan_weight(alpha), alpha, &s).unwrap();
        assert!(
            r.hypotheses_hold() && r.conclusion_check.pass && r.consistent,
            "{alpha}: {r:?}"
        );
    }
}

#[test]
fn sufficiency_with_weight_below_the_schwarzian() {
    // |S_f| = 2(1-a)/pi exceeds 2q for q = (1-a)/(2 pi)
    let f = catalog::scaled_cot(0.2).expr;
    let q = QFunction::Constant(0.8 / (2.0 * std::f64::consts::PI));
    let r = verify_sufficiency(&f, &q, 0.2, &sampler()).unwrap();
    assert!(!r.hypothesis_checks[0].pass);
    assert!(r.consistent);
}

#[test]
fn factorization_detects_non_members() {
    let s = sampler();
    let koebe_reciprocal = FunctionExpr::parse("z + 1/z - 2").unwrap();
    let r = verify_factorization(&koebe_reciprocal, 0.5, 16, &s).unwrap();
    assert!(!r.hypotheses_hold());
    assert!(!r.conclusion_check.pass);
    assert!(r.consistent);
}

#[test]
fn reports_serialise_with_fixed_fields() {
    let f = catalog::scaled_cot(0.0).expr;
    let r = verify_factorization(&f, 0.0, 8, &sampler()).unwrap();
    assert_eq!(
        json_keys(&r),
        [
            "conclusion_check",
            "consistent",
            "hypothesis_checks",
            "inputs",
            "theorem_id"
        ]
    );
}
