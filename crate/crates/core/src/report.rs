//! JSON documents for strategies, equilibrium reports and certificates.
//!
//! Numbers keep full precision. Quantum slots on two-state games are written
//! as `[re a, im a, re b, im b]` of their `U(a, b)` form; larger unitaries are
//! written as rows of `[re, im]` pairs.

use serde_json::{json, Value};

use crate::equilibrium::solve::{NoEquilibrium, SolveOutcome};
use crate::equilibrium::{DeviationCertificate, EquilibriumReport};
use crate::game::{PureClassicalStrategy, QuantumStrategy, Strategy};
use crate::matrix::Unitary;

fn slot(u: &Unitary) -> Value {
    if u.dim() == 2 {
        if let Ok(p) = u.to_params() {
            return json!([p.a().re, p.a().im, p.b().re, p.b().im]);
        }
    }
    Value::Array(
        u.matrix()
            .rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

fn actions(s: &PureClassicalStrategy) -> Value {
    json!(s.actions)
}

fn slots(s: &QuantumStrategy) -> Value {
    Value::Array(s.unitaries.iter().map(slot).collect())
}

pub fn strategy_json(s: &Strategy) -> Value {
    let owner = s.owner().to_string();
    match s {
        Strategy::Pure(p) => json!({ "owner": owner, "kind": "pure", "actions": actions(p) }),
        Strategy::Mixed(m) => json!({
            "owner": owner,
            "kind": "mixed",
            "support": m.support().iter().map(|(p, s)| json!({ "p": p, "actions": actions(s) })).collect::<Vec<_>>(),
        }),
        Strategy::Quantum(q) => json!({ "owner": owner, "kind": "quantum", "slots": slots(q) }),
        Strategy::MixedQuantum(m) => json!({
            "owner": owner,
            "kind": "mixed-quantum",
            "support": m.support().iter().map(|(p, s)| json!({ "p": p, "slots": slots(s) })).collect::<Vec<_>>(),
        }),
    }
}

pub fn report_json(r: &EquilibriumReport) -> Value {
    json!({
        "value": r.value,
        "strategy_p1": strategy_json(&r.strategy_p1),
        "strategy_p2": strategy_json(&r.strategy_p2),
        "exploitability_p1": r.exploitability_p1,
        "exploitability_p2": r.exploitability_p2,
        "method": r.method,
        "diagnostics": r.diagnostics,
        "seed": r.seed,
    })
}

pub fn certificate_json(c: &DeviationCertificate) -> Value {
    json!({
        "deviator": c.deviator.to_string(),
        "original_payoff": c.original_payoff,
        "improved_payoff": c.improved_payoff,
        "deviation": strategy_json(&c.deviation),
    })
}

fn no_equilibrium_json(n: &NoEquilibrium) -> Value {
    json!({
        "equilibrium": false,
        "classes": [n.classes[0].to_string(), n.classes[1].to_string()],
        "reason": n.reason,
        "cycle": n.cycle.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "closest": n.closest.as_ref().map(report_json),
        "certificate": n.certificate.as_ref().map(certificate_json),
    })
}

pub fn outcome_json(o: &SolveOutcome) -> Value {
    match o {
        SolveOutcome::Equilibrium(r) => {
            let mut v = report_json(r);
            v["equilibrium"] = Value::Bool(true);
            v
        }
        SolveOutcome::NoEquilibrium(n) => no_equilibrium_json(n),
    }
}

/// Pretty-printed document with a trailing newline.
pub fn to_document(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pennyflip;

    #[test]
    fn hadamard_slots_are_real_halves() {
        let v = strategy_json(&Strategy::Quantum(pennyflip::q_hadamard_pair()));
        assert_eq!(v["kind"], "quantum");
        let s = &v["slots"][0];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let got: Vec<f64> = s.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert!((got[0] - h).abs() < 1e-12 && got[1].abs() < 1e-12);
        assert!((got[2] - h).abs() < 1e-12 && got[3].abs() < 1e-12);
    }

    #[test]
    fn mixed_support_lists_actions() {
        let v = strategy_json(&Strategy::Mixed(pennyflip::picard_flip(0.5)));
        assert_eq!(v["owner"], "P1");
        assert_eq!(v["support"][1]["actions"], json!(["F"]));
        assert_eq!(v["support"][1]["p"], 0.5);
    }
}
