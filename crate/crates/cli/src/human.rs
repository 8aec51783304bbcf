//! Plain-text rendering. Numbers are rounded to six decimals.

use std::fmt::Write;

use num_complex::Complex64;
use qgame_core::equilibrium::solve::{NoEquilibrium, SolveOutcome};
use qgame_core::equilibrium::{DeviationCertificate, EquilibriumReport, LiftedStrategy};
use qgame_core::{QuantumStrategy, Strategy, Unitary};

pub fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') { "0.000000".into() } else { s }
}

fn complex(z: Complex64) -> String {
    let im = num(z.im.abs());
    let sign = if z.im < 0.0 && im != "0.000000" { '-' } else { '+' };
    format!("{}{sign}{im}i", num(z.re))
}

fn unitary(u: &Unitary) -> String {
    match u.to_params() {
        Ok(p) => format!("U({}, {})", complex(p.a()), complex(p.b())),
        Err(_) => {
            let rows: Vec<String> = u
                .matrix()
                .rows()
                .iter()
                .map(|r| r.iter().map(|z| complex(*z)).collect::<Vec<_>>().join(" "))
                .collect();
            format!("[{}]", rows.join("; "))
        }
    }
}

fn slots(q: &QuantumStrategy) -> String {
    q.unitaries.iter().map(unitary).collect::<Vec<_>>().join(" then ")
}

fn pure_label(actions: &[String]) -> String {
    if actions.is_empty() { "-".into() } else { actions.join(" ") }
}

pub fn strategy(s: &Strategy) -> String {
    match s {
        Strategy::Pure(p) => format!("pure {}", pure_label(&p.actions)),
        Strategy::Mixed(m) => {
            let parts: Vec<String> =
                m.support().iter().map(|(p, s)| format!("{} {}", num(*p), pure_label(&s.actions))).collect();
            format!("mixed {}", parts.join(" | "))
        }
        Strategy::Quantum(q) => format!("quantum {}", slots(q)),
        Strategy::MixedQuantum(m) => {
            let parts: Vec<String> = m.support().iter().map(|(p, q)| format!("  {} {}", num(*p), slots(q))).collect();
            format!("mixed-quantum over {} sequences\n{}", parts.len(), parts.join("\n"))
        }
    }
}

pub fn report(r: &EquilibriumReport) -> String {
    let mut out = String::new();
    writeln!(out, "method: {}", r.method).unwrap();
    writeln!(out, "value (to P1): {}", num(r.value)).unwrap();
    writeln!(out, "P1 strategy: {}", strategy(&r.strategy_p1)).unwrap();
    writeln!(out, "P2 strategy: {}", strategy(&r.strategy_p2)).unwrap();
    writeln!(out, "exploitability P1: {}", num(r.exploitability_p1)).unwrap();
    writeln!(out, "exploitability P2: {}", num(r.exploitability_p2)).unwrap();
    if let Some(g) = r.diagnostics.grid {
        writeln!(out, "grid: {g} points per angle").unwrap();
    }
    writeln!(out, "iterations: {}, restarts: {}, seed: {}", r.diagnostics.iterations, r.diagnostics.restarts, r.seed)
        .unwrap();
    out
}

fn certificate(c: &DeviationCertificate) -> String {
    format!(
        "{} deviates to {}: payoff {} -> {}",
        c.deviator,
        strategy(&c.deviation),
        num(c.original_payoff),
        num(c.improved_payoff)
    )
}

fn no_equilibrium(n: &NoEquilibrium) -> String {
    let mut out = format!("{}\n", n.reason);
    if !n.cycle.is_empty() {
        let steps: Vec<String> = n.cycle.iter().map(|(a, b)| format!("({a}, {b})")).collect();
        writeln!(out, "best-response cycle: {}", steps.join(" -> ")).unwrap();
    }
    if let Some(c) = &n.closest {
        writeln!(out, "least exploitable candidate:").unwrap();
        out.push_str(&report(c));
    }
    if let Some(c) = &n.certificate {
        writeln!(out, "certificate: {}", certificate(c)).unwrap();
    }
    out
}

pub fn outcome(o: &SolveOutcome) -> String {
    match o {
        SolveOutcome::Equilibrium(r) => report(r),
        SolveOutcome::NoEquilibrium(n) => no_equilibrium(n),
    }
}

pub fn demo(head: f64, payoff: f64, games: &[(usize, f64)], total: f64) -> String {
    let mut out = String::from("game  head-up  picard  cumulative\n");
    for (k, c) in games {
        writeln!(out, "{k:>4}  {}  {}  {}", num(head), num(payoff), num(*c)).unwrap();
    }
    writeln!(out, "Picard cumulative expected payoff: {}", num(total)).unwrap();
    out
}

pub fn lift(l: &LiftedStrategy) -> String {
    let mut out = format!("lifted Picard strategy: {}\n", slots(&l.strategy));
    out.push_str("stage  classical (H, T)       quantum (H, T)\n");
    for (k, (c, q)) in l.classical_diagonals.iter().zip(&l.quantum_diagonals).enumerate() {
        writeln!(out, "{k:>5}  ({}, {})  ({}, {})", num(c[0]), num(c[1]), num(q[0]), num(q[1])).unwrap();
    }
    writeln!(out, "max stagewise diagonal error: {:e}", l.max_error()).unwrap();
    out
}

pub fn certificates(certs: &[DeviationCertificate], wins: usize) -> String {
    let mut out = String::new();
    for (k, c) in certs.iter().enumerate() {
        writeln!(out, "{:>4}  {}", k + 1, certificate(c)).unwrap();
    }
    writeln!(out, "{wins}/{} certificates with deviator payoff 1", certs.len()).unwrap();
    out
}

pub fn ladder(r: &EquilibriumReport) -> String {
    let mut out = String::from("grid  points      value  exploit P1  exploit P2  iterations\n");
    for s in &r.diagnostics.rounds {
        writeln!(
            out,
            "{:>4}  {:>6}  {:>9}  {:>10}  {:>10}  {:>10}",
            s.grid,
            s.grid_points,
            num(s.value),
            num(s.exploitability_p1),
            num(s.exploitability_p2),
            s.oracle_iterations
        )
        .unwrap();
    }
    let worst: Vec<f64> =
        r.diagnostics.rounds.iter().map(|s| s.exploitability_p1.max(s.exploitability_p2)).collect();
    let monotone = worst.windows(2).all(|w| w[1] <= w[0] + 1e-6);
    writeln!(out, "exploitability nonincreasing: {}", if monotone { "yes" } else { "no" }).unwrap();
    out
}
