//! Plain-text tables for test, identification and fit results.

use std::fmt::Write;

use super::{OrderResult, ParFit, PortmanteauResult};

fn header(out: &mut String, label: &str, period: usize) {
    let _ = write!(out, "{label:<18}");
    for v in 1..=period {
        let _ = write!(out, "{v:>10}");
    }
    out.push('\n');
}

/// Rows `v`, `κ_v` and the decision, followed by the critical region.
pub fn portmanteau_table(r: &PortmanteauResult) -> String {
    let mut out = String::new();
    header(&mut out, "v", r.kappa.len());
    let _ = write!(out, "{:<18}", "kappa_v");
    for k in &r.kappa {
        let _ = write!(out, "{k:>10.1}");
    }
    let _ = write!(out, "\n{:<18}", "reject");
    for &rej in &r.reject_by_season {
        let _ = write!(out, "{:>10}", if rej { "yes" } else { "no" });
    }
    let _ = writeln!(out, "\ncritical region: ({:.1}, inf) at subtest level {}", r.critical_value, r.subtest_level);
    let _ = writeln!(out, "white noise hypothesis: {}", if r.reject_any { "rejected" } else { "not rejected" });
    out
}

pub fn order_table(r: &OrderResult) -> String {
    let mut out = String::new();
    let name = match r.family {
        super::Family::Par => "p(v)",
        super::Family::Pma => "q(v)",
    };
    header(&mut out, "v", r.seasonal.len());
    let _ = write!(out, "{name:<18}");
    for o in &r.seasonal {
        let _ = write!(out, "{o:>10}");
    }
    let _ = writeln!(out, "\nglobal order: {}", r.global);
    if !r.singular.is_empty() {
        let _ = writeln!(out, "singular systems treated as inside the band: {:?}", r.singular);
    }
    out
}

/// Orders and coefficients with one row per lag, blank beyond `p(v)`.
pub fn fit_table(fit: &ParFit) -> String {
    let mut out = String::new();
    header(&mut out, "v", fit.period);
    let _ = write!(out, "{:<18}", "p(v)");
    for o in &fit.orders {
        let _ = write!(out, "{o:>10}");
    }
    out.push('\n');
    for i in 1..=fit.max_order() {
        let _ = write!(out, "{:<18}", format!("phi_{i}(v)"));
        for c in &fit.coeffs {
            match c.get(i - 1) {
                Some(phi) => {
                    let _ = write!(out, "{phi:>10.4}");
                }
                None => {
                    let _ = write!(out, "{:>10}", "");
                }
            }
        }
        out.push('\n');
    }
    out
}
