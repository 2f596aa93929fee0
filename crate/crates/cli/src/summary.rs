//! Human-readable rendering of a [`RunReport`].

use std::fmt::Write;

use brstkit_core::brst::BrstStatus;
use brstkit_core::koszul_tate::ResolutionStatus;

use crate::pipeline::RunReport;

fn dims(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

pub fn render(r: &RunReport) -> String {
    let mut out = String::new();
    let w = r.problem.window;
    let _ = writeln!(
        out,
        "{} variables, {} constraints, window D={} S={} G={} N={}",
        r.problem.variables.len(),
        r.problem.constraints.len(),
        w.max_weight,
        w.depth,
        w.ghost_cap,
        w.max_order
    );
    if let Some(a) = &r.bracket_axioms {
        let _ = writeln!(out, "bracket axioms: {} on {} triples (seed {})", if a.holds { "hold" } else { "FAIL" }, a.triples, a.seed);
    }
    if let Some(fc) = &r.first_class {
        match &fc.witness {
            None => {
                let _ = writeln!(out, "first class: yes, Gröbner basis of {} elements", fc.groebner_basis.len());
            }
            Some(wt) => {
                let _ = writeln!(
                    out,
                    "first class: no, {{g{}, g{}}} = {} has normal form {}",
                    wt.i + 1,
                    wt.j + 1,
                    wt.bracket,
                    wt.remainder
                );
            }
        }
    }
    if let Some(res) = &r.resolution {
        let status = match &res.status {
            ResolutionStatus::Unchecked => "unchecked".to_string(),
            ResolutionStatus::Complete => {
                format!("acyclic through weight {}, degree -{}", res.window.max_weight, res.window.depth)
            }
            ResolutionStatus::Truncated { degree, weight, .. } => {
                format!("acyclic in window, continues at degree {degree}, weight {weight}")
            }
            ResolutionStatus::Incomplete { degree, weight, dimension } => {
                format!("INCOMPLETE, homology of dimension {dimension} at degree {degree}, weight {weight}")
            }
        };
        let _ = writeln!(out, "resolution: {} generators, {status}", res.generators.len());
        let _ = writeln!(out, "  dim P/I by weight: {}", dims(&res.quotient_dims));
    }
    if let Some(b) = &r.brst {
        let status = match b.status {
            BrstStatus::Terminal => format!("terminal at order {}", b.order),
            BrstStatus::Open => format!("open at order {}", b.order),
            BrstStatus::Truncated { level } => format!("truncated at order {}, exact below ghost degree {level}", b.order),
            BrstStatus::WindowExhausted { level } => {
                format!("window exhausted at order {}, exact below ghost degree {level}", b.order)
            }
        };
        let _ = writeln!(out, "brst: {status}");
        let _ = writeln!(out, "  Q = {}", b.generator);
    }
    if let Some(c) = &r.cohomology {
        let mut totals: Vec<i32> = c.report.slices.iter().map(|s| s.total).collect();
        totals.dedup();
        for t in totals {
            let d: Vec<usize> = c.report.slices.iter().filter(|s| s.total == t).map(|s| s.dimension).collect();
            let _ = writeln!(out, "H^{t} by weight: {}", dims(&d));
        }
        if let Some(ng) = &c.report.no_ghost {
            let _ = writeln!(out, "no-ghost: {}", if ng.holds { "holds" } else { "FAILS" });
        }
    }
    if let Some(inv) = &r.invariants {
        let _ = writeln!(out, "invariants by weight: {}", dims(&inv.dims));
        if let Some(c) = &inv.comparison {
            let ok = c.iter().all(|row| row.equal);
            let _ = writeln!(out, "  H⁰ ≅ invariants: {}", if ok { "yes" } else { "NO" });
        }
    }
    if let Some(rh) = &r.rinehart {
        let _ = writeln!(out, "rinehart: d² = 0 {}, {} syzygies", if rh.squares_to_zero { "holds" } else { "FAILS" }, rh.syzygies);
        if let Some(e) = &rh.e1 {
            if e.identification_claimed {
                let _ = writeln!(out, "  E1 comparison: dimensions {}, d1 {}", e.dimensions_match, e.d1_matches);
            } else {
                let _ = writeln!(out, "  E1 comparison: not claimed for irregular constraints");
            }
        }
    }
    if let Some(rc) = &r.redundancy_check {
        let _ = writeln!(
            out,
            "redundancy: dropped {:?}, H⁰ {} vs {}",
            rc.dropped,
            dims(&rc.h0_full),
            dims(&rc.h0_reduced)
        );
    }
    for f in &r.falsifications {
        let _ = writeln!(out, "FALSIFIED {f}");
    }
    for e in &r.errors {
        let _ = writeln!(out, "error in {}: {}", e.task, e.message);
    }
    out
}
