//! Plain-text renderings behind `--pretty`.

use boxlogic::filter::ConsistencyReport;
use boxlogic::game::{Arena, PlayResult, Strategy};
use boxlogic::sequent::ProofTree;

pub fn pretty_report(report: &ConsistencyReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("theory          {}\n", report.theory_hash));
    out.push_str(&format!("variant         {}\n", report.variant));
    out.push_str(&format!("closure size    {}\n", report.closure_size));
    out.push_str(&format!("stabilized at   {}\n", report.stabilized_at));
    out.push_str(&format!(
        "checks          {} axiom instances, {} mp pairs, {} unbox pairs\n",
        report.axiom_instances_checked,
        report.modus_ponens_pairs_checked,
        report.unbox_pairs_checked
    ));
    out.push_str("\nentry stages (- = never):\n");
    for (formula, stage) in &report.entry_stages {
        match stage {
            Some(k) => out.push_str(&format!("  {k:>4}  {formula}\n")),
            None => out.push_str(&format!("     -  {formula}\n")),
        }
    }
    if report.violations.is_empty() {
        out.push_str("\nresult: PASS\n");
    } else {
        out.push_str("\nviolations:\n");
        for v in &report.violations {
            out.push_str(&format!("  {v:?}\n"));
        }
        out.push_str("\nresult: FAIL\n");
    }
    out
}

pub fn pretty_tree(tree: &ProofTree) -> String {
    let mut out = String::new();
    fn walk(node: &ProofTree, depth: usize, out: &mut String) {
        out.push_str(&format!(
            "{}{:?}@{}  {}\n",
            "  ".repeat(depth),
            node.rule,
            node.position,
            node.sequent
        ));
        for child in &node.children {
            walk(child, depth + 1, out);
        }
    }
    walk(tree, 0, &mut out);
    out
}

pub fn pretty_arena(arena: &Arena, strategy: &Strategy) -> String {
    let mut out = String::new();
    out.push_str(&format!("subject: {}\n", arena.subject));
    out.push_str("slot  side        formula  polarity  mover     move\n");
    for (i, slot) in arena.slots.iter().enumerate() {
        let term = strategy
            .terms
            .get(&i)
            .map(|t| format!("{t:?}"))
            .unwrap_or_else(|| "-".to_string());
        out.push_str(&format!(
            "{i:>4}  {:<10}  {:>7}  {:<8?}  {:<8?}  {term}\n",
            format!("{:?}", slot.side).to_lowercase(),
            slot.formula,
            slot.occurrence.polarity,
            slot.occurrence.mover,
        ));
    }
    out
}

pub fn pretty_play(arena: &Arena, result: &PlayResult) -> String {
    let mut out = String::new();
    out.push_str(&format!("subject:  {}\n", result.subject));
    out.push_str(&format!("boxed:    {}\n", result.boxed));
    out.push_str("moves:\n");
    for (i, value) in result.transcript.iter().enumerate() {
        out.push_str(&format!(
            "  slot {i:>3} ({:?}): {value}\n",
            arena.slots[i].occurrence.mover
        ));
    }
    match &result.certificate {
        Some(cert) => out.push_str(&format!("certificate: {} lines\n", cert.lines.len())),
        None => out.push_str("certificate: none\n"),
    }
    out
}
