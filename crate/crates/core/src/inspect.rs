//! Text reports over an export.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ids::BranchId;
use crate::projection::{BranchEntry, PhyloExport};

fn branch_line(b: &BranchEntry) -> String {
    format!(
        "{}  {}  periods {}-{}  elevation {:.3}  groups {}",
        b.id,
        b.label.join(" "),
        b.span[0],
        b.span[1],
        b.elevation,
        b.groups.len()
    )
}

/// One line per branch, in drift order.
pub fn summary(export: &PhyloExport) -> String {
    let m = &export.metadata;
    let mut out = format!(
        "λ {}  {} branches  {} groups  {} links  {} ghost links  {} removed branches\n",
        m.lambda,
        m.counts.branches,
        m.counts.groups,
        m.counts.links,
        m.counts.ghost_links,
        m.removed_branches.len()
    );
    for w in &m.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    for b in &export.branches {
        out.push_str(&branch_line(b));
        out.push('\n');
    }
    out
}

pub fn branch_report(export: &PhyloExport, id: &BranchId) -> Result<String> {
    let b = export
        .branches
        .iter()
        .find(|b| &b.id == id)
        .ok_or_else(|| Error::Query(format!("unknown branch id {id}")))?;
    let mut out = branch_line(b);
    out.push('\n');
    let _ = writeln!(out, "peak x {:.3} y {:.3}", b.peak.x, b.peak.y);
    let ghosts = export
        .ghost_links
        .iter()
        .filter(|g| b.groups.contains(&g.parent) || b.groups.contains(&g.child))
        .count();
    let _ = writeln!(out, "ghost links {ghosts}");
    Ok(out)
}

/// Lineage of a term given by canonical label (case-insensitive).
pub fn term_report(export: &PhyloExport, label: &str) -> Result<String> {
    let wanted = label.trim().to_lowercase();
    let t = export
        .terms
        .iter()
        .find(|t| t.label.to_lowercase() == wanted)
        .ok_or_else(|| Error::Query(format!("term not found: {label}")))?;
    let mut out = format!(
        "{}  periods {}-{}  last-period frequency {}  cross_branch={}\n",
        t.label, t.first_period, t.last_period, t.freq_last, t.cross_branch
    );
    for id in &t.branches {
        if let Some(b) = export.branches.iter().find(|b| &b.id == id) {
            let _ = writeln!(out, "branch {}", branch_line(b));
        }
    }
    for g in export
        .groups
        .iter()
        .filter(|g| g.terms.iter().any(|x| x.id == t.term))
    {
        let flags = g.terms.iter().find(|x| x.id == t.term).expect("filtered");
        let _ = writeln!(
            out,
            "  group {} period {} branch {}{}{}",
            g.id,
            g.period,
            g.branch,
            if flags.emerging { " emerging" } else { "" },
            if flags.decreasing { " decreasing" } else { "" },
        );
    }
    Ok(out)
}

/// Branch id or term label.
pub fn inspect(export: &PhyloExport, query: &str) -> Result<String> {
    if let Ok(id) = query.parse::<BranchId>() {
        if export.branches.iter().any(|b| b.id == id)
            || export.terms.iter().all(|t| t.label != query)
        {
            return branch_report(export, &id);
        }
    }
    term_report(export, query)
}
