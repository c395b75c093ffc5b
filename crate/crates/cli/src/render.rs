//! Plain-text reports. Every number printed here also appears in the JSON
//! payload, with the same rounding where values are rounded.

use std::io::{self, Write};

use dx_core::ionet::{ShockReport, TableReport};
use dx_core::spectral::fmt_complex;
use dx_core::Verdict;

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Summary line followed by the evidence table.
pub fn verdict(out: &mut dyn Write, v: &Verdict) -> io::Result<()> {
    let e = &v.evidence;
    writeln!(out, "{}", v.summary())?;
    writeln!(out)?;
    writeln!(out, "  n                    {}", e.n)?;
    writeln!(out, "  rank                 {}", e.rank)?;
    writeln!(out, "  nonzero eigenvalues  {}", e.nonzero_count)?;
    writeln!(out, "  zero multiplicity k  {}", e.zero_multiplicity_k)?;
    writeln!(out, "  nonzero distinct     {}", yes_no(e.nonzero_distinct))?;
    writeln!(out)?;
    writeln!(out, "  {:<32} {:>4} {:>4}", "eigenvalue", "AM", "GM")?;
    for c in &e.clusters {
        let gm = c.geometric_multiplicity.map_or_else(|| "-".to_string(), |g| g.to_string());
        let value = if c.is_zero {
            format!("{} (zero)", fmt_complex(c.value))
        } else {
            fmt_complex(c.value)
        };
        writeln!(out, "  {:<32} {:>4} {:>4}", value, c.algebraic_multiplicity, gm)?;
    }
    Ok(())
}

/// One diagnosability row, with the pruning trail when requested.
pub fn table(out: &mut dyn Write, r: &TableReport, pruned: bool) -> io::Result<()> {
    if pruned {
        write!(out, "dimension {} → {}", r.original_dimension, r.dimension)?;
        if r.pruned_sectors.is_empty() {
            writeln!(out)?;
        } else {
            writeln!(out, " (removed: {})", r.pruned_sectors.join(", "))?;
        }
    } else {
        writeln!(out, "dimension {}", r.dimension)?;
    }
    writeln!(out, "normalization {}", r.normalization)?;
    writeln!(out)?;
    writeln!(
        out,
        "  {:>9}  {:>4}  {:>19}  {:>8}  {:>15}",
        "dimension", "rank", "nonzero eigenvalues", "distinct", "spectral radius"
    )?;
    writeln!(
        out,
        "  {:>9}  {:>4}  {:>19}  {:>8}  {:>15.6}",
        r.dimension,
        r.rank,
        r.nonzero_eig_count,
        yes_no(r.nonzero_distinct),
        r.spectral_radius
    )?;
    writeln!(out)?;
    verdict(out, &r.verdict)
}

/// Decay table by step, then the modal summary when one exists.
pub fn simulation(out: &mut dyn Write, r: &ShockReport) -> io::Result<()> {
    writeln!(out, "spectral radius {:.6}", r.spectral_radius)?;
    writeln!(out)?;
    let width = r.sector_names.iter().map(String::len).max().unwrap_or(0).max(13);
    write!(out, "{:>5}", "step")?;
    for name in &r.sector_names {
        write!(out, "  {name:>width$}")?;
    }
    writeln!(out)?;
    for (t, x) in r.trajectory.iter().enumerate() {
        write!(out, "{t:>5}")?;
        for v in x {
            write!(out, "  {v:>width$.6e}")?;
        }
        writeln!(out)?;
    }

    let Some(modes) = &r.modes else {
        writeln!(out)?;
        writeln!(out, "direct iteration only; no modal decomposition")?;
        return Ok(());
    };
    writeln!(out)?;
    writeln!(
        out,
        "  {:>5}  {:<30}  {:>9}  {:<30}  {:>10}",
        "mode", "eigenvalue", "modulus", "coefficient", "half-life"
    )?;
    for (k, m) in modes.iter().enumerate() {
        let half = m.half_life.map_or_else(|| "none".to_string(), |h| format!("{h:.4}"));
        writeln!(
            out,
            "  {:>5}  {:<30}  {:>9.6}  {:<30}  {:>10}",
            k + 1,
            fmt_complex(m.eigenvalue),
            m.modulus,
            fmt_complex(m.coefficient),
            half
        )?;
    }
    if let Some(e) = r.modal_relative_error {
        writeln!(out)?;
        writeln!(out, "modal reconstruction error {e:.3e} (relative to the largest state)")?;
    }
    Ok(())
}
