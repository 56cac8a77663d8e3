//! Experimental orders of convergence and table output.

use std::io::Write;

use super::driver::ErrorRecord;

/// `log2(coarse / fine)` for one halving of `h` and `tau`.
pub fn eoc(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Fills the EOC column from consecutive records; the first stays blank
/// unless already set.
pub fn fill_eoc(records: &mut [ErrorRecord]) {
    for k in 1..records.len() {
        records[k].eoc = Some(eoc(records[k - 1].error, records[k].error));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EocTable {
    pub records: Vec<ErrorRecord>,
}

impl EocTable {
    pub fn new(records: Vec<ErrorRecord>) -> Self {
        EocTable { records }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "case,scheme,I,N,courant_max,error,eoc")?;
        for r in &self.records {
            let eoc = r.eoc.map(|e| format!("{e:.4}")).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{:.4},{:.8e},{}",
                r.case, r.scheme, r.nodes, r.steps, r.courant_max, r.error, eoc
            )?;
        }
        Ok(())
    }

    /// Markdown table with one row per level.
    pub fn to_markdown(&self) -> String {
        let mut s = String::from(
            "| case | scheme | I | N | C | E | EOC |\n|---|---|---:|---:|---:|---:|---:|\n",
        );
        for r in &self.records {
            let eoc = r.eoc.map(|e| format!("{e:.2}")).unwrap_or_default();
            s.push_str(&format!(
                "| {} | {} | {} | {} | {:.1} | {:.6} | {} |\n",
                r.case, r.scheme, r.nodes, r.steps, r.courant_max, r.error, eoc
            ));
        }
        s
    }
}

pub fn eoc_table(records: Vec<ErrorRecord>) -> EocTable {
    EocTable::new(records)
}
