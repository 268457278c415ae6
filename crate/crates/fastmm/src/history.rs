//! The embedded record of published MM exponents: the unrestricted-size
//! sequence, its 1986-2014 high-precision tail, and the sequence for sizes
//! capped at one million.

/// Which of the three published tables a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistoryTable {
    /// Exponents for unrestricted n.
    Unrestricted,
    /// The 1986-2014 refinements, quoted to seven decimals.
    UnrestrictedModern,
    /// Exponents for n capped at 1,000,000.
    Capped1e6,
}

impl HistoryTable {
    pub fn id(&self) -> &'static str {
        match self {
            HistoryTable::Unrestricted => "1",
            HistoryTable::UnrestrictedModern => "1a",
            HistoryTable::Capped1e6 => "2",
        }
    }
}

/// One published exponent with its citation key(s) and year.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentHistoryRow {
    pub table: HistoryTable,
    pub exponent: &'static str,
    pub citation: &'static str,
    pub year: u32,
}

/// The dataset, transcribed verbatim; exponents kept as strings so the CSV
/// reproduces the published digits exactly.
pub fn history_rows() -> Vec<ExponentHistoryRow> {
    use HistoryTable::*;
    let row = |table, exponent, citation, year| ExponentHistoryRow {
        table,
        exponent,
        citation,
        year,
    };
    vec![
        row(Unrestricted, "2.8074", "S69", 1969),
        row(Unrestricted, "2.7962", "P78", 1978),
        row(Unrestricted, "2.7801", "P80", 1979),
        row(Unrestricted, "2.7799", "BCLR79;B80", 1979),
        row(Unrestricted, "2.548", "S81", 1979),
        row(Unrestricted, "2.522", "P81", 1979),
        row(Unrestricted, "2.517", "R82", 1980),
        row(Unrestricted, "2.496", "CW82", 1981),
        row(Unrestricted, "2.479", "S86", 1986),
        row(Unrestricted, "2.376", "CW90", 1986),
        row(Unrestricted, "2.374", "S10;DS13", 2010),
        row(Unrestricted, "2.373", "VW14;LG14", 2012),
        row(UnrestrictedModern, "2.3754770", "CW90", 1986),
        row(UnrestrictedModern, "2.3736898", "S10;DS13", 2010),
        row(UnrestrictedModern, "2.3729269", "VW14", 2012),
        row(UnrestrictedModern, "2.3728639", "LG14", 2014),
        row(Capped1e6, "2.8074", "S69", 1969),
        row(Capped1e6, "2.7962", "P78", 1978),
        row(Capped1e6, "2.7801", "P80", 1979),
        row(Capped1e6, "2.7762", "P81", 1981),
        row(Capped1e6, "2.7734", "P82", 1982),
    ]
}

/// The dataset as CSV with the stable header
/// `table,exponent,citation,year`, suitable for replotting the two
/// exponent-timeline figures.
pub fn history_csv() -> String {
    let mut out = String::from("table,exponent,citation,year\n");
    for r in history_rows() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.table.id(),
            r.exponent,
            r.citation,
            r.year
        ));
    }
    out
}
