//! Sorted Steklov spectra whose entries remember which fiber eigenvalue,
//! cross-section mode and base branch produced them.

use std::fmt::Write as _;

/// Values closer than this (relative) are merged into one entry.
pub const MERGE_RTOL: f64 = 1e-7;
const MERGE_ATOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    /// The computed eigenvalue of this branch (before merging).
    pub value: f64,
    pub lambda_fiber: f64,
    pub fiber_multiplicity: usize,
    pub mu_mode: f64,
    pub cross_section_multiplicity: usize,
    /// Index of the eigenvalue within its 1D problem (0 or 1).
    pub branch: usize,
}

impl Source {
    pub fn multiplicity(&self) -> usize {
        self.fiber_multiplicity * self.cross_section_multiplicity
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: usize,
    pub sources: Vec<Source>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectrumWithProvenance {
    entries: Vec<SpectrumEntry>,
}

pub(crate) fn close(a: f64, b: f64) -> bool {
    let d = (a - b).abs();
    d <= MERGE_ATOL || d <= MERGE_RTOL * a.abs().max(b.abs())
}

impl SpectrumWithProvenance {
    /// Sorts by value, then λ, then μ, then branch, and merges values within
    /// the merge tolerance.
    pub fn from_sources(mut sources: Vec<Source>) -> Self {
        sources.sort_by(|a, b| {
            a.value
                .total_cmp(&b.value)
                .then(a.lambda_fiber.total_cmp(&b.lambda_fiber))
                .then(a.mu_mode.total_cmp(&b.mu_mode))
                .then(a.branch.cmp(&b.branch))
        });
        let mut entries: Vec<SpectrumEntry> = Vec::new();
        for s in sources {
            match entries.last_mut() {
                Some(e) if close(e.value, s.value) => {
                    e.multiplicity += s.multiplicity();
                    e.sources.push(s);
                }
                _ => entries.push(SpectrumEntry {
                    value: s.value,
                    multiplicity: s.multiplicity(),
                    sources: vec![s],
                }),
            }
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of eigenvalues counted with multiplicity.
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Eigenvalues repeated according to multiplicity, ascending.
    pub fn values(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity))
            .collect()
    }

    pub fn smallest(&self) -> Option<f64> {
        self.entries.first().map(|e| e.value)
    }

    pub fn count_at_most(&self, top: f64) -> usize {
        self.entries
            .iter()
            .filter(|e| e.value <= top)
            .map(|e| e.multiplicity)
            .sum()
    }

    pub fn sources(&self) -> impl Iterator<Item = &Source> {
        self.entries.iter().flat_map(|e| e.sources.iter())
    }

    /// CSV with header `value,multiplicity,lambda_fiber,mu_mode,branch`, one
    /// row per source.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,multiplicity,lambda_fiber,mu_mode,branch\n");
        for s in self.sources() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_float(s.value),
                s.multiplicity(),
                fmt_float(s.lambda_fiber),
                fmt_float(s.mu_mode),
                s.branch
            );
        }
        out
    }
}

/// Twelve significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0"
        return format!("{:.11e}", 0.0);
    }
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn src(value: f64, lambda: f64, fm: usize, mu: f64, cm: usize, branch: usize) -> Source {
        Source {
            value,
            lambda_fiber: lambda,
            fiber_multiplicity: fm,
            mu_mode: mu,
            cross_section_multiplicity: cm,
            branch,
        }
    }

    #[test]
    fn merges_and_counts() {
        let s = SpectrumWithProvenance::from_sources(vec![
            src(1.0 + 1e-9, 1.0, 2, 0.0, 1, 0),
            src(0.0, 0.0, 1, 0.0, 1, 0),
            src(1.0, 0.0, 1, 1.0, 2, 0),
            src(2.0, 0.0, 1, 0.0, 1, 1),
        ]);
        assert_eq!(s.entries().len(), 3);
        assert_eq!(s.entries()[1].multiplicity, 4);
        assert_eq!(s.entries()[1].sources.len(), 2);
        assert_eq!(s.total_multiplicity(), 6);
        assert_eq!(s.count_at_most(1.5), 5);
        assert_eq!(s.values().len(), 6);
        // sorted by value, then λ
        assert_eq!(s.entries()[1].sources[0].lambda_fiber, 0.0);
    }

    #[test]
    fn csv_layout() {
        let s = SpectrumWithProvenance::from_sources(vec![src(0.5, 1.0, 2, 0.0, 1, 0)]);
        let csv = s.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("value,multiplicity,lambda_fiber,mu_mode,branch"));
        assert_eq!(
            lines.next(),
            Some("5.00000000000e-1,2,1.00000000000e0,0.00000000000e0,0")
        );
        assert_eq!(fmt_float(-0.0), "0.00000000000e0");
        assert_eq!(fmt_float(0.7615941559557649), "7.61594155956e-1");
    }
}
