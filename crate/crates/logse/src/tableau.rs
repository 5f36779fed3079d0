//! Double Butcher tableaus for implicit-explicit (IMEX) Runge-Kutta pairs.
//!
//! A pair (A^I, b^I, c^I) / (A^E, b^E, c^E) shares one stage count s. The
//! implicit part is diagonally implicit (A^I lower triangular including the
//! diagonal), the explicit part strictly lower triangular, so the stages can
//! be computed in order with one linear solve each.
//!
//! Coefficients live in plain-text data files (see `data/tableaux/`) as exact
//! rational `p/q` or decimal strings; four pairs ship built in:
//!
//! | name    | stages (slots) | order | scheme                                  |
//! |---------|----------------|-------|------------------------------------------|
//! | RK(1,2) | 2              | 2     | implicit-explicit midpoint (ARS type)    |
//! | RK(2,3) | 3              | 3     | two-stage third-order SDIRK pair (ARS)   |
//! | RK(6,4) | 6              | 4     | ARK4(3)6L[2]SA                           |
//! | RK(8,5) | 8              | 5     | ARK5(4)8L[2]SA                           |
//!
//! The RK(s,p) labels count implicit stages as is conventional for ARS-type
//! pairs whose first slot is trivial.
//!
//! [`DoubleButcherTableau::validate`] checks row sums and the per-part order
//! conditions through min(p, 4) at tolerance 1e-12 (these are enforced when
//! loading) and reports the mixed implicit/explicit coupling conditions
//! informationally.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

/// Tolerance for every numeric order-condition and row-sum check.
pub const CONDITION_TOL: f64 = 1e-12;

const BUILTINS: [(&str, &str); 4] = [
    ("RK(1,2)", include_str!("../data/tableaux/rk12.tab")),
    ("RK(2,3)", include_str!("../data/tableaux/rk23.tab")),
    ("RK(6,4)", include_str!("../data/tableaux/rk64.tab")),
    ("RK(8,5)", include_str!("../data/tableaux/rk85.tab")),
];

const ALIASES: [(&str, &str); 2] = [("ARK4(3)6L[2]SA", "RK(6,4)"), ("ARK5(4)8L[2]SA", "RK(8,5)")];

#[derive(Debug, Error)]
pub enum TableauError {
    #[error("tableau parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("tableau '{name}' failed validation: {}", failures.join("; "))]
    Validation { name: String, failures: Vec<String> },
    #[error("'{0}' is neither a built-in tableau ({1}) nor a readable file")]
    Unknown(String, String),
    #[error("cannot read tableau file '{path}': {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableauPart {
    Implicit,
    Explicit,
    Coupled,
    Structure,
}

impl fmt::Display for TableauPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TableauPart::Implicit => "implicit",
            TableauPart::Explicit => "explicit",
            TableauPart::Coupled => "coupled",
            TableauPart::Structure => "structure",
        };
        f.write_str(s)
    }
}

/// One checked condition; `enforced` ones gate loading, the rest (mixed
/// coupling conditions) are informational.
#[derive(Debug, Clone)]
pub struct ConditionCheck {
    pub label: String,
    pub part: TableauPart,
    pub residual: f64,
    pub enforced: bool,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub name: String,
    pub order: u32,
    pub checks: Vec<ConditionCheck>,
}

impl ValidationReport {
    pub fn enforced_ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.enforced)
    }

    pub fn enforced_failures(&self) -> Vec<&ConditionCheck> {
        self.checks
            .iter()
            .filter(|c| c.enforced && !c.passed)
            .collect()
    }

    pub fn warnings(&self) -> Vec<&ConditionCheck> {
        self.checks
            .iter()
            .filter(|c| !c.enforced && !c.passed)
            .collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "tableau {} (declared order {}), tolerance {:.0e}:",
            self.name, self.order, CONDITION_TOL
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {:9} {:40} residual {:.3e}{}",
                if c.passed { "ok" } else { "XX" },
                c.part.to_string(),
                c.label,
                c.residual,
                if c.enforced { "" } else { "  (informational)" }
            )?;
        }
        let warn = self.warnings().len();
        if warn > 0 {
            writeln!(f, "  {warn} informational coupling condition(s) not met")?;
        }
        write!(
            f,
            "  enforced checks: {}",
            if self.enforced_ok() {
                "all passed"
            } else {
                "FAILED"
            }
        )
    }
}

/// Position-tracking reader over the comment-stripped, non-blank lines of a
/// tableau file.
struct Cursor<'a> {
    lines: &'a [(usize, &'a str)],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&(usize, &'a str)> {
        self.lines.get(self.pos)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.lines.len()
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), TableauError> {
        let entry = self.lines.get(self.pos).copied();
        self.pos += 1;
        entry.ok_or_else(|| TableauError::Parse {
            line: self.lines.last().map_or(0, |&(l, _)| l),
            msg: format!("unexpected end of input, expected {what}"),
        })
    }

    /// Consume a `keyword [inline value]` line and return the remainder.
    fn keyword(&mut self, kw: &str) -> Result<(usize, &'a str), TableauError> {
        let (line, text) = self.next(kw)?;
        match text.split_once(char::is_whitespace) {
            Some((head, rest)) if head == kw => Ok((line, rest.trim())),
            _ if text == kw => Ok((line, "")),
            _ => Err(TableauError::Parse {
                line,
                msg: format!("expected '{kw}', found '{text}'"),
            }),
        }
    }

    fn row(&mut self, len: usize) -> Result<Vec<f64>, TableauError> {
        let (line, text) = self.next("coefficient row")?;
        let vals: Vec<f64> = text
            .split_whitespace()
            .map(|t| parse_number(t, line))
            .collect::<Result<_, _>>()?;
        if vals.len() != len {
            return Err(TableauError::Parse {
                line,
                msg: format!("expected {len} entries, found {}", vals.len()),
            });
        }
        Ok(vals)
    }

    fn matrix(&mut self, label: &str, n: usize) -> Result<Vec<Vec<f64>>, TableauError> {
        self.keyword(label)?;
        (0..n).map(|_| self.row(n)).collect()
    }
}

/// Accept exact rationals `p/q` alongside ordinary decimal literals.
fn parse_number(tok: &str, line: usize) -> Result<f64, TableauError> {
    let bad = |msg: String| TableauError::Parse { line, msg };
    if let Some((p, q)) = tok.split_once('/') {
        let p: f64 = p
            .parse()
            .map_err(|_| bad(format!("bad rational numerator '{tok}'")))?;
        let q: f64 = q
            .parse()
            .map_err(|_| bad(format!("bad rational denominator '{tok}'")))?;
        if q == 0.0 {
            return Err(bad(format!("zero denominator in '{tok}'")));
        }
        Ok(p / q)
    } else {
        tok.parse().map_err(|_| bad(format!("bad number '{tok}'")))
    }
}

/// IMEX pair sharing one stage index set.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleButcherTableau {
    name: String,
    stages: usize,
    order: u32,
    a_impl: Vec<Vec<f64>>,
    a_expl: Vec<Vec<f64>>,
    b_impl: Vec<f64>,
    b_expl: Vec<f64>,
    c_impl: Vec<f64>,
    c_expl: Vec<f64>,
}

impl DoubleButcherTableau {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn a_impl(&self) -> &[Vec<f64>] {
        &self.a_impl
    }

    pub fn a_expl(&self) -> &[Vec<f64>] {
        &self.a_expl
    }

    pub fn b_impl(&self) -> &[f64] {
        &self.b_impl
    }

    pub fn b_expl(&self) -> &[f64] {
        &self.b_expl
    }

    pub fn c_impl(&self) -> &[f64] {
        &self.c_impl
    }

    pub fn c_expl(&self) -> &[f64] {
        &self.c_expl
    }

    pub fn builtin_names() -> Vec<&'static str> {
        BUILTINS.iter().map(|(n, _)| *n).collect()
    }

    /// Parse the plain-text format. Syntax and dimensions only; run
    /// [`validate`](Self::validate) (or use [`load`](Self::load)) for the
    /// numeric checks.
    pub fn parse(text: &str) -> Result<Self, TableauError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let mut cursor = Cursor {
            lines: &lines,
            pos: 0,
        };

        let (_, name) = cursor.keyword("name")?;
        if name.is_empty() {
            return Err(TableauError::Parse {
                line: 0,
                msg: "empty tableau name".into(),
            });
        }
        let name = name.to_string();
        let (line, s_str) = cursor.keyword("stages")?;
        let stages: usize = s_str.parse().map_err(|_| TableauError::Parse {
            line,
            msg: format!("bad stage count '{s_str}'"),
        })?;
        if stages == 0 || stages > 64 {
            return Err(TableauError::Parse {
                line,
                msg: format!("unreasonable stage count {stages}"),
            });
        }
        let (line, p_str) = cursor.keyword("order")?;
        let order: u32 = p_str.parse().map_err(|_| TableauError::Parse {
            line,
            msg: format!("bad order '{p_str}'"),
        })?;

        let a_impl = cursor.matrix("A_I", stages)?;
        cursor.keyword("b_I")?;
        let b_impl = cursor.row(stages)?;
        let a_expl = cursor.matrix("A_E", stages)?;
        cursor.keyword("b_E")?;
        let b_expl = cursor.row(stages)?;

        // optional c rows; default to row sums
        let row_sums = |a: &[Vec<f64>]| -> Vec<f64> { a.iter().map(|r| r.iter().sum()).collect() };
        let mut c_impl = None;
        let mut c_expl = None;
        if !cursor.at_end() {
            cursor.keyword("c_I")?;
            c_impl = Some(cursor.row(stages)?);
            if !cursor.at_end() {
                cursor.keyword("c_E")?;
                c_expl = Some(cursor.row(stages)?);
            }
        }
        if let Some(&(line, text)) = cursor.peek() {
            return Err(TableauError::Parse {
                line,
                msg: format!("trailing content '{text}'"),
            });
        }
        let c_impl = c_impl.unwrap_or_else(|| row_sums(&a_impl));
        let c_expl = c_expl.unwrap_or_else(|| row_sums(&a_expl));

        Ok(Self {
            name,
            stages,
            order,
            a_impl,
            a_expl,
            b_impl,
            b_expl,
            c_impl,
            c_expl,
        })
    }

    /// Load by built-in registry name (case-insensitive, spaces ignored) or
    /// from a file path; rejects tableaus failing any enforced check.
    pub fn load(name_or_path: &str) -> Result<Arc<Self>, TableauError> {
        let text = match Self::builtin_text(name_or_path) {
            Some(text) => text.to_string(),
            None => {
                let path = Path::new(name_or_path);
                if path.is_file() {
                    std::fs::read_to_string(path).map_err(|source| TableauError::Io {
                        path: name_or_path.to_string(),
                        source,
                    })?
                } else {
                    return Err(TableauError::Unknown(
                        name_or_path.to_string(),
                        Self::builtin_names().join(", "),
                    ));
                }
            }
        };
        let t = Self::parse(&text)?;
        let report = t.validate();
        if !report.enforced_ok() {
            return Err(TableauError::Validation {
                name: t.name.clone(),
                failures: report
                    .enforced_failures()
                    .iter()
                    .map(|c| format!("{} ({}, residual {:.3e})", c.label, c.part, c.residual))
                    .collect(),
            });
        }
        Ok(Arc::new(t))
    }

    fn builtin_text(name: &str) -> Option<&'static str> {
        let norm = |s: &str| s.replace(char::is_whitespace, "").to_ascii_uppercase();
        let wanted = norm(name);
        let canonical = ALIASES
            .iter()
            .find(|(a, _)| norm(a) == wanted)
            .map(|(_, c)| norm(c))
            .unwrap_or(wanted);
        BUILTINS
            .iter()
            .find(|(n, _)| norm(n) == canonical)
            .map(|(_, t)| *t)
    }

    /// Full structural/row-sum/order-condition report; never fails, callers
    /// decide what to do with it.
    pub fn validate(&self) -> ValidationReport {
        let s = self.stages;
        let mut checks = Vec::new();

        // structural: DIRK implicit part, strictly lower triangular explicit
        // part -- exact zeros, not tolerance zeros
        let impl_upper_ok = (0..s).all(|i| (i + 1..s).all(|j| self.a_impl[i][j] == 0.0));
        checks.push(ConditionCheck {
            label: "A_I lower triangular (exact zeros)".into(),
            part: TableauPart::Structure,
            residual: if impl_upper_ok { 0.0 } else { f64::NAN },
            enforced: true,
            passed: impl_upper_ok,
        });
        let expl_strict_ok = (0..s).all(|i| (i..s).all(|j| self.a_expl[i][j] == 0.0));
        checks.push(ConditionCheck {
            label: "A_E strictly lower triangular (exact zeros)".into(),
            part: TableauPart::Structure,
            residual: if expl_strict_ok { 0.0 } else { f64::NAN },
            enforced: true,
            passed: expl_strict_ok,
        });

        let mut push = |label: String, part: TableauPart, residual: f64, enforced: bool| {
            checks.push(ConditionCheck {
                label,
                part,
                residual,
                enforced,
                passed: residual.abs() <= CONDITION_TOL,
            });
        };

        let parts = [
            (
                TableauPart::Implicit,
                &self.a_impl,
                &self.b_impl,
                &self.c_impl,
                "I",
            ),
            (
                TableauPart::Explicit,
                &self.a_expl,
                &self.b_expl,
                &self.c_expl,
                "E",
            ),
        ];

        for (part, a, b, c, tag) in parts {
            let dot = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).map(|(p, q)| p * q).sum() };
            let matvec = |v: &[f64]| -> Vec<f64> { a.iter().map(|row| dot(row, v)).collect() };

            // row sums define c
            let worst_row = (0..s)
                .map(|i| (c[i] - a[i].iter().sum::<f64>()).abs())
                .fold(0.0, f64::max);
            push(
                format!("c_{tag} matches row sums of A_{tag}"),
                part,
                worst_row,
                true,
            );
            push(
                format!("sum(b_{tag}) = 1"),
                part,
                b.iter().sum::<f64>() - 1.0,
                true,
            );
            if self.order >= 2 {
                push(
                    format!("b_{tag}·c_{tag} = 1/2"),
                    part,
                    dot(b, c) - 0.5,
                    true,
                );
            }
            if self.order >= 3 {
                let c2: Vec<f64> = c.iter().map(|x| x * x).collect();
                push(
                    format!("b_{tag}·c_{tag}² = 1/3"),
                    part,
                    dot(b, &c2) - 1.0 / 3.0,
                    true,
                );
                push(
                    format!("b_{tag}·(A_{tag} c_{tag}) = 1/6"),
                    part,
                    dot(b, &matvec(c)) - 1.0 / 6.0,
                    true,
                );
            }
            if self.order >= 4 {
                let c2: Vec<f64> = c.iter().map(|x| x * x).collect();
                let c3: Vec<f64> = c.iter().map(|x| x * x * x).collect();
                let ac = matvec(c);
                let cac: Vec<f64> = c.iter().zip(&ac).map(|(x, y)| x * y).collect();
                push(
                    format!("b_{tag}·c_{tag}³ = 1/4"),
                    part,
                    dot(b, &c3) - 0.25,
                    true,
                );
                push(
                    format!("b_{tag}·(c_{tag}∘A_{tag}c_{tag}) = 1/8"),
                    part,
                    dot(b, &cac) - 0.125,
                    true,
                );
                push(
                    format!("b_{tag}·(A_{tag} c_{tag}²) = 1/12"),
                    part,
                    dot(b, &matvec(&c2)) - 1.0 / 12.0,
                    true,
                );
                push(
                    format!("b_{tag}·(A_{tag}² c_{tag}) = 1/24"),
                    part,
                    dot(b, &matvec(&ac)) - 1.0 / 24.0,
                    true,
                );
            }
        }

        // mixed coupling conditions: informational only. A pair can converge
        // at its declared order for split problems without satisfying every
        // one, so they never block loading.
        let dot = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).map(|(p, q)| p * q).sum() };
        let mv =
            |a: &[Vec<f64>], v: &[f64]| -> Vec<f64> { a.iter().map(|row| dot(row, v)).collect() };
        if self.order >= 2 {
            push(
                "b_I·c_E = 1/2".into(),
                TableauPart::Coupled,
                dot(&self.b_impl, &self.c_expl) - 0.5,
                false,
            );
            push(
                "b_E·c_I = 1/2".into(),
                TableauPart::Coupled,
                dot(&self.b_expl, &self.c_impl) - 0.5,
                false,
            );
        }
        if self.order >= 3 {
            let cc: Vec<f64> = self
                .c_impl
                .iter()
                .zip(&self.c_expl)
                .map(|(x, y)| x * y)
                .collect();
            push(
                "b_I·(c_I∘c_E) = 1/3".into(),
                TableauPart::Coupled,
                dot(&self.b_impl, &cc) - 1.0 / 3.0,
                false,
            );
            push(
                "b_E·(c_I∘c_E) = 1/3".into(),
                TableauPart::Coupled,
                dot(&self.b_expl, &cc) - 1.0 / 3.0,
                false,
            );
            type Combo<'a> = (&'a str, &'a [f64], &'a [Vec<f64>], &'a [f64]);
            let combos: [Combo; 6] = [
                ("b_I·(A_I c_E)", &self.b_impl, &self.a_impl, &self.c_expl),
                ("b_I·(A_E c_I)", &self.b_impl, &self.a_expl, &self.c_impl),
                ("b_I·(A_E c_E)", &self.b_impl, &self.a_expl, &self.c_expl),
                ("b_E·(A_I c_I)", &self.b_expl, &self.a_impl, &self.c_impl),
                ("b_E·(A_I c_E)", &self.b_expl, &self.a_impl, &self.c_expl),
                ("b_E·(A_E c_I)", &self.b_expl, &self.a_expl, &self.c_impl),
            ];
            for (label, b, a, c) in combos {
                push(
                    format!("{label} = 1/6"),
                    TableauPart::Coupled,
                    dot(b, &mv(a, c)) - 1.0 / 6.0,
                    false,
                );
            }
        }

        ValidationReport {
            name: self.name.clone(),
            order: self.order,
            checks,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load_with_expected_shapes() {
        for (name, stages, order, first_implicit_diag) in [
            ("RK(1,2)", 2, 2, 0.0),
            ("RK(2,3)", 3, 3, 0.0),
            ("RK(6,4)", 6, 4, 0.0),
            ("RK(8,5)", 8, 5, 0.0),
        ] {
            let t = DoubleButcherTableau::load(name).unwrap();
            assert_eq!(t.name(), name);
            assert_eq!(t.stages(), stages);
            assert_eq!(t.order(), order);
            assert_eq!(
                t.a_impl()[0][0],
                first_implicit_diag,
                "{name} starts explicit"
            );
        }
        // ESDIRK diagonals
        let t = DoubleButcherTableau::load("RK(6,4)").unwrap();
        for i in 1..6 {
            assert_eq!(t.a_impl()[i][i], 0.25);
        }
        let t = DoubleButcherTableau::load("RK(8,5)").unwrap();
        for i in 1..8 {
            assert_eq!(t.a_impl()[i][i], 41.0 / 200.0);
        }
    }

    #[test]
    fn builtin_lookup_is_forgiving_and_aliased() {
        assert!(DoubleButcherTableau::load("rk(2,3)").is_ok());
        assert!(DoubleButcherTableau::load("RK (2, 3)").is_ok());
        let t = DoubleButcherTableau::load("ARK4(3)6L[2]SA").unwrap();
        assert_eq!(t.name(), "RK(6,4)");
        assert!(matches!(
            DoubleButcherTableau::load("RK(9,9)"),
            Err(TableauError::Unknown(..))
        ));
    }

    #[test]
    fn builtins_pass_per_part_conditions_through_min_p_4() {
        for name in DoubleButcherTableau::builtin_names() {
            let t = DoubleButcherTableau::load(name).unwrap();
            let report = t.validate();
            assert!(report.enforced_ok(), "{name}:\n{report}");
            for c in &report.checks {
                if c.enforced {
                    assert!(
                        c.residual.abs() <= CONDITION_TOL,
                        "{name}: {} residual {:.3e}",
                        c.label,
                        c.residual
                    );
                }
            }
        }
    }

    #[test]
    fn builtin_coupling_conditions_also_hold() {
        // the shipped pairs were constructed as genuinely additive schemes,
        // so even the informational mixed conditions pass
        for name in DoubleButcherTableau::builtin_names() {
            let t = DoubleButcherTableau::load(name).unwrap();
            assert!(
                t.validate().warnings().is_empty(),
                "{name} has coupling warnings"
            );
        }
    }

    #[test]
    fn stiffly_accurate_implicit_parts() {
        for name in ["RK(6,4)", "RK(8,5)"] {
            let t = DoubleButcherTableau::load(name).unwrap();
            let last = t.stages() - 1;
            assert_eq!(t.a_impl()[last], t.b_impl(), "{name} b_I = last row");
        }
    }

    #[test]
    fn parse_rejects_malformed_input() {
        let bad_number = "name X\nstages 1\norder 1\nA_I\n0.1.2\nb_I\n1\nA_E\n0\nb_E\n1\n";
        assert!(matches!(
            DoubleButcherTableau::parse(bad_number),
            Err(TableauError::Parse { .. })
        ));
        let wrong_dim =
            "name X\nstages 2\norder 1\nA_I\n0 0\n0 0 0\nb_I\n1 0\nA_E\n0 0\n0 0\nb_E\n1 0\n";
        let err = DoubleButcherTableau::parse(wrong_dim).unwrap_err();
        assert!(err.to_string().contains("expected 2 entries"), "{err}");
        let missing = "name X\nstages 2\norder 1\nA_I\n0 0\n0 0\n";
        assert!(DoubleButcherTableau::parse(missing).is_err());
        let zero_den = "name X\nstages 1\norder 1\nA_I\n1/0\nb_I\n1\nA_E\n0\nb_E\n1\n";
        assert!(DoubleButcherTableau::parse(zero_den).is_err());
    }

    #[test]
    fn parse_accepts_comments_and_rationals() {
        let text = "# header\nname T\nstages 2 # two slots\norder 1\nA_I\n0 0\n1/4 1/4\nb_I\n0.5 0.5\nA_E\n0 0\n1/2 0\nb_E\n1/2 1/2\n";
        let t = DoubleButcherTableau::parse(text).unwrap();
        assert_eq!(t.a_impl()[1][0], 0.25);
        assert_eq!(t.c_impl(), &[0.0, 0.5]); // row sums when c omitted
        assert_eq!(t.c_expl(), &[0.0, 0.5]);
    }

    #[test]
    fn validation_catches_bad_weights() {
        // Σ b_I = 1.1
        let text = "name Bad\nstages 1\norder 1\nA_I\n1/2\nb_I\n1.1\nA_E\n0\nb_E\n1\n";
        let t = DoubleButcherTableau::parse(text).unwrap();
        let report = t.validate();
        assert!(!report.enforced_ok());
        let failed = report.enforced_failures();
        assert!(
            failed.iter().any(|c| c.label.contains("sum(b_I)")),
            "{report}"
        );
        // load() refuses it and names the condition
        let dir = std::env::temp_dir().join("logse_tableau_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad_weights.tab");
        std::fs::write(&path, text).unwrap();
        let err = DoubleButcherTableau::load(path.to_str().unwrap()).unwrap_err();
        assert!(err.to_string().contains("sum(b_I)"), "{err}");
    }

    #[test]
    fn validation_catches_first_order_pair_declared_second_order() {
        // implicit/explicit Euler pair is fine at order 1 but fails b·c = 1/2
        let order1 = "name Euler\nstages 1\norder 1\nA_I\n1\nb_I\n1\nA_E\n0\nb_E\n1\n";
        assert!(DoubleButcherTableau::parse(order1)
            .unwrap()
            .validate()
            .enforced_ok());
        let order2 = "name Euler\nstages 1\norder 2\nA_I\n1\nb_I\n1\nA_E\n0\nb_E\n1\n";
        let report = DoubleButcherTableau::parse(order2).unwrap().validate();
        assert!(!report.enforced_ok());
        assert!(report
            .enforced_failures()
            .iter()
            .any(|c| c.label.contains("b_E·c_E")));
    }

    #[test]
    fn validation_catches_inconsistent_c_row() {
        let text =
            "name BadC\nstages 2\norder 1\nA_I\n0 0\n0 1/2\nb_I\n0 1\nA_E\n0 0\n1/2 0\nb_E\n0 1\nc_I\n0 0.7\nc_E\n0 0.5\n";
        let report = DoubleButcherTableau::parse(text).unwrap().validate();
        assert!(report
            .enforced_failures()
            .iter()
            .any(|c| c.label.contains("c_I matches row sums")));
    }

    #[test]
    fn validation_catches_structural_violations() {
        // entry above the diagonal of A_I
        let text = "name UpImpl\nstages 2\norder 1\nA_I\n0 0.1\n0 1/2\nb_I\n0 1\nA_E\n0 0\n1/2 0\nb_E\n0 1\n";
        let report = DoubleButcherTableau::parse(text).unwrap().validate();
        assert!(report
            .enforced_failures()
            .iter()
            .any(|c| c.label.contains("A_I lower triangular")));
        // nonzero diagonal of A_E, even a tiny one, is structural
        let text = "name DiagExpl\nstages 2\norder 1\nA_I\n0 0\n0 1/2\nb_I\n0 1\nA_E\n1e-30 0\n1/2 0\nb_E\n0 1\n";
        let report = DoubleButcherTableau::parse(text).unwrap().validate();
        assert!(report
            .enforced_failures()
            .iter()
            .any(|c| c.label.contains("A_E strictly lower")));
    }

    #[test]
    fn coupling_conditions_warn_but_do_not_block() {
        // per-part second order holds, but c_I ≠ c_E breaks b_I·c_E = 1/2
        let text = "name Mismatch\nstages 2\norder 2\nA_I\n0 0\n0 1/2\nb_I\n0 1\nA_E\n0 0\n1 0\nb_E\n1/2 1/2\n";
        let t = DoubleButcherTableau::parse(text).unwrap();
        let report = t.validate();
        assert!(report.enforced_ok(), "{report}");
        assert!(!report.warnings().is_empty());
        assert!(report
            .warnings()
            .iter()
            .any(|c| c.label.contains("b_I·c_E")));
    }
}
