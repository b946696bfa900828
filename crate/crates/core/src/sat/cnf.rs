use std::fmt::Write as _;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::SatError;

/// A named, contiguous block of variable ids (e.g. `placement`, `move`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarGroup {
    pub name: String,
    pub first: u32,
    pub last: u32,
}

/// CNF over variables `1..=variable_count`, literals in DIMACS sign convention.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    variable_count: u32,
    clauses: Vec<Vec<i32>>,
    annotations: Vec<VarGroup>,
}

impl CnfFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn variable_count(&self) -> u32 {
        self.variable_count
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn annotations(&self) -> &[VarGroup] {
        &self.annotations
    }

    pub fn new_var(&mut self) -> i32 {
        self.variable_count += 1;
        self.variable_count as i32
    }

    /// Allocates `n` consecutive variables.
    pub fn new_vars(&mut self, n: usize) -> Range<i32> {
        let start = self.variable_count as i32 + 1;
        self.variable_count += n as u32;
        start..start + n as i32
    }

    /// Records that `vars` belong to the group `name`. Empty ranges are skipped.
    pub fn annotate(&mut self, name: &str, vars: Range<i32>) {
        if vars.is_empty() {
            return;
        }
        self.annotations.push(VarGroup {
            name: name.to_string(),
            first: vars.start as u32,
            last: (vars.end - 1) as u32,
        });
    }

    /// # Panics
    /// On an empty clause or a literal naming an unallocated variable.
    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = i32>) {
        let clause: Vec<i32> = lits.into_iter().collect();
        assert!(!clause.is_empty(), "empty clause");
        for &l in &clause {
            assert!(
                l != 0 && l.unsigned_abs() <= self.variable_count,
                "literal {l} out of range (variables: {})",
                self.variable_count
            );
        }
        self.clauses.push(clause);
    }

    /// Forces unsatisfiability without an empty clause.
    pub fn add_contradiction(&mut self) {
        let v = self.new_var();
        self.add_clause([v]);
        self.add_clause([-v]);
    }

    /// True iff `model` satisfies every clause.
    pub fn is_satisfied_by(&self, model: &Model) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| model.lit(l)))
    }

    /// DIMACS text; annotations go to `c` comment lines.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::with_capacity(self.clauses.len() * 12 + 64);
        for g in &self.annotations {
            let _ = writeln!(out, "c group {} {} {}", g.name, g.first, g.last);
        }
        let _ = writeln!(out, "p cnf {} {}", self.variable_count, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }

    /// Reads DIMACS CNF. Clauses may span lines; `c group` comments are restored.
    pub fn from_dimacs(text: &str) -> Result<Self, SatError> {
        let mut formula = CnfFormula::new();
        let mut header: Option<(u32, usize)> = None;
        let mut current = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            let bad = |message: String| SatError::Dimacs { line: i + 1, message };
            if line.is_empty() || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('c') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if let ["group", name, first, last] = parts.as_slice() {
                    if let (Ok(first), Ok(last)) = (first.parse(), last.parse()) {
                        formula.annotations.push(VarGroup {
                            name: name.to_string(),
                            first,
                            last,
                        });
                    }
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix("p ") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                match parts.as_slice() {
                    ["cnf", v, c] => {
                        let v = v.parse().map_err(|_| bad(format!("bad variable count `{v}`")))?;
                        let c = c.parse().map_err(|_| bad(format!("bad clause count `{c}`")))?;
                        formula.variable_count = v;
                        header = Some((v, c));
                    }
                    _ => return Err(bad(format!("bad header `{line}`"))),
                }
                continue;
            }
            let Some((vars, _)) = header else {
                return Err(bad("clause before `p cnf` header".into()));
            };
            for tok in line.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| bad(format!("bad literal `{tok}`")))?;
                if l == 0 {
                    if current.is_empty() {
                        return Err(bad("empty clause".into()));
                    }
                    formula.clauses.push(std::mem::take(&mut current));
                } else if l.unsigned_abs() > vars {
                    return Err(bad(format!("literal {l} exceeds declared {vars} variables")));
                } else {
                    current.push(l);
                }
            }
        }
        if !current.is_empty() {
            formula.clauses.push(current);
        }
        match header {
            None => Err(SatError::Dimacs {
                line: 0,
                message: "missing `p cnf` header".into(),
            }),
            Some((_, count)) if count != formula.clauses.len() => Err(SatError::Dimacs {
                line: 0,
                message: format!("header declares {count} clauses, found {}", formula.clauses.len()),
            }),
            Some(_) => Ok(formula),
        }
    }
}

/// Total assignment; index 0 unused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn new(variable_count: u32) -> Self {
        Model {
            values: vec![false; variable_count as usize + 1],
        }
    }

    pub fn from_values(values: Vec<bool>) -> Self {
        let mut v = Vec::with_capacity(values.len() + 1);
        v.push(false);
        v.extend(values);
        Model { values: v }
    }

    pub fn variable_count(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    pub fn value(&self, var: u32) -> bool {
        self.values.get(var as usize).copied().unwrap_or(false)
    }

    pub fn set(&mut self, var: u32, value: bool) {
        self.values[var as usize] = value;
    }

    pub fn lit(&self, lit: i32) -> bool {
        self.value(lit.unsigned_abs()) == (lit > 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_unit_dimacs() {
        let mut f = CnfFormula::new();
        let v = f.new_var();
        f.add_clause([v]);
        assert_eq!(f.to_dimacs(), "p cnf 1 1\n1 0\n");
    }

    #[test]
    fn two_clause_round_trip() {
        let mut f = CnfFormula::new();
        let vars = f.new_vars(2);
        f.annotate("x", vars.clone());
        f.add_clause([1, -2]);
        f.add_clause([2]);
        let text = f.to_dimacs();
        assert!(text.contains("c group x 1 2\n"));
        assert!(text.contains("p cnf 2 2\n1 -2 0\n2 0\n"));
        assert_eq!(CnfFormula::from_dimacs(&text).unwrap(), f);
    }

    #[test]
    fn dimacs_errors() {
        assert!(CnfFormula::from_dimacs("1 0\n").is_err());
        assert!(CnfFormula::from_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(CnfFormula::from_dimacs("p cnf 1 2\n1 0\n").is_err());
        let multi = CnfFormula::from_dimacs("c hi\np cnf 3 1\n1 2\n 3 0\n").unwrap();
        assert_eq!(multi.clauses(), &[vec![1, 2, 3]]);
    }

    #[test]
    #[should_panic(expected = "empty clause")]
    fn empty_clause_rejected() {
        CnfFormula::new().add_clause([]);
    }

    #[test]
    fn evaluation() {
        let mut f = CnfFormula::new();
        f.new_vars(2);
        f.add_clause([1, -2]);
        let mut m = Model::new(2);
        assert!(f.is_satisfied_by(&m));
        m.set(2, true);
        assert!(!f.is_satisfied_by(&m));
    }
}
