//! Sequential-counter cardinality constraints.
//!
//! Register `s[i][j]` is forced true whenever at least `j + 1` of the first
//! `i + 1` inputs are true; the overflow clause forbids a `(k + 1)`-th.
//! Inputs may repeat; each occurrence counts once, which is how weighted
//! sums are expressed by unary expansion.

use super::cnf::CnfFormula;

/// At most `k` of `lits` true.
pub fn at_most(formula: &mut CnfFormula, lits: &[i32], k: usize) {
    let n = lits.len();
    if k >= n {
        return;
    }
    if k == 0 {
        for &l in lits {
            formula.add_clause([-l]);
        }
        return;
    }
    let first = formula.variable_count() as i32 + 1;
    let regs: Vec<Vec<i32>> = (0..n - 1).map(|_| formula.new_vars(k).collect()).collect();
    formula.annotate("counter", first..formula.variable_count() as i32 + 1);

    formula.add_clause([-lits[0], regs[0][0]]);
    for &r in &regs[0][1..] {
        formula.add_clause([-r]);
    }
    for i in 1..n - 1 {
        let (x, prev, cur) = (lits[i], &regs[i - 1], &regs[i]);
        formula.add_clause([-x, cur[0]]);
        formula.add_clause([-prev[0], cur[0]]);
        for j in 1..k {
            formula.add_clause([-x, -prev[j - 1], cur[j]]);
            formula.add_clause([-prev[j], cur[j]]);
        }
        formula.add_clause([-x, -prev[k - 1]]);
    }
    formula.add_clause([-lits[n - 1], -regs[n - 2][k - 1]]);
}

/// At least `k` of `lits` true. Register `r[i][j]` may only be true when
/// `j + 1` of the first `i + 1` inputs are, and the last row must reach `k`.
pub fn at_least(formula: &mut CnfFormula, lits: &[i32], k: usize) {
    let n = lits.len();
    if k == 0 {
        return;
    }
    if k > n {
        formula.add_contradiction();
        return;
    }
    if n - k < k {
        let negated: Vec<i32> = lits.iter().map(|&l| -l).collect();
        at_most(formula, &negated, n - k);
        return;
    }
    let first = formula.variable_count() as i32 + 1;
    let regs: Vec<Vec<i32>> = (0..n).map(|_| formula.new_vars(k).collect()).collect();
    formula.annotate("counter", first..formula.variable_count() as i32 + 1);

    formula.add_clause([-regs[0][0], lits[0]]);
    for &r in &regs[0][1..] {
        formula.add_clause([-r]);
    }
    for i in 1..n {
        let (x, prev, cur) = (lits[i], &regs[i - 1], &regs[i]);
        formula.add_clause([-cur[0], prev[0], x]);
        for j in 1..k {
            formula.add_clause([-cur[j], prev[j], x]);
            formula.add_clause([-cur[j], prev[j], prev[j - 1]]);
        }
    }
    formula.add_clause([regs[n - 1][k - 1]]);
}
