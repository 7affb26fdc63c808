//! Not-all-equal satisfiability: formulas, evaluation, a complete
//! backtracking solver and the variable-clause incidence graph.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::instance::Edge;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Literal {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Literal {
        Literal { var, positive: false }
    }

    pub fn negate(self) -> Literal {
        Literal { var: self.var, positive: !self.positive }
    }

    pub fn value(self, t: &[bool]) -> bool {
        t[self.var] == self.positive
    }
}

impl core::ops::Not for Literal {
    type Output = Literal;
    fn not(self) -> Literal {
        self.negate()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NaeFormula {
    pub vars: usize,
    pub clauses: Vec<Vec<Literal>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("clause {clause} uses undeclared variable {var}")]
    UnknownVariable { clause: usize, var: usize },
}

impl NaeFormula {
    pub fn new(vars: usize) -> Self {
        NaeFormula { vars, clauses: Vec::new() }
    }

    pub fn add_var(&mut self) -> usize {
        self.vars += 1;
        self.vars - 1
    }

    pub fn add_clause(&mut self, clause: Vec<Literal>) {
        self.clauses.push(clause);
    }

    pub fn validate(&self) -> Result<(), FormulaError> {
        for (i, c) in self.clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(FormulaError::EmptyClause(i));
            }
            if let Some(l) = c.iter().find(|l| l.var >= self.vars) {
                return Err(FormulaError::UnknownVariable { clause: i, var: l.var });
            }
        }
        Ok(())
    }

    /// `p nae <vars> <clauses>` followed by one clause per line, 1-based
    /// variables, negative numbers for negated literals.
    pub fn dimacs(&self) -> String {
        let mut s = format!("p nae {} {}\n", self.vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let v = l.var as i64 + 1;
                let _ = write!(s, "{} ", if l.positive { v } else { -v });
            }
            s.push_str("0\n");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaeAssignment {
    pub values: Vec<bool>,
}

impl NaeAssignment {
    pub fn complement(&self) -> NaeAssignment {
        NaeAssignment { values: self.values.iter().map(|b| !b).collect() }
    }
}

/// True iff every clause has a true and a false literal.
pub fn nae_eval(f: &NaeFormula, t: &NaeAssignment) -> bool {
    f.clauses.iter().all(|c| {
        let trues = c.iter().filter(|l| l.value(&t.values)).count();
        trues > 0 && trues < c.len()
    })
}

/// Complete search: propagation of forced literals plus chronological
/// backtracking. Unconstrained variables are false.
pub fn nae_solve(f: &NaeFormula) -> Option<NaeAssignment> {
    let mut occurs = vec![Vec::new(); f.vars];
    for (i, c) in f.clauses.iter().enumerate() {
        if c.len() < 2 {
            return None;
        }
        for l in c {
            if !occurs[l.var].contains(&i) {
                occurs[l.var].push(i);
            }
        }
    }
    let mut s = Solver { f, occurs, value: vec![None; f.vars], trail: Vec::new() };
    // Complementing a solution gives a solution, so the first constrained
    // variable may be fixed to false.
    let first = f.clauses.first().map(|c| c[0].var);
    let ok = match first {
        Some(v) => s.assign(v, false) && s.search(),
        None => true,
    };
    if !ok {
        return None;
    }
    let values: Vec<bool> = s.value.iter().map(|v| v.unwrap_or(false)).collect();
    let t = NaeAssignment { values };
    debug_assert!(nae_eval(f, &t));
    Some(t)
}

struct Solver<'a> {
    f: &'a NaeFormula,
    occurs: Vec<Vec<usize>>,
    value: Vec<Option<bool>>,
    trail: Vec<usize>,
}

impl Solver<'_> {
    /// Assigns and propagates; false on conflict (the trail keeps what was set).
    fn assign(&mut self, var: usize, val: bool) -> bool {
        let mut queue = vec![(var, val)];
        while let Some((v, b)) = queue.pop() {
            match self.value[v] {
                Some(x) if x == b => continue,
                Some(_) => return false,
                None => {}
            }
            self.value[v] = Some(b);
            self.trail.push(v);
            for &ci in &self.occurs[v] {
                let c = &self.f.clauses[ci];
                let mut t = 0;
                let mut fl = 0;
                let mut open = None;
                let mut open_count = 0;
                for l in c {
                    match self.value[l.var] {
                        Some(x) => {
                            if x == l.positive {
                                t += 1
                            } else {
                                fl += 1
                            }
                        }
                        None => {
                            open = Some(*l);
                            open_count += 1;
                        }
                    }
                }
                if t > 0 && fl > 0 {
                    continue;
                }
                match open_count {
                    0 => return false,
                    1 => {
                        // All assigned literals agree; the last one must differ.
                        let l = open.unwrap();
                        let want = t == 0;
                        queue.push((l.var, want == l.positive));
                    }
                    _ => {}
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.value[v] = None;
        }
    }

    fn pick(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for c in &self.f.clauses {
            let mut t = false;
            let mut fl = false;
            let mut open = 0;
            let mut var = 0;
            for l in c {
                match self.value[l.var] {
                    Some(x) if x == l.positive => t = true,
                    Some(_) => fl = true,
                    None => {
                        open += 1;
                        var = l.var;
                    }
                }
            }
            if t && fl || open == 0 {
                continue;
            }
            if best.is_none_or(|(o, _)| open < o) {
                best = Some((open, var));
            }
        }
        best.map(|b| b.1)
    }

    fn search(&mut self) -> bool {
        let Some(var) = self.pick() else { return true };
        for val in [false, true] {
            let mark = self.trail.len();
            if self.assign(var, val) && self.search() {
                return true;
            }
            self.undo(mark);
        }
        false
    }
}

/// Bipartite incidence graph: variables are vertices `0..vars`, clause `j`
/// is vertex `vars + j`.
pub fn variable_clause_graph(f: &NaeFormula) -> (usize, Vec<Edge>) {
    let mut edges = Vec::new();
    for (j, c) in f.clauses.iter().enumerate() {
        let mut vars: Vec<usize> = c.iter().map(|l| l.var).collect();
        vars.sort_unstable();
        vars.dedup();
        for v in vars {
            edges.push(Edge::new(v, f.vars + j));
        }
    }
    (f.vars + f.clauses.len(), edges)
}

pub fn is_planar_formula(f: &NaeFormula) -> bool {
    let (n, edges) = variable_clause_graph(f);
    crate::planarity::is_planar(n, &edges)
}
