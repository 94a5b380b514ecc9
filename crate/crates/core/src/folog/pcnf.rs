use std::collections::BTreeSet;

use super::syntax::{Formula, Term};
use super::FormulaError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// Folds `true`/`false` away. The result is either a constant or free of
/// constants. Quantifiers over constants fold too since universes are
/// nonempty.
pub fn fold_constants(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True | False | Rel(..) | Eq(..) => f.clone(),
        Not(b) => match fold_constants(b) {
            True => False,
            False => True,
            b => Formula::negation(b),
        },
        And(a, b) => match (fold_constants(a), fold_constants(b)) {
            (False, _) | (_, False) => False,
            (True, x) | (x, True) => x,
            (a, b) => Formula::and(a, b),
        },
        Or(a, b) => match (fold_constants(a), fold_constants(b)) {
            (True, _) | (_, True) => True,
            (False, x) | (x, False) => x,
            (a, b) => Formula::or(a, b),
        },
        Implies(a, b) => match (fold_constants(a), fold_constants(b)) {
            (False, _) | (_, True) => True,
            (True, x) => x,
            (x, False) => Formula::negation(x),
            (a, b) => Formula::implies(a, b),
        },
        Iff(a, b) => match (fold_constants(a), fold_constants(b)) {
            (True, x) | (x, True) => x,
            (False, False) => True,
            (False, x) | (x, False) => Formula::negation(x),
            (a, b) => Formula::iff(a, b),
        },
        Forall(v, b) => match fold_constants(b) {
            c @ (True | False) => c,
            b => Formula::forall(v, b),
        },
        Exists(v, b) => match fold_constants(b) {
            c @ (True | False) => c,
            b => Formula::exists(v, b),
        },
    }
}

/// Negation normal form without `->` and `<->`, negating when `neg` is set.
/// Expects a constant-free formula.
fn nnf(f: &Formula, neg: bool) -> Formula {
    use Formula::*;
    let lit = |f: &Formula| if neg { Formula::negation(f.clone()) } else { f.clone() };
    let and_or = |a: Formula, b: Formula, conj: bool| {
        if conj {
            Formula::and(a, b)
        } else {
            Formula::or(a, b)
        }
    };
    match f {
        True | False => {
            if matches!(f, True) != neg {
                True
            } else {
                False
            }
        }
        Rel(..) | Eq(..) => lit(f),
        Not(b) => nnf(b, !neg),
        And(a, b) => and_or(nnf(a, neg), nnf(b, neg), !neg),
        Or(a, b) => and_or(nnf(a, neg), nnf(b, neg), neg),
        // a -> b is ~a | b.
        Implies(a, b) => and_or(nnf(a, !neg), nnf(b, neg), neg),
        Iff(a, b) => {
            if neg {
                // (a & ~b) | (~a & b)
                Formula::or(
                    Formula::and(nnf(a, false), nnf(b, true)),
                    Formula::and(nnf(a, true), nnf(b, false)),
                )
            } else {
                // (~a | b) & (~b | a)
                Formula::and(
                    Formula::or(nnf(a, true), nnf(b, false)),
                    Formula::or(nnf(b, true), nnf(a, false)),
                )
            }
        }
        Forall(v, b) if neg => Formula::exists(v, nnf(b, true)),
        Forall(v, b) => Formula::forall(v, nnf(b, false)),
        Exists(v, b) if neg => Formula::forall(v, nnf(b, true)),
        Exists(v, b) => Formula::exists(v, nnf(b, false)),
    }
}

struct Renamer {
    // Names a binder may not keep.
    used: BTreeSet<String>,
    // Names a fresh variable may not take.
    avoid: BTreeSet<String>,
    next: usize,
    scope: Vec<(String, String)>,
}

impl Renamer {
    fn fresh(&mut self) -> String {
        loop {
            let name = format!("_v{}", self.next);
            self.next += 1;
            if !self.used.contains(&name) && !self.avoid.contains(&name) {
                return name;
            }
        }
    }

    fn term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => match self.scope.iter().rev().find(|(old, _)| old == v) {
                Some((_, new)) => Term::Var(new.clone()),
                None => t.clone(),
            },
            Term::Apply(f, args) => Term::Apply(f.clone(), args.iter().map(|a| self.term(a)).collect()),
        }
    }

    fn formula(&mut self, f: &Formula) -> Formula {
        use Formula::*;
        match f {
            True | False => f.clone(),
            Rel(r, args) => Rel(r.clone(), args.iter().map(|a| self.term(a)).collect()),
            Eq(l, r) => Eq(self.term(l), self.term(r)),
            Not(b) => Formula::negation(self.formula(b)),
            And(a, b) => {
                let a = self.formula(a);
                Formula::and(a, self.formula(b))
            }
            Or(a, b) => {
                let a = self.formula(a);
                Formula::or(a, self.formula(b))
            }
            Implies(a, b) => {
                let a = self.formula(a);
                Formula::implies(a, self.formula(b))
            }
            Iff(a, b) => {
                let a = self.formula(a);
                Formula::iff(a, self.formula(b))
            }
            Forall(v, b) | Exists(v, b) => {
                let new = if self.used.contains(v) {
                    self.fresh()
                } else {
                    v.clone()
                };
                self.used.insert(new.clone());
                self.scope.push((v.clone(), new.clone()));
                let body = self.formula(b);
                self.scope.pop();
                if matches!(f, Forall(..)) {
                    Formula::forall(&new, body)
                } else {
                    Formula::exists(&new, body)
                }
            }
        }
    }
}

/// Renames bound variables so that no two binders share a name and no
/// binder reuses a free variable. Binders keep their names unless they
/// clash; clashing ones get `_v0`, `_v1`, ... in left-to-right order.
pub fn rename_apart(f: &Formula) -> Formula {
    let mut r = Renamer {
        used: f.free_vars(),
        avoid: f.all_vars(),
        next: 0,
        scope: Vec::new(),
    };
    let out = r.formula(f);
    debug_assert!({
        let b = out.binders();
        b.iter().collect::<BTreeSet<_>>().len() == b.len()
    });
    out
}

fn strip_quantifiers(f: &Formula, prefix: &mut Vec<(Quantifier, String)>) -> Formula {
    use Formula::*;
    match f {
        Forall(v, b) => {
            prefix.push((Quantifier::Forall, v.clone()));
            strip_quantifiers(b, prefix)
        }
        Exists(v, b) => {
            prefix.push((Quantifier::Exists, v.clone()));
            strip_quantifiers(b, prefix)
        }
        And(a, b) => {
            let a = strip_quantifiers(a, prefix);
            Formula::and(a, strip_quantifiers(b, prefix))
        }
        Or(a, b) => {
            let a = strip_quantifiers(a, prefix);
            Formula::or(a, strip_quantifiers(b, prefix))
        }
        _ => f.clone(),
    }
}

fn clauses(f: &Formula) -> Vec<Vec<Formula>> {
    match f {
        Formula::And(a, b) => {
            let mut out = clauses(a);
            out.extend(clauses(b));
            out
        }
        Formula::Or(a, b) => {
            let (ca, cb) = (clauses(a), clauses(b));
            let mut out = Vec::with_capacity(ca.len() * cb.len());
            for x in &ca {
                for y in &cb {
                    let mut c = x.clone();
                    for lit in y {
                        if !c.contains(lit) {
                            c.push(lit.clone());
                        }
                    }
                    out.push(c);
                }
            }
            out
        }
        lit => vec![vec![lit.clone()]],
    }
}

fn fold_left(items: Vec<Formula>, join: fn(Formula, Formula) -> Formula) -> Formula {
    let mut it = items.into_iter();
    let first = it.next().expect("nonempty");
    it.fold(first, join)
}

/// An equivalent formula in prenex conjunctive normal form.
pub fn to_pcnf(f: &Formula) -> Formula {
    let folded = fold_constants(f);
    if matches!(folded, Formula::True | Formula::False) {
        return folded;
    }
    let renamed = rename_apart(&nnf(&folded, false));
    let mut prefix = Vec::new();
    let matrix = strip_quantifiers(&renamed, &mut prefix);
    let mut cnf: Vec<Vec<Formula>> = Vec::new();
    for c in clauses(&matrix) {
        if !cnf.contains(&c) {
            cnf.push(c);
        }
    }
    let matrix = fold_left(
        cnf.into_iter().map(|c| fold_left(c, Formula::or)).collect(),
        Formula::and,
    );
    prefix
        .into_iter()
        .rev()
        .fold(matrix, |body, (q, v)| match q {
            Quantifier::Forall => Formula::forall(&v, body),
            Quantifier::Exists => Formula::exists(&v, body),
        })
}

/// Splits off the leading quantifier block.
pub fn split_prefix(f: &Formula) -> (Vec<(Quantifier, String)>, &Formula) {
    let mut prefix = Vec::new();
    let mut cur = f;
    loop {
        match cur {
            Formula::Forall(v, b) => {
                prefix.push((Quantifier::Forall, v.clone()));
                cur = b;
            }
            Formula::Exists(v, b) => {
                prefix.push((Quantifier::Exists, v.clone()));
                cur = b;
            }
            _ => return (prefix, cur),
        }
    }
}

fn is_atom(f: &Formula) -> bool {
    matches!(f, Formula::Rel(..) | Formula::Eq(..))
}

fn is_literal(f: &Formula) -> bool {
    match f {
        Formula::Not(b) => is_atom(b),
        _ => is_atom(f),
    }
}

fn is_clause(f: &Formula) -> bool {
    match f {
        Formula::Or(a, b) => is_clause(a) && is_clause(b),
        _ => is_literal(f),
    }
}

fn is_cnf(f: &Formula) -> bool {
    match f {
        Formula::And(a, b) => is_cnf(a) && is_cnf(b),
        _ => is_clause(f),
    }
}

/// Structural check: a quantifier prefix over a conjunction of
/// disjunctions of literals. A lone `true` or `false` also counts.
pub fn is_pcnf(f: &Formula) -> bool {
    let (_, matrix) = split_prefix(f);
    matches!(matrix, Formula::True | Formula::False) || is_cnf(matrix)
}

/// The literals of a PCNF matrix, left to right.
pub fn matrix_literals(f: &Formula) -> Result<Vec<&Formula>, FormulaError> {
    if !is_pcnf(f) {
        return Err(FormulaError::NotPcnf(f.to_string()));
    }
    fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
        match f {
            Formula::And(a, b) | Formula::Or(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            Formula::True | Formula::False => {}
            lit => out.push(lit),
        }
    }
    let mut out = Vec::new();
    walk(split_prefix(f).1, &mut out);
    Ok(out)
}

/// True iff the PCNF matrix has no literal of the form `~(s = t)`.
pub fn is_quotient_safe(f: &Formula) -> Result<bool, FormulaError> {
    Ok(!matrix_literals(f)?
        .iter()
        .any(|lit| matches!(lit, Formula::Not(b) if matches!(**b, Formula::Eq(..)))))
}
