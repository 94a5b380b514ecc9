use std::collections::{BTreeMap, HashMap};

use crate::model::{FiniteStructure, Signature, SymbolKind};

use super::syntax::{Formula, Term};
use super::FormulaError;

/// Values for free variables.
pub type Assignment = BTreeMap<String, usize>;

enum CTerm {
    Var(usize),
    App(usize, Vec<CTerm>),
}

enum CForm {
    Const(bool),
    Rel(usize, Vec<CTerm>),
    Eq(CTerm, CTerm),
    Not(Box<CForm>),
    And(Box<CForm>, Box<CForm>),
    Or(Box<CForm>, Box<CForm>),
    Implies(Box<CForm>, Box<CForm>),
    Iff(Box<CForm>, Box<CForm>),
    Forall(usize, Box<CForm>),
    Exists(usize, Box<CForm>),
}

/// A formula with symbols resolved to table indices and variables to
/// environment slots, ready to be evaluated many times.
pub struct Compiled {
    form: CForm,
    free: Vec<String>,
    slots: usize,
}

struct Compiler<'a> {
    sig: &'a Signature,
    scope: Vec<(String, usize)>,
    slots: usize,
}

impl Compiler<'_> {
    fn resolve(&self, v: &str) -> Result<usize, FormulaError> {
        self.scope
            .iter()
            .rev()
            .find(|(name, _)| name == v)
            .map(|&(_, slot)| slot)
            .ok_or_else(|| FormulaError::UnboundVariable(v.to_string()))
    }

    fn args(&self, symbol: &str, arity: usize, args: &[Term]) -> Result<Vec<CTerm>, FormulaError> {
        if args.len() != arity {
            return Err(FormulaError::UnknownArity {
                symbol: symbol.to_string(),
                expected: arity,
                found: args.len(),
            });
        }
        args.iter().map(|a| self.term(a)).collect()
    }

    fn term(&self, t: &Term) -> Result<CTerm, FormulaError> {
        match t {
            Term::Var(v) => Ok(CTerm::Var(self.resolve(v)?)),
            Term::Apply(f, args) => match self.sig.lookup(f) {
                Some(SymbolKind::Function(i)) => Ok(CTerm::App(
                    i,
                    self.args(f, self.sig.functions()[i].arity, args)?,
                )),
                _ => Err(FormulaError::UnknownSymbol(f.clone())),
            },
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<CForm, FormulaError> {
        let bin = |c: &mut Self, a: &Formula, b: &Formula| -> Result<_, FormulaError> {
            Ok((Box::new(c.formula(a)?), Box::new(c.formula(b)?)))
        };
        Ok(match f {
            Formula::True => CForm::Const(true),
            Formula::False => CForm::Const(false),
            Formula::Rel(r, args) => match self.sig.lookup(r) {
                Some(SymbolKind::Relation(i)) => {
                    CForm::Rel(i, self.args(r, self.sig.relations()[i].arity, args)?)
                }
                _ => return Err(FormulaError::UnknownSymbol(r.clone())),
            },
            Formula::Eq(l, r) => CForm::Eq(self.term(l)?, self.term(r)?),
            Formula::Not(b) => CForm::Not(Box::new(self.formula(b)?)),
            Formula::And(a, b) => {
                let (a, b) = bin(self, a, b)?;
                CForm::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(self, a, b)?;
                CForm::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(self, a, b)?;
                CForm::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(self, a, b)?;
                CForm::Iff(a, b)
            }
            Formula::Forall(v, b) | Formula::Exists(v, b) => {
                let slot = self.slots;
                self.slots += 1;
                self.scope.push((v.clone(), slot));
                let body = self.formula(b);
                self.scope.pop();
                miniscope(matches!(f, Formula::Forall(..)), slot, body?)
            }
        })
    }
}

fn term_uses(t: &CTerm, slot: usize) -> bool {
    match t {
        CTerm::Var(s) => *s == slot,
        CTerm::App(_, args) => args.iter().any(|a| term_uses(a, slot)),
    }
}

fn uses(f: &CForm, slot: usize) -> bool {
    match f {
        CForm::Const(_) => false,
        CForm::Rel(_, args) => args.iter().any(|a| term_uses(a, slot)),
        CForm::Eq(l, r) => term_uses(l, slot) || term_uses(r, slot),
        CForm::Not(b) | CForm::Forall(_, b) | CForm::Exists(_, b) => uses(b, slot),
        CForm::And(a, b) | CForm::Or(a, b) | CForm::Implies(a, b) | CForm::Iff(a, b) => {
            uses(a, slot) || uses(b, slot)
        }
    }
}

/// Pushes a quantifier down to the parts of its body that mention it. Sound
/// because universes are nonempty; prenex inputs with wide matrices would
/// otherwise cost n^(prefix length) per evaluation.
fn miniscope(forall: bool, slot: usize, body: CForm) -> CForm {
    if !uses(&body, slot) {
        return body;
    }
    let q = |b: CForm| miniscope(forall, slot, b);
    match body {
        // The quantifier distributes over its own connective.
        CForm::And(a, b) if forall => CForm::And(Box::new(q(*a)), Box::new(q(*b))),
        CForm::Or(a, b) if !forall => CForm::Or(Box::new(q(*a)), Box::new(q(*b))),
        // Otherwise it can only move past a side that does not mention it.
        CForm::And(a, b) | CForm::Or(a, b)
            if !uses(&a, slot) || !uses(&b, slot) =>
        {
            let (a, b) = if uses(&a, slot) { (q(*a), *b) } else { (*a, q(*b)) };
            if forall {
                CForm::Or(Box::new(a), Box::new(b))
            } else {
                CForm::And(Box::new(a), Box::new(b))
            }
        }
        b if forall => CForm::Forall(slot, Box::new(b)),
        b => CForm::Exists(slot, Box::new(b)),
    }
}

impl Compiled {
    pub fn new(sig: &Signature, f: &Formula) -> Result<Compiled, FormulaError> {
        let free: Vec<String> = f.free_vars().into_iter().collect();
        let mut c = Compiler {
            sig,
            scope: free.iter().cloned().zip(0..).collect(),
            slots: free.len(),
        };
        let form = c.formula(f)?;
        Ok(Compiled {
            form,
            free,
            slots: c.slots,
        })
    }

    /// Free variables, sorted; `eval_values` takes their values in this order.
    pub fn free_vars(&self) -> &[String] {
        &self.free
    }

    pub fn eval(&self, m: &FiniteStructure, asg: &Assignment) -> Result<bool, FormulaError> {
        let mut values = Vec::with_capacity(self.free.len());
        for v in &self.free {
            let x = *asg
                .get(v)
                .ok_or_else(|| FormulaError::UnboundVariable(v.clone()))?;
            if x >= m.size() {
                return Err(FormulaError::ValueOutOfRange {
                    var: v.clone(),
                    value: x,
                    n: m.size(),
                });
            }
            values.push(x);
        }
        Ok(self.eval_values(m, &values))
    }

    /// Evaluates with free variables bound positionally; `m` must have the
    /// signature the formula was compiled against.
    pub fn eval_values(&self, m: &FiniteStructure, values: &[usize]) -> bool {
        assert_eq!(values.len(), self.free.len());
        let mut env = vec![0; self.slots];
        env[..values.len()].copy_from_slice(values);
        let mut scratch = Vec::new();
        form(m, &self.form, &mut env, &mut scratch)
    }
}

fn term(m: &FiniteStructure, t: &CTerm, env: &[usize]) -> usize {
    match t {
        CTerm::Var(s) => env[*s],
        CTerm::App(f, args) => {
            let vals: Vec<usize> = args.iter().map(|a| term(m, a, env)).collect();
            m.apply(*f, &vals)
        }
    }
}

fn form(m: &FiniteStructure, f: &CForm, env: &mut Vec<usize>, scratch: &mut Vec<usize>) -> bool {
    match f {
        CForm::Const(b) => *b,
        CForm::Rel(r, args) => {
            scratch.clear();
            for a in args {
                let v = term(m, a, env);
                scratch.push(v);
            }
            m.holds(*r, scratch)
        }
        CForm::Eq(l, r) => term(m, l, env) == term(m, r, env),
        CForm::Not(b) => !form(m, b, env, scratch),
        CForm::And(a, b) => form(m, a, env, scratch) && form(m, b, env, scratch),
        CForm::Or(a, b) => form(m, a, env, scratch) || form(m, b, env, scratch),
        CForm::Implies(a, b) => !form(m, a, env, scratch) || form(m, b, env, scratch),
        CForm::Iff(a, b) => form(m, a, env, scratch) == form(m, b, env, scratch),
        CForm::Forall(slot, b) => (0..m.size()).all(|x| {
            env[*slot] = x;
            form(m, b, env, scratch)
        }),
        CForm::Exists(slot, b) => (0..m.size()).any(|x| {
            env[*slot] = x;
            form(m, b, env, scratch)
        }),
    }
}

/// Truth of `φ` in `m` under `asg`. Quantifiers range over the universe and
/// `=` is identity.
pub fn eval(m: &FiniteStructure, phi: &Formula, asg: &Assignment) -> Result<bool, FormulaError> {
    Compiled::new(m.signature(), phi)?.eval(m, asg)
}

/// Truth of a closed formula.
pub fn holds(m: &FiniteStructure, phi: &Formula) -> Result<bool, FormulaError> {
    eval(m, phi, &Assignment::new())
}

/// Every assignment of `vars` over `0..n`, in lexicographic order.
pub fn all_assignments(vars: &[String], n: usize) -> Vec<Assignment> {
    let mut out = Vec::new();
    let elems: Vec<usize> = (0..n).collect();
    crate::model::for_each_tuple(&elems, vars.len(), |vals| {
        out.push(vars.iter().cloned().zip(vals.iter().copied()).collect());
    });
    out
}

/// Map from assignments to truth values, used to compare formulas.
pub fn truth_table(
    m: &FiniteStructure,
    phi: &Formula,
    vars: &[String],
) -> Result<HashMap<Vec<usize>, bool>, FormulaError> {
    let c = Compiled::new(m.signature(), phi)?;
    let mut out = HashMap::new();
    for asg in all_assignments(vars, m.size()) {
        let key = vars.iter().map(|v| asg[v]).collect();
        out.insert(key, c.eval(m, &asg)?);
    }
    Ok(out)
}
