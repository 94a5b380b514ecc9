use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    /// A function symbol applied to arguments; constants have none.
    Apply(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn app(symbol: &str, args: Vec<Term>) -> Term {
        Term::Apply(symbol.to_string(), args)
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Apply(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        if let Term::Apply(f, args) = self {
            out.insert(f.clone());
            args.iter().for_each(|a| a.collect_symbols(out));
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Apply(s, args) if args.is_empty() => f.write_str(s),
            Term::Apply(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Rel(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn rel(symbol: &str, args: Vec<Term>) -> Formula {
        Formula::Rel(symbol.to_string(), args)
    }

    pub fn eq(lhs: Term, rhs: Term) -> Formula {
        Formula::Eq(lhs, rhs)
    }

    pub fn negation(body: Formula) -> Formula {
        Formula::Not(Box::new(body))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        Formula::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    pub fn forall(var: &str, body: Formula) -> Formula {
        Formula::Forall(var.to_string(), Box::new(body))
    }

    pub fn exists(var: &str, body: Formula) -> Formula {
        Formula::Exists(var.to_string(), Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Rel(_, args) => {
                let mut vs = BTreeSet::new();
                args.iter().for_each(|a| a.collect_vars(&mut vs));
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Eq(l, r) => {
                let mut vs = BTreeSet::new();
                l.collect_vars(&mut vs);
                r.collect_vars(&mut vs);
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not(b) => b.collect_free(bound, out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, b) | Formula::Exists(v, b) => {
                bound.push(v.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Function and relation symbols mentioned anywhere.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Rel(r, args) => {
                out.insert(r.clone());
                args.iter().for_each(|a| a.collect_symbols(&mut out));
            }
            Formula::Eq(l, r) => {
                l.collect_symbols(&mut out);
                r.collect_symbols(&mut out);
            }
            _ => {}
        });
        out
    }

    /// Every variable name, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Rel(_, args) => args.iter().for_each(|a| a.collect_vars(&mut out)),
            Formula::Eq(l, r) => {
                l.collect_vars(&mut out);
                r.collect_vars(&mut out);
            }
            Formula::Forall(v, _) | Formula::Exists(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Bound variables in the order their binders appear.
    pub fn binders(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Forall(v, _) | Formula::Exists(v, _) = f {
                out.push(v.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(b) | Formula::Forall(_, b) | Formula::Exists(_, b) => b.visit(f),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Connective nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Rel(..) | Formula::Eq(..) => 0,
            Formula::Not(b) | Formula::Forall(_, b) | Formula::Exists(_, b) => 1 + b.depth(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Forall(..) | Formula::Exists(..) => 0,
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(..) => 5,
            _ => 6,
        }
    }
}

struct Child<'a> {
    formula: &'a Formula,
    parens: bool,
}

impl fmt::Display for Child<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parens {
            write!(f, "({})", self.formula)
        } else {
            write!(f, "{}", self.formula)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = self.precedence();
        // Quantifiers inside connectives are always parenthesized.
        let left = |c: &'_ Formula, right_assoc: bool| -> bool {
            let p = c.precedence();
            p == 0 || if right_assoc { p <= prec } else { p < prec }
        };
        let right = |c: &'_ Formula, right_assoc: bool| -> bool {
            let p = c.precedence();
            p == 0 || if right_assoc { p < prec } else { p <= prec }
        };
        let binary = |f: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula, ra: bool| {
            write!(
                f,
                "{} {op} {}",
                Child {
                    formula: a,
                    parens: left(a, ra)
                },
                Child {
                    formula: b,
                    parens: right(b, ra)
                }
            )
        };
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Rel(r, args) if args.is_empty() => f.write_str(r),
            Formula::Rel(r, args) => write!(f, "{}", Term::Apply(r.clone(), args.clone())),
            Formula::Eq(l, r) => write!(f, "{l} = {r}"),
            Formula::Not(b) => write!(
                f,
                "~{}",
                Child {
                    formula: b,
                    parens: b.precedence() < 5 || matches!(**b, Formula::Eq(..))
                }
            ),
            Formula::And(a, b) => binary(f, a, "&", b, false),
            Formula::Or(a, b) => binary(f, a, "|", b, false),
            Formula::Implies(a, b) => binary(f, a, "->", b, true),
            Formula::Iff(a, b) => binary(f, a, "<->", b, false),
            Formula::Forall(v, b) | Formula::Exists(v, b) => {
                let kw = if matches!(self, Formula::Forall(..)) {
                    "forall"
                } else {
                    "exists"
                };
                let parens = (1..=4).contains(&b.precedence());
                write!(f, "{kw} {v}. {}", Child { formula: b, parens })
            }
        }
    }
}
