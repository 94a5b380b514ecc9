use crate::model::{Signature, SymbolKind};

use super::syntax::{Formula, Term};
use super::FormulaError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Equals,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DArrow => "`<->`".into(),
            Tok::Equals => "`=`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let (tok, width) = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Spanned {
                tok: Tok::Ident(word),
                line: l0,
                col: c0,
            });
            continue;
        } else {
            let rest = |s: &str| chars[i..].iter().take(s.len()).copied().eq(s.chars());
            match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ',' => (Tok::Comma, 1),
                '.' => (Tok::Dot, 1),
                '~' => (Tok::Tilde, 1),
                '&' => (Tok::Amp, 1),
                '|' => (Tok::Pipe, 1),
                '=' => (Tok::Equals, 1),
                '-' if rest("->") => (Tok::Arrow, 2),
                '<' if rest("<->") => (Tok::DArrow, 3),
                _ => {
                    return Err(FormulaError::Syntax {
                        line: l0,
                        col: c0,
                        expected: format!("a token, found `{c}`"),
                    })
                }
            }
        };
        out.push(Spanned {
            tok,
            line: l0,
            col: c0,
        });
        i += width;
        col += width;
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

/// Non-fatal diagnostics produced while parsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseWarning {
    /// A quantifier rebinds a variable already bound by an enclosing one.
    Shadowing { var: String, line: usize, col: usize },
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseWarning::Shadowing { var, line, col } => {
                write!(f, "{line}:{col}: quantifier shadows bound variable `{var}`")
            }
        }
    }
}

struct Parser<'a> {
    sig: &'a Signature,
    toks: Vec<Spanned>,
    pos: usize,
    bound: Vec<String>,
    warnings: Vec<ParseWarning>,
}

const KEYWORDS: [&str; 4] = ["forall", "exists", "true", "false"];

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> FormulaError {
        let t = &self.toks[self.pos];
        FormulaError::Syntax {
            line: t.line,
            col: t.col,
            expected: format!("{expected}, found {}", t.tok.describe()),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FormulaError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn is_quantifier(&self) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == "forall" || w == "exists")
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        if self.is_quantifier() {
            self.quant()
        } else {
            self.iff()
        }
    }

    fn quant(&mut self) -> Result<Formula, FormulaError> {
        let kw = match self.bump().tok {
            Tok::Ident(w) => w,
            _ => unreachable!(),
        };
        let at = self.toks[self.pos].clone();
        let var = match &at.tok {
            Tok::Ident(v) if !KEYWORDS.contains(&v.as_str()) && self.sig.lookup(v).is_none() => {
                v.clone()
            }
            _ => return Err(self.error("a variable name")),
        };
        if var.starts_with('_') {
            return Err(FormulaError::ReservedVariable(var));
        }
        self.bump();
        if self.bound.contains(&var) {
            self.warnings.push(ParseWarning::Shadowing {
                var: var.clone(),
                line: at.line,
                col: at.col,
            });
        }
        self.expect(Tok::Dot, "`.` after the quantified variable")?;
        self.bound.push(var.clone());
        let body = self.formula();
        self.bound.pop();
        let body = body?;
        Ok(if kw == "forall" {
            Formula::forall(&var, body)
        } else {
            Formula::exists(&var, body)
        })
    }

    fn iff(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::negation(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            // A quantifier in operand position, e.g. `~exists x. R(x)`; its
            // body still extends as far as possible.
            _ if self.is_quantifier() => self.quant(),
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        let name = match self.peek() {
            Tok::Ident(w) => w.clone(),
            _ => return Err(self.error("a formula")),
        };
        match name.as_str() {
            "true" => {
                self.bump();
                return Ok(Formula::True);
            }
            "false" => {
                self.bump();
                return Ok(Formula::False);
            }
            _ => {}
        }
        if let Some(SymbolKind::Relation(r)) = self.sig.lookup(&name) {
            let arity = self.sig.relations()[r].arity;
            self.bump();
            let args = self.args(&name, arity)?;
            return Ok(Formula::Rel(name, args));
        }
        let lhs = self.term()?;
        self.expect(Tok::Equals, "`=`")?;
        let rhs = self.term()?;
        Ok(Formula::Eq(lhs, rhs))
    }

    fn args(&mut self, symbol: &str, arity: usize) -> Result<Vec<Term>, FormulaError> {
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            args.push(self.term()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen, "`,` or `)`")?;
        }
        if args.len() != arity {
            return Err(FormulaError::UnknownArity {
                symbol: symbol.to_string(),
                expected: arity,
                found: args.len(),
            });
        }
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, FormulaError> {
        let name = match self.peek() {
            Tok::Ident(w) if !KEYWORDS.contains(&w.as_str()) => w.clone(),
            _ => return Err(self.error("a term")),
        };
        match self.sig.lookup(&name) {
            Some(SymbolKind::Function(f)) => {
                let arity = self.sig.functions()[f].arity;
                self.bump();
                let args = self.args(&name, arity)?;
                Ok(Term::Apply(name, args))
            }
            Some(SymbolKind::Relation(_)) => Err(self.error("a term")),
            None => {
                if *self.peek_at(1) == Tok::LParen {
                    return Err(FormulaError::UnknownSymbol(name));
                }
                if name.starts_with('_') {
                    return Err(FormulaError::ReservedVariable(name));
                }
                self.bump();
                Ok(Term::Var(name))
            }
        }
    }
}

/// Parses `text` against `sig`, returning the formula and any warnings.
pub fn parse_formula_with_warnings(
    sig: &Signature,
    text: &str,
) -> Result<(Formula, Vec<ParseWarning>), FormulaError> {
    let mut p = Parser {
        sig,
        toks: lex(text)?,
        pos: 0,
        bound: Vec::new(),
        warnings: Vec::new(),
    };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error("end of input"));
    }
    Ok((f, p.warnings))
}

pub fn parse_formula(sig: &Signature, text: &str) -> Result<Formula, FormulaError> {
    parse_formula_with_warnings(sig, text).map(|(f, _)| f)
}
