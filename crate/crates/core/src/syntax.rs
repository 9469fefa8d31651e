//! Concrete syntax: the program grammar, query strings, interpretation
//! files, and the compiled-artifact format.
//!
//! Program statements, one per `.`-terminated line group, `%` comments:
//!
//! ```text
//! pred Monk_seal.                              % declaration; order fixes
//! pred Female.                                 % the partition layout
//! Monk_seal(joe).                              % ground fact
//! ~Female(joe).                                % classical negation
//! Elephant(X) :- Royal_elephant(X).            % unary rule
//! [0.4, 0.45] Female(X) :- Monk_seal(X).       % empirical clause
//! ```
//!
//! Formulas are `Name`, `~F`, `(F & F)`, `(F | F)`, with `true`/`false` as
//! constants. Probability literals are exact: decimals become the fraction
//! they spell (`0.45` is `9/20`), and `p/q` fractions are accepted directly.

use std::collections::{BTreeMap, BTreeSet};

use num::rational::BigRational;
use num::{BigInt, One, Zero};

use crate::compiler::{assemble, CompiledProgram};
use crate::error::{Error, Result, Violation, ViolationKind};
use crate::model::{
    cell_predicates, validate, ComplexPredicate, ContextClause, EmpiricalClause, EmpiricalProgram,
    Formula, GroundClause, GroundLiteral, Predicates, ProbabilityInterval, RuleLiteral, UnaryRule,
};
use crate::oracle::Interpretation;

const RESERVED: [&str; 4] = ["pred", "X", "true", "false"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(BigRational),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Dot,
    Turnstile,
    Tilde,
    Amp,
    Pipe,
    Slash,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(_) => "a number".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Turnstile => "`:-`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Slash => "`/`".into(),
        }
    }
}

struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn parse_err(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column: col,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Lexed>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars);
            }
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                out.push(Lexed {
                    tok: Tok::Ident(s),
                    line: tline,
                    col: tcol,
                });
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        digits.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                let mut value = BigRational::from_integer(
                    digits.parse::<BigInt>().expect("digits parse"),
                );
                // A dot continues the number only when a digit follows;
                // otherwise it terminates the statement.
                let mut iter = chars.clone();
                if iter.next() == Some('.') && iter.next().is_some_and(|c| c.is_ascii_digit()) {
                    bump(&mut chars);
                    let mut frac = String::new();
                    while let Some(&c) = chars.peek() {
                        if c.is_ascii_digit() {
                            frac.push(bump(&mut chars));
                        } else {
                            break;
                        }
                    }
                    let numer = frac.parse::<BigInt>().expect("digits parse");
                    let scale = num::pow(BigInt::from(10), frac.len());
                    value += BigRational::new(numer, scale);
                }
                out.push(Lexed {
                    tok: Tok::Number(value),
                    line: tline,
                    col: tcol,
                });
            }
            ':' => {
                bump(&mut chars);
                if chars.peek() == Some(&'-') {
                    bump(&mut chars);
                    out.push(Lexed {
                        tok: Tok::Turnstile,
                        line: tline,
                        col: tcol,
                    });
                } else {
                    return Err(parse_err(tline, tcol, "expected `:-`"));
                }
            }
            _ => {
                let tok = match c {
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    '~' => Tok::Tilde,
                    '&' => Tok::Amp,
                    '|' => Tok::Pipe,
                    '/' => Tok::Slash,
                    other => {
                        return Err(parse_err(
                            tline,
                            tcol,
                            format!("unexpected character `{other}`"),
                        ))
                    }
                };
                bump(&mut chars);
                out.push(Lexed {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
        }
    }
    Ok(out)
}

/// One parsed context-clause argument: the shared variable or a constant.
enum Arg {
    Var,
    Const(String),
}

struct Lit {
    negated: bool,
    predicate: usize,
    arg: Arg,
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    pred_index: BTreeMap<String, usize>,
    pred_names: Vec<String>,
    violations: Vec<Violation>,
}

impl Parser {
    fn new(text: &str) -> Result<Parser> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            pred_index: BTreeMap::new(),
            pred_names: Vec::new(),
            violations: Vec::new(),
        })
    }

    fn with_predicates(text: &str, preds: &Predicates) -> Result<Parser> {
        let mut p = Parser::new(text)?;
        for (i, name) in preds.iter().enumerate() {
            p.pred_index.insert(name.to_string(), i);
            p.pred_names.push(name.to_string());
        }
        Ok(p)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|l| (l.line, l.col))
            .unwrap_or((1, 1))
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|l| l.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let (line, col) = self.here();
        match self.advance() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(parse_err(
                line,
                col,
                format!("expected {}, found {}", want.describe(), t.describe()),
            )),
            None => Err(parse_err(
                line,
                col,
                format!("expected {}, found end of input", want.describe()),
            )),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String> {
        let (line, col) = self.here();
        match self.advance() {
            Some(Tok::Ident(s)) => Ok(s),
            Some(t) => Err(parse_err(
                line,
                col,
                format!("expected {what}, found {}", t.describe()),
            )),
            None => Err(parse_err(
                line,
                col,
                format!("expected {what}, found end of input"),
            )),
        }
    }

    fn flag(&mut self, kind: ViolationKind, line: usize, col: usize, message: String) {
        self.violations.push(Violation {
            location: Some((line, col)),
            kind,
            message,
        });
    }

    /// Look up a predicate, flagging unknown names. The dummy index keeps
    /// parsing going; the collected violation prevents the program from
    /// being built.
    fn pred_id(&mut self, name: &str, line: usize, col: usize) -> usize {
        match self.pred_index.get(name) {
            Some(&i) => i,
            None => {
                self.flag(
                    ViolationKind::UndeclaredPredicate,
                    line,
                    col,
                    format!("predicate {name} is not declared"),
                );
                0
            }
        }
    }

    fn declaration(&mut self) -> Result<()> {
        self.advance(); // `pred`
        let (line, col) = self.here();
        let name = self.expect_ident("a predicate name")?;
        if RESERVED.contains(&name.as_str()) {
            self.flag(
                ViolationKind::ReservedName,
                line,
                col,
                format!("`{name}` is reserved and cannot name a predicate"),
            );
        } else if self.pred_index.contains_key(&name) {
            self.flag(
                ViolationKind::DuplicatePredicate,
                line,
                col,
                format!("predicate {name} declared more than once"),
            );
        } else {
            self.pred_index.insert(name.clone(), self.pred_names.len());
            self.pred_names.push(name);
        }
        self.expect(Tok::Dot)
    }

    fn literal(&mut self) -> Result<Lit> {
        let negated = if self.peek() == Some(&Tok::Tilde) {
            self.advance();
            true
        } else {
            false
        };
        let (line, col) = self.here();
        let name = self.expect_ident("a predicate name")?;
        let predicate = self.pred_id(&name, line, col);
        self.expect(Tok::LParen)?;
        let arg_name = self.expect_ident("a constant or the variable X")?;
        self.expect(Tok::RParen)?;
        let arg = if arg_name == "X" {
            Arg::Var
        } else {
            Arg::Const(arg_name)
        };
        Ok(Lit {
            negated,
            predicate,
            arg,
        })
    }

    fn context_clause(&mut self) -> Result<Option<ContextClause>> {
        let (line, col) = self.here();
        let head = self.literal()?;
        let mut body = Vec::new();
        if self.peek() == Some(&Tok::Turnstile) {
            self.advance();
            loop {
                body.push(self.literal()?);
                if self.peek() == Some(&Tok::Comma) {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::Dot)?;

        let vars = std::iter::once(&head)
            .chain(body.iter())
            .filter(|l| matches!(l.arg, Arg::Var))
            .count();
        let total = 1 + body.len();
        if vars == total {
            Ok(Some(ContextClause::Rule(UnaryRule {
                head: lit_to_rule(&head),
                body: body.iter().map(lit_to_rule).collect(),
            })))
        } else if vars == 0 {
            Ok(Some(ContextClause::Ground(GroundClause {
                head: lit_to_ground(head),
                body: body.into_iter().map(lit_to_ground).collect(),
            })))
        } else {
            self.flag(
                ViolationKind::MixedArguments,
                line,
                col,
                "clause mixes the variable X with constants".into(),
            );
            Ok(None)
        }
    }

    fn number(&mut self) -> Result<BigRational> {
        let (line, col) = self.here();
        let n = match self.advance() {
            Some(Tok::Number(n)) => n,
            Some(t) => {
                return Err(parse_err(
                    line,
                    col,
                    format!("expected a probability literal, found {}", t.describe()),
                ))
            }
            None => {
                return Err(parse_err(
                    line,
                    col,
                    "expected a probability literal, found end of input",
                ))
            }
        };
        if self.peek() == Some(&Tok::Slash) {
            self.advance();
            let (dline, dcol) = self.here();
            match self.advance() {
                Some(Tok::Number(d)) if !d.is_zero() => Ok(n / d),
                Some(Tok::Number(_)) => {
                    Err(parse_err(dline, dcol, "zero denominator in probability"))
                }
                other => Err(parse_err(
                    dline,
                    dcol,
                    format!(
                        "expected a denominator, found {}",
                        other.map_or("end of input".into(), |t| t.describe())
                    ),
                )),
            }
        } else {
            Ok(n)
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let (line, col) = self.here();
        match self.advance() {
            Some(Tok::Ident(name)) => match name.as_str() {
                "true" => Ok(Formula::Top),
                "false" => Ok(Formula::Bot),
                "X" => Err(parse_err(line, col, "the variable X is not a formula")),
                _ => Ok(Formula::Atom(self.pred_id(&name, line, col))),
            },
            Some(Tok::Tilde) => Ok(Formula::not(self.formula()?)),
            Some(Tok::LParen) => {
                let left = self.formula()?;
                let (oline, ocol) = self.here();
                let combined = match self.advance() {
                    Some(Tok::RParen) => return Ok(left),
                    Some(Tok::Amp) => Formula::and(left, self.formula()?),
                    Some(Tok::Pipe) => Formula::or(left, self.formula()?),
                    other => {
                        return Err(parse_err(
                            oline,
                            ocol,
                            format!(
                                "expected `&`, `|`, or `)`, found {}",
                                other.map_or("end of input".into(), |t| t.describe())
                            ),
                        ))
                    }
                };
                self.expect(Tok::RParen)?;
                Ok(combined)
            }
            other => Err(parse_err(
                line,
                col,
                format!(
                    "expected a formula, found {}",
                    other.map_or("end of input".into(), |t| t.describe())
                ),
            )),
        }
    }

    fn applied_formula(&mut self) -> Result<ComplexPredicate> {
        let f = self.formula()?;
        self.expect(Tok::LParen)?;
        let (line, col) = self.here();
        let arg = self.expect_ident("the variable X")?;
        if arg != "X" {
            return Err(parse_err(
                line,
                col,
                format!("empirical clauses range over X, found `{arg}`"),
            ));
        }
        self.expect(Tok::RParen)?;
        Ok(ComplexPredicate::new(f))
    }

    fn empirical_clause(&mut self) -> Result<EmpiricalClause> {
        let (line, col) = self.here();
        self.expect(Tok::LBracket)?;
        let lo = self.number()?;
        self.expect(Tok::Comma)?;
        let hi = self.number()?;
        self.expect(Tok::RBracket)?;
        let interval = match ProbabilityInterval::new(lo, hi) {
            Ok(iv) => {
                if iv.is_degenerate_certainty() {
                    self.flag(
                        ViolationKind::ForbiddenInterval,
                        line,
                        col,
                        "empirical intervals may not be [0, 0] or [1, 1]; state certainty in the context".into(),
                    );
                }
                iv
            }
            Err(_) => {
                self.flag(
                    ViolationKind::InvalidBounds,
                    line,
                    col,
                    "probability bounds must satisfy 0 <= lo <= hi <= 1".into(),
                );
                ProbabilityInterval::new(BigRational::zero(), BigRational::one())
                    .expect("the unit interval is valid")
            }
        };
        let head = self.applied_formula()?;
        let mut body = Vec::new();
        if self.peek() == Some(&Tok::Turnstile) {
            self.advance();
            loop {
                body.push(self.applied_formula()?);
                if self.peek() == Some(&Tok::Comma) {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::Dot)?;
        Ok(EmpiricalClause {
            interval,
            head,
            body,
        })
    }

    fn program(&mut self) -> Result<EmpiricalProgram> {
        let mut context = Vec::new();
        let mut empirical = Vec::new();
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Ident(name) if name == "pred" => self.declaration()?,
                Tok::LBracket => empirical.push(self.empirical_clause()?),
                Tok::Ident(_) | Tok::Tilde => {
                    if let Some(clause) = self.context_clause()? {
                        context.push(clause);
                    }
                }
                other => {
                    let (line, col) = self.here();
                    return Err(parse_err(
                        line,
                        col,
                        format!("expected a statement, found {}", other.describe()),
                    ));
                }
            }
        }
        if !self.violations.is_empty() {
            return Err(Error::Invalid(std::mem::take(&mut self.violations)));
        }
        let program = EmpiricalProgram::new(
            Predicates::new(self.pred_names.iter().map(String::as_str)),
            context,
            empirical,
        );
        let violations = validate(&program);
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        Ok(program)
    }
}

fn lit_to_rule(l: &Lit) -> RuleLiteral {
    if l.negated {
        RuleLiteral::neg(l.predicate)
    } else {
        RuleLiteral::pos(l.predicate)
    }
}

fn lit_to_ground(l: Lit) -> GroundLiteral {
    let constant = match l.arg {
        Arg::Const(c) => c,
        Arg::Var => unreachable!("callers split variables from constants"),
    };
    GroundLiteral {
        negated: l.negated,
        predicate: l.predicate,
        constant,
    }
}

pub fn parse_program(text: &str) -> Result<EmpiricalProgram> {
    Parser::new(text)?.program()
}

/// Parse `Formula(constant)` against a known symbol table.
pub fn parse_query(text: &str, preds: &Predicates) -> Result<(ComplexPredicate, String)> {
    let mut p = Parser::with_predicates(text, preds)?;
    let f = p.formula()?;
    p.expect(Tok::LParen)?;
    let (line, col) = p.here();
    let subject = p.expect_ident("a constant")?;
    if subject == "X" {
        return Err(parse_err(line, col, "queries ask about a constant, not X"));
    }
    p.expect(Tok::RParen)?;
    if let Some(t) = p.peek() {
        let (line, col) = p.here();
        return Err(parse_err(
            line,
            col,
            format!("unexpected {} after the query", t.describe()),
        ));
    }
    if !p.violations.is_empty() {
        return Err(Error::Invalid(std::mem::take(&mut p.violations)));
    }
    Ok((ComplexPredicate::new(f), subject))
}

pub fn render_program(program: &EmpiricalProgram) -> String {
    let preds = &program.predicates;
    let mut out = String::new();
    for name in preds.iter() {
        out.push_str(&format!("pred {name}.\n"));
    }
    for clause in &program.context {
        out.push_str(&format!("{}.\n", clause.display(preds)));
    }
    for cl in &program.empirical {
        out.push_str(&format!("{}.\n", cl.display(preds)));
    }
    out
}

/// Interpretation files: a `domain` header, `constant -> element` bindings,
/// and per-element predicate listings (everything unlisted is false).
///
/// ```text
/// domain 5
/// joe -> 0
/// 0: Monk_seal Female
/// 1: Monk_seal
/// ```
pub fn parse_interpretation(text: &str, preds: &Predicates) -> Result<Interpretation> {
    let k = preds.len();
    let mut domain: Option<usize> = None;
    let mut cells: Vec<Option<usize>> = Vec::new();
    let mut constant_map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let n = match domain {
            None => {
                let [keyword, count] = words.as_slice() else {
                    return Err(parse_err(line_no, 1, "expected `domain <size>` first"));
                };
                if *keyword != "domain" {
                    return Err(parse_err(line_no, 1, "expected `domain <size>` first"));
                }
                let size: usize = count
                    .parse()
                    .map_err(|_| parse_err(line_no, 1, "domain size must be a number"))?;
                if size == 0 {
                    return Err(parse_err(line_no, 1, "the domain must be nonempty"));
                }
                domain = Some(size);
                cells = vec![None; size];
                continue;
            }
            Some(n) => n,
        };
        if words.len() == 3 && words[1] == "->" {
            let element: usize = words[2]
                .parse()
                .map_err(|_| parse_err(line_no, 1, "element must be a number"))?;
            if element >= n {
                return Err(parse_err(
                    line_no,
                    1,
                    format!("element {element} outside domain 0..{n}"),
                ));
            }
            if constant_map.insert(words[0].to_string(), element).is_some() {
                return Err(parse_err(
                    line_no,
                    1,
                    format!("constant {} bound twice", words[0]),
                ));
            }
            continue;
        }
        let Some(idx_text) = words.first().and_then(|w| w.strip_suffix(':')) else {
            return Err(parse_err(
                line_no,
                1,
                "expected `constant -> element` or `element: Pred ...`",
            ));
        };
        let element: usize = idx_text
            .parse()
            .map_err(|_| parse_err(line_no, 1, "element must be a number"))?;
        if element >= n {
            return Err(parse_err(
                line_no,
                1,
                format!("element {element} outside domain 0..{n}"),
            ));
        }
        if cells[element].is_some() {
            return Err(parse_err(
                line_no,
                1,
                format!("element {element} listed twice"),
            ));
        }
        let mut true_set = BTreeSet::new();
        for word in &words[1..] {
            let Some(p) = preds.index_of(word) else {
                return Err(parse_err(
                    line_no,
                    1,
                    format!("predicate {word} is not declared"),
                ));
            };
            true_set.insert(p);
        }
        cells[element] = Some(crate::model::cell_of_predicates(&true_set, k));
    }
    if domain.is_none() {
        return Err(parse_err(1, 1, "expected `domain <size>` first"));
    }
    let all_false = crate::model::cell_of_predicates(&BTreeSet::new(), k);
    let cells: Vec<usize> = cells.into_iter().map(|c| c.unwrap_or(all_false)).collect();
    Interpretation::new(k, cells, constant_map)
}

pub fn render_interpretation(interp: &Interpretation, preds: &Predicates) -> String {
    let k = preds.len();
    let mut out = format!("domain {}\n", interp.domain_size());
    for (name, &element) in interp.constant_map() {
        out.push_str(&format!("{name} -> {element}\n"));
    }
    for element in 0..interp.domain_size() {
        let names: Vec<&str> = cell_predicates(interp.cell_of_element(element), k)
            .into_iter()
            .map(|p| preds.name(p))
            .collect();
        out.push_str(&format!("{element}: {}\n", names.join(" ")));
    }
    out
}

fn empirical_statement(cl: &EmpiricalClause, preds: &Predicates) -> String {
    // Saturated clauses carry `true` for what the surface syntax writes as
    // a null body; render it back as one.
    if cl.body.len() == 1 && matches!(cl.body[0].formula(), Formula::Top) {
        format!("{} {}(X).", cl.interval, cl.head.display(preds))
    } else {
        format!("{}.", cl.display(preds))
    }
}

/// Compiled artifacts are two labelled sections of ordinary program syntax.
pub fn render_artifact(comp: &CompiledProgram) -> String {
    let mut out = String::from("%% program\n");
    out.push_str(&render_program(&comp.source));
    out.push_str("%% clauses\n");
    for cl in &comp.clauses {
        out.push_str(&empirical_statement(cl, &comp.source.predicates));
        out.push('\n');
    }
    out
}

pub fn parse_artifact(text: &str) -> Result<CompiledProgram> {
    let mut program_text = String::new();
    let mut clause_text = String::new();
    let mut section: Option<&mut String> = None;
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed == "%% program" {
            section = Some(&mut program_text);
        } else if trimmed == "%% clauses" {
            section = Some(&mut clause_text);
        } else if let Some(s) = section.as_deref_mut() {
            s.push_str(raw);
            s.push('\n');
        } else if !trimmed.is_empty() && !trimmed.starts_with('%') {
            return Err(parse_err(
                i + 1,
                1,
                "artifacts start with a `%% program` section",
            ));
        }
    }
    if section.is_none() {
        return Err(parse_err(1, 1, "artifacts start with a `%% program` section"));
    }
    let program = parse_program(&program_text)?;
    let mut p = Parser::with_predicates(&clause_text, &program.predicates)?;
    let mut clauses = Vec::new();
    while p.peek().is_some() {
        clauses.push(p.empirical_clause()?);
    }
    if !p.violations.is_empty() {
        return Err(Error::Invalid(std::mem::take(&mut p.violations)));
    }
    assemble(&program, &clauses)
}
