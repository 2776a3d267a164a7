//! Propositional formulas over a finite, ordered universe of atoms.
//!
//! Concrete syntax (loosest binding first):
//!
//! | operator | ASCII        | associativity |
//! |----------|--------------|---------------|
//! | iff      | `<->`        | left          |
//! | implies  | `->`         | right         |
//! | or       | `\|`         | left          |
//! | and      | `&`          | left          |
//! | not      | `!` or `not` | prefix        |
//!
//! Constants are `true` and `false`; atoms match `[A-Za-z_][A-Za-z0-9_]*`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::worlds::{World, WorldSet};

/// Largest universe for which worlds are enumerated exhaustively.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// Hard ceiling for explicit caps; a world set over 30 atoms is a 128 MiB bitmap.
pub const MAX_ENUMERATION_CAP: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("invalid atom name `{0}`")]
    InvalidAtomName(String),
    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),
    #[error("formula mentions atom #{atom} but the world has only {width} atoms")]
    UniverseMismatch { atom: usize, width: usize },
    #[error("universe of {atoms} atoms exceeds the enumeration cap of {cap}")]
    UniverseTooLarge { atoms: usize, cap: usize },
    #[error("line {line}: {source}")]
    KnowledgeBase {
        line: usize,
        #[source]
        source: Box<FormulaError>,
    },
}

/// Index of an atom within its [`AtomUniverse`]; bit `i` of a [`World`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(usize);

impl Atom {
    pub const fn new(index: usize) -> Self {
        Atom(index)
    }

    pub const fn index(self) -> usize {
        self.0
    }
}

/// Ordered list of atom names.
///
/// An extensible universe interns unknown names while parsing; a frozen one
/// rejects them with [`FormulaError::UnknownAtom`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomUniverse {
    names: Vec<String>,
    index: HashMap<String, usize>,
    extensible: bool,
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_keyword(name: &str) -> bool {
    matches!(name, "not" | "true" | "false")
}

impl AtomUniverse {
    /// An empty universe that grows as formulas are parsed.
    pub fn extensible() -> Self {
        AtomUniverse {
            extensible: true,
            ..Default::default()
        }
    }

    /// A fixed universe; parsing fails on names outside `names`.
    pub fn frozen<I, S>(names: I) -> Result<Self, FormulaError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut u = AtomUniverse::extensible();
        for name in names {
            let name = name.into();
            if u.index.contains_key(&name) {
                return Err(FormulaError::DuplicateAtom(name));
            }
            u.intern(&name)?;
        }
        u.extensible = false;
        Ok(u)
    }

    pub fn freeze(&mut self) {
        self.extensible = false;
    }

    pub fn is_extensible(&self) -> bool {
        self.extensible
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, atom: Atom) -> Option<&str> {
        self.names.get(atom.0).map(String::as_str)
    }

    pub fn lookup(&self, name: &str) -> Option<Atom> {
        self.index.get(name).copied().map(Atom)
    }

    /// Returns the atom for `name`, adding it when the universe is extensible.
    pub fn intern(&mut self, name: &str) -> Result<Atom, FormulaError> {
        if let Some(atom) = self.lookup(name) {
            return Ok(atom);
        }
        if !is_identifier(name) || is_keyword(name) {
            return Err(FormulaError::InvalidAtomName(name.to_string()));
        }
        if !self.extensible {
            return Err(FormulaError::UnknownAtom(name.to_string()));
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        Ok(Atom(i))
    }
}

/// Immutable propositional formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

// Truth patterns of the six low atoms across 64 consecutive world indices.
const LOW_ATOM_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

impl Formula {
    pub fn atom(index: usize) -> Self {
        Formula::Atom(Atom(index))
    }

    pub fn negate(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(f: Formula, g: Formula) -> Self {
        Formula::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: Formula, g: Formula) -> Self {
        Formula::Or(Box::new(f), Box::new(g))
    }

    pub fn implies(f: Formula, g: Formula) -> Self {
        Formula::Implies(Box::new(f), Box::new(g))
    }

    pub fn iff(f: Formula, g: Formula) -> Self {
        Formula::Iff(Box::new(f), Box::new(g))
    }

    /// `atom` if `value`, else `!atom`.
    pub fn literal(index: usize, value: bool) -> Self {
        if value {
            Formula::atom(index)
        } else {
            Formula::negate(Formula::atom(index))
        }
    }

    /// Highest atom index mentioned, if any.
    pub fn max_atom(&self) -> Option<usize> {
        match self {
            Formula::True | Formula::False => None,
            Formula::Atom(a) => Some(a.0),
            Formula::Not(f) => f.max_atom(),
            Formula::And(f, g)
            | Formula::Or(f, g)
            | Formula::Implies(f, g)
            | Formula::Iff(f, g) => f.max_atom().max(g.max_atom()),
        }
    }

    /// Errors unless every atom is below `width`.
    pub fn check_width(&self, width: usize) -> Result<(), FormulaError> {
        match self.max_atom() {
            Some(atom) if atom >= width => Err(FormulaError::UniverseMismatch { atom, width }),
            _ => Ok(()),
        }
    }

    /// Classical truth value under the valuation `value_of`.
    pub fn eval_with<F: Fn(usize) -> bool>(&self, value_of: &F) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => value_of(a.0),
            Formula::Not(f) => !f.eval_with(value_of),
            Formula::And(f, g) => f.eval_with(value_of) && g.eval_with(value_of),
            Formula::Or(f, g) => f.eval_with(value_of) || g.eval_with(value_of),
            Formula::Implies(f, g) => !f.eval_with(value_of) || g.eval_with(value_of),
            Formula::Iff(f, g) => f.eval_with(value_of) == g.eval_with(value_of),
        }
    }

    /// Truth value in `world`; the caller guarantees the width fits.
    pub fn holds_in(&self, world: &World) -> bool {
        self.eval_with(&|i| world.get(i))
    }

    /// Evaluates the formula on the 64 worlds with indices `base..base + 64`
    /// at once; bit `t` of the result is the value at world `base + t`.
    /// `base` must be a multiple of 64.
    fn eval_block(&self, base: u64) -> u64 {
        match self {
            Formula::True => !0,
            Formula::False => 0,
            Formula::Atom(a) => {
                let i = a.0;
                if i < 6 {
                    LOW_ATOM_PATTERNS[i]
                } else if i < 64 && (base >> i) & 1 == 1 {
                    !0
                } else {
                    0
                }
            }
            Formula::Not(f) => !f.eval_block(base),
            Formula::And(f, g) => f.eval_block(base) & g.eval_block(base),
            Formula::Or(f, g) => f.eval_block(base) | g.eval_block(base),
            Formula::Implies(f, g) => !f.eval_block(base) | g.eval_block(base),
            Formula::Iff(f, g) => !(f.eval_block(base) ^ g.eval_block(base)),
        }
    }

    /// Renders with the names in `universe`, using the minimum parentheses
    /// needed to parse back to the same tree.
    pub fn display<'a>(&'a self, universe: &'a AtomUniverse) -> DisplayFormula<'a> {
        DisplayFormula {
            formula: self,
            universe,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(..) => 5,
            Formula::True | Formula::False | Formula::Atom(_) => 6,
        }
    }
}

impl std::ops::Not for Formula {
    type Output = Formula;

    fn not(self) -> Formula {
        Formula::negate(self)
    }
}

pub struct DisplayFormula<'a> {
    formula: &'a Formula,
    universe: &'a AtomUniverse,
}

impl DisplayFormula<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, node: &Formula, min_prec: u8) -> fmt::Result {
        let wrap = node.precedence() < min_prec;
        if wrap {
            f.write_str("(")?;
        }
        match node {
            Formula::True => f.write_str("true")?,
            Formula::False => f.write_str("false")?,
            Formula::Atom(a) => match self.universe.name(*a) {
                Some(name) => f.write_str(name)?,
                None => write!(f, "#{}", a.0)?,
            },
            Formula::Not(g) => {
                f.write_str("!")?;
                self.write(f, g, 5)?;
            }
            Formula::And(l, r) => self.binary(f, l, r, " & ", 4, 5)?,
            Formula::Or(l, r) => self.binary(f, l, r, " | ", 3, 4)?,
            Formula::Implies(l, r) => self.binary(f, l, r, " -> ", 3, 2)?,
            Formula::Iff(l, r) => self.binary(f, l, r, " <-> ", 1, 2)?,
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }

    fn binary(
        &self,
        f: &mut fmt::Formatter<'_>,
        l: &Formula,
        r: &Formula,
        op: &str,
        lp: u8,
        rp: u8,
    ) -> fmt::Result {
        self.write(f, l, lp)?;
        f.write_str(op)?;
        self.write(f, r, rp)
    }
}

impl fmt::Display for DisplayFormula<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.formula, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    True,
    False,
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'!' => {
                i += 1;
                Token::Not
            }
            b'&' => {
                i += 1;
                Token::And
            }
            b'|' => {
                i += 1;
                Token::Or
            }
            b'(' => {
                i += 1;
                Token::LParen
            }
            b')' => {
                i += 1;
                Token::RParen
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Token::Implies
            }
            b'<' if text[i..].starts_with("<->") => {
                i += 3;
                Token::Iff
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                match &text[start..i] {
                    "not" => Token::Not,
                    "true" => Token::True,
                    "false" => Token::False,
                    word => Token::Ident(word.to_string()),
                }
            }
            _ => {
                return Err(FormulaError::Syntax {
                    position: i,
                    expected: "an atom, constant, operator or parenthesis".into(),
                })
            }
        };
        out.push((tok, start));
    }
    Ok(out)
}

struct Parser<'u> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
    universe: &'u mut AtomUniverse,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |&(_, p)| p)
    }

    fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> FormulaError {
        FormulaError::Syntax {
            position: self.offset(),
            expected: expected.to_string(),
        }
    }

    fn iff(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.implies()?;
        while self.eat(&Token::Iff) {
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or()?;
        if self.eat(&Token::Implies) {
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.and()?;
        while self.eat(&Token::Or) {
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while self.eat(&Token::And) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        if self.eat(&Token::Not) {
            return Ok(Formula::negate(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, FormulaError> {
        let Some((tok, _)) = self.tokens.get(self.pos).cloned() else {
            return Err(self.error("an atom, constant, `!` or `(`"));
        };
        match tok {
            Token::True => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Token::False => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Token::Ident(name) => {
                let atom = self.universe.intern(&name)?;
                self.pos += 1;
                Ok(Formula::Atom(atom))
            }
            Token::LParen => {
                self.pos += 1;
                let inner = self.iff()?;
                if !self.eat(&Token::RParen) {
                    return Err(self.error("`)`"));
                }
                Ok(inner)
            }
            _ => Err(self.error("an atom, constant, `!` or `(`")),
        }
    }
}

/// Parses `text` into a formula, resolving atoms in `universe`.
pub fn parse_formula(text: &str, universe: &mut AtomUniverse) -> Result<Formula, FormulaError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        universe,
    };
    let f = p.iff()?;
    if p.pos != p.tokens.len() {
        return Err(p.error("an operator or end of input"));
    }
    Ok(f)
}

/// Parses a knowledge base: one formula per line, `#` starts a comment,
/// blank lines are skipped. Errors carry the 1-based line number.
pub fn parse_knowledge_base(
    text: &str,
    universe: &mut AtomUniverse,
) -> Result<Vec<Formula>, FormulaError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let f = parse_formula(body, universe).map_err(|e| FormulaError::KnowledgeBase {
            line: n + 1,
            source: Box::new(e),
        })?;
        out.push(f);
    }
    Ok(out)
}

/// Truth value of `f` in `w`.
pub fn evaluate(f: &Formula, w: &World) -> Result<bool, FormulaError> {
    f.check_width(w.width())?;
    Ok(f.holds_in(w))
}

/// All worlds over `universe` satisfying every formula in `gamma`.
pub fn models_of(gamma: &[Formula], universe: &AtomUniverse) -> Result<WorldSet, FormulaError> {
    models_of_width(gamma, universe.len(), DEFAULT_ENUMERATION_CAP)
}

/// [`models_of`] for a bare world width and an explicit enumeration cap.
pub fn models_of_width(
    gamma: &[Formula],
    width: usize,
    cap: usize,
) -> Result<WorldSet, FormulaError> {
    let cap = cap.min(MAX_ENUMERATION_CAP);
    if width > cap {
        return Err(FormulaError::UniverseTooLarge { atoms: width, cap });
    }
    for f in gamma {
        f.check_width(width)?;
    }
    let mut set = WorldSet::empty(width);
    let n_worlds = 1u64 << width;
    let tail_mask = if n_worlds >= 64 {
        !0
    } else {
        (1u64 << n_worlds) - 1
    };
    for (block, word) in set.words_mut().iter_mut().enumerate() {
        let base = block as u64 * 64;
        let mut bits = tail_mask;
        for f in gamma {
            bits &= f.eval_block(base);
            if bits == 0 {
                break;
            }
        }
        *word = bits;
    }
    Ok(set)
}
