//! Parser for the line-oriented model grammar.
//!
//! Statements are terminated by `;` (or by `}` for the brace-block forms),
//! `#` starts a comment running to end of line, and identifiers must be
//! declared before they are referenced. Automaton declarations (`clocks`,
//! `events`, `location`, `edge`) must precede configuration statements
//! (`obs`, `secret`, `budget`, `check`).
//!
//! ```text
//! clocks x;
//! events a, b;
//! location l0 init;
//! location l1 invariant x <= 5;
//! edge l0 -> l1 on a when x == 1 reset x;
//! obs cfg1 { locations: l1; clocks: ; events: a; }
//! secret s1 = trailing_delay_gt(10, after a);
//! budget b1 { steps: 6; grid: 1, 2, 100; zero_delay: true; }
//! check ebto(s1, cfg1, b1);
//! ```

use std::collections::BTreeMap;

use thiserror::Error;

use opacheck_core::{
    parse_rational, rat, validate_evolution, Action, ClockConstraint, ClockId, ClockValuation,
    CmpOp, EnumerationBudget, EtoSpec, EventId, Evolution, LocationId, ObservationConfig,
    PredicateArg, PredicateCall, Rational, SecretSpec, State, TimedAutomaton,
    TimedAutomatonBuilder, TimedLanguageSpec, TimedWord,
};

use crate::document::{CheckKind, CheckRequest, ModelDocument};

/// A parse or resolution error with its source position.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    Comma,
    Semi,
    Colon,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Arrow,     // ->
    StepOpen,  // --
    StepClose, // -->
    Minus,     // -
    Assign,    // =
    EqEq,      // ==
    Le,
    Ge,
    Lt,
    Gt,
    Slash,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::StepOpen => "`--`".into(),
            Tok::StepClose => "`-->`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Assign => "`=`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Slash => "`/`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let (tline, tcol) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                col += i - start;
                out.push(Token {
                    tok: Tok::Ident(word.to_string()),
                    line: tline,
                    col: tcol,
                });
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    if i + 1 < bytes.len() && (bytes[i + 1] as char).is_ascii_digit() {
                        i += 1;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    } else {
                        return Err(ParseError::new(tline, tcol, "malformed number"));
                    }
                }
                let word = &text[start..i];
                col += i - start;
                out.push(Token {
                    tok: Tok::Number(word.to_string()),
                    line: tline,
                    col: tcol,
                });
            }
            '-' => {
                let rest = &bytes[i..];
                let tok = if rest.starts_with(b"-->") {
                    advance(3, &mut i, &mut col);
                    Tok::StepClose
                } else if rest.starts_with(b"--") {
                    advance(2, &mut i, &mut col);
                    Tok::StepOpen
                } else if rest.starts_with(b"->") {
                    advance(2, &mut i, &mut col);
                    Tok::Arrow
                } else {
                    advance(1, &mut i, &mut col);
                    Tok::Minus
                };
                out.push(Token {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
            '=' => {
                let tok = if bytes[i..].starts_with(b"==") {
                    advance(2, &mut i, &mut col);
                    Tok::EqEq
                } else {
                    advance(1, &mut i, &mut col);
                    Tok::Assign
                };
                out.push(Token {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
            '<' => {
                let tok = if bytes[i..].starts_with(b"<=") {
                    advance(2, &mut i, &mut col);
                    Tok::Le
                } else {
                    advance(1, &mut i, &mut col);
                    Tok::Lt
                };
                out.push(Token {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
            '>' => {
                let tok = if bytes[i..].starts_with(b">=") {
                    advance(2, &mut i, &mut col);
                    Tok::Ge
                } else {
                    advance(1, &mut i, &mut col);
                    Tok::Gt
                };
                out.push(Token {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
            _ => {
                let tok = match c {
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    ':' => Tok::Colon,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '/' => Tok::Slash,
                    other => {
                        return Err(ParseError::new(
                            tline,
                            tcol,
                            format!("unexpected character `{other}`"),
                        ))
                    }
                };
                advance(1, &mut i, &mut col);
                out.push(Token {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
        }
    }
    Ok(out)
}

/// Parses a model file into a resolved document.
pub fn parse_model(text: &str) -> Result<ModelDocument, ParseError> {
    Parser::new(text)?.parse()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    // automaton accumulation; replaced by the built automaton at the first
    // configuration statement
    builder: Option<TimedAutomatonBuilder>,
    clock_ids: BTreeMap<String, ClockId>,
    event_ids: BTreeMap<String, EventId>,
    location_ids: BTreeMap<String, LocationId>,
    initial: Option<String>,
    automaton: Option<TimedAutomaton>,
    obs_configs: Vec<(String, ObservationConfig)>,
    secrets: Vec<(String, SecretSpec)>,
    budgets: Vec<(String, EnumerationBudget)>,
    checks: Vec<CheckRequest>,
    checks_per_kind: BTreeMap<&'static str, usize>,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: tokenize(text)?,
            pos: 0,
            builder: Some(TimedAutomatonBuilder::new()),
            clock_ids: BTreeMap::new(),
            event_ids: BTreeMap::new(),
            location_ids: BTreeMap::new(),
            initial: None,
            automaton: None,
            obs_configs: Vec::new(),
            secrets: Vec::new(),
            budgets: Vec::new(),
            checks: Vec::new(),
            checks_per_kind: BTreeMap::new(),
        })
    }

    fn here(&self) -> (usize, usize) {
        match self.tokens.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => self
                .tokens
                .last()
                .map(|t| (t.line, t.col + 1))
                .unwrap_or((1, 1)),
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::new(line, col, message)
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self, what: &str) -> Result<Tok, ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.tok.clone())
            }
            None => Err(self.err(format!("unexpected end of file, expected {what}"))),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        let got = match self.tokens.get(self.pos) {
            Some(t) => t,
            None => {
                return Err(self.err(format!(
                    "unexpected end of file, expected {}",
                    tok.describe()
                )))
            }
        };
        if got.tok == tok {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!(
                "expected {}, found {}",
                tok.describe(),
                got.tok.describe()
            )))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.next(what)? {
            Tok::Ident(s) => Ok(s),
            other => {
                self.pos -= 1;
                Err(self.err(format!("expected {what}, found {}", other.describe())))
            }
        }
    }

    /// Accepts the keyword iff the next token is exactly that identifier.
    fn eat_keyword(&mut self, word: &str) -> bool {
        if let Some(Tok::Ident(s)) = self.peek() {
            if s == word {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn expect_keyword(&mut self, word: &str) -> Result<(), ParseError> {
        if self.eat_keyword(word) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{word}`")))
        }
    }

    fn natural(&mut self, what: &str) -> Result<u64, ParseError> {
        match self.next(what)? {
            Tok::Number(s) if !s.contains('.') => s.parse().map_err(|_| {
                self.pos -= 1;
                self.err(format!("{what} is out of range"))
            }),
            other => {
                self.pos -= 1;
                Err(self.err(format!("expected {what}, found {}", other.describe())))
            }
        }
    }

    /// A non-negative rational literal: `7`, `3/2`, or `1.5`.
    fn rational(&mut self, what: &str) -> Result<Rational, ParseError> {
        match self.next(what)? {
            Tok::Number(first) => {
                let literal = if self.eat(&Tok::Slash) {
                    match self.next("denominator")? {
                        Tok::Number(second) => format!("{first}/{second}"),
                        other => {
                            self.pos -= 1;
                            return Err(
                                self.err(format!("expected denominator, found {}", other.describe()))
                            );
                        }
                    }
                } else {
                    first
                };
                parse_rational(&literal).map_err(|e| self.err(e.to_string()))
            }
            other => {
                self.pos -= 1;
                Err(self.err(format!("expected {what}, found {}", other.describe())))
            }
        }
    }

    fn parse(mut self) -> Result<ModelDocument, ParseError> {
        while self.peek().is_some() {
            let keyword = self.ident("a statement keyword")?;
            match keyword.as_str() {
                "clocks" => self.parse_clocks()?,
                "events" => self.parse_events()?,
                "location" => self.parse_location()?,
                "edge" => self.parse_edge()?,
                "obs" => self.parse_obs()?,
                "secret" => self.parse_secret()?,
                "budget" => self.parse_budget()?,
                "check" => self.parse_check()?,
                other => {
                    self.pos -= 1;
                    return Err(self.err(format!("unknown statement `{other}`")));
                }
            }
        }
        self.finish_automaton()?;
        let automaton = self.automaton.take().expect("automaton built");
        Ok(ModelDocument {
            automaton,
            obs_configs: self.obs_configs,
            secrets: self.secrets,
            budgets: self.budgets,
            checks: self.checks,
        })
    }

    fn builder_mut(&mut self) -> Result<&mut TimedAutomatonBuilder, ParseError> {
        if self.builder.is_none() {
            return Err(self.err(
                "automaton declarations must precede obs/secret/budget/check statements",
            ));
        }
        Ok(self.builder.as_mut().expect("checked above"))
    }

    fn finish_automaton(&mut self) -> Result<(), ParseError> {
        if self.automaton.is_some() {
            return Ok(());
        }
        let builder = self.builder.take().expect("builder present before build");
        match builder.build() {
            Ok(ta) => {
                self.automaton = Some(ta);
                Ok(())
            }
            Err(e) => Err(self.err(e.to_string())),
        }
    }

    fn declare_name(
        &mut self,
        kind: &'static str,
        name: &str,
    ) -> Result<(), ParseError> {
        let clash = match kind {
            "clock" => self.clock_ids.contains_key(name),
            "event" => self.event_ids.contains_key(name),
            "location" => self.location_ids.contains_key(name),
            _ => unreachable!(),
        };
        if clash {
            Err(self.err(format!("duplicate {kind} name `{name}`")))
        } else {
            Ok(())
        }
    }

    fn parse_clocks(&mut self) -> Result<(), ParseError> {
        loop {
            if self.eat(&Tok::Semi) {
                return Ok(());
            }
            let name = self.ident("a clock name")?;
            self.pos -= 1;
            self.declare_name("clock", &name)?;
            self.pos += 1;
            let id = self.builder_mut()?.clock(&name);
            self.clock_ids.insert(name, id);
            if !self.eat(&Tok::Comma) {
                self.expect(Tok::Semi)?;
                return Ok(());
            }
        }
    }

    fn parse_events(&mut self) -> Result<(), ParseError> {
        loop {
            if self.eat(&Tok::Semi) {
                return Ok(());
            }
            let name = self.ident("an event name")?;
            self.pos -= 1;
            self.declare_name("event", &name)?;
            self.pos += 1;
            let id = self.builder_mut()?.event(&name);
            self.event_ids.insert(name, id);
            if !self.eat(&Tok::Comma) {
                self.expect(Tok::Semi)?;
                return Ok(());
            }
        }
    }

    fn parse_location(&mut self) -> Result<(), ParseError> {
        let name = self.ident("a location name")?;
        self.pos -= 1;
        self.declare_name("location", &name)?;
        self.pos += 1;
        let id = self.builder_mut()?.location(&name);
        self.location_ids.insert(name.clone(), id);
        loop {
            if self.eat(&Tok::Semi) {
                return Ok(());
            }
            if self.eat_keyword("init") {
                if let Some(first) = &self.initial {
                    let first = first.clone();
                    self.pos -= 1;
                    return Err(self.err(format!(
                        "timed automata are restricted to a single initial location; \
                         `{first}` is already initial"
                    )));
                }
                self.initial = Some(name.clone());
                self.builder_mut()?.initial(id);
            } else if self.eat_keyword("invariant") {
                let at = self.here();
                let constraint = self.parse_constraint()?;
                if constraint.has_disjunction() {
                    return Err(ParseError::new(
                        at.0,
                        at.1,
                        format!(
                            "invariant of location `{name}` contains `or`; invariants must \
                             stay convex along time elapse, so disjunctions are rejected"
                        ),
                    ));
                }
                self.builder_mut()?.invariant(id, constraint);
            } else {
                return Err(self.err("expected `init`, `invariant`, or `;`"));
            }
        }
    }

    fn lookup_clock(&self, name: &str) -> Option<ClockId> {
        match &self.automaton {
            Some(ta) => ta.clock_id(name),
            None => self.clock_ids.get(name).copied(),
        }
    }

    fn lookup_event(&self, name: &str) -> Option<EventId> {
        match &self.automaton {
            Some(ta) => ta.event_id(name),
            None => self.event_ids.get(name).copied(),
        }
    }

    fn lookup_location(&self, name: &str) -> Option<LocationId> {
        match &self.automaton {
            Some(ta) => ta.location_id(name),
            None => self.location_ids.get(name).copied(),
        }
    }

    fn clock_ref(&mut self, what: &str) -> Result<ClockId, ParseError> {
        let name = self.ident(what)?;
        self.pos -= 1;
        let id = self
            .lookup_clock(&name)
            .ok_or_else(|| self.err(format!("undeclared clock `{name}`")))?;
        self.pos += 1;
        Ok(id)
    }

    fn event_ref(&mut self, what: &str) -> Result<EventId, ParseError> {
        let name = self.ident(what)?;
        self.pos -= 1;
        let id = self
            .lookup_event(&name)
            .ok_or_else(|| self.err(format!("undeclared event `{name}`")))?;
        self.pos += 1;
        Ok(id)
    }

    fn location_ref(&mut self, what: &str) -> Result<LocationId, ParseError> {
        let name = self.ident(what)?;
        self.pos -= 1;
        let id = self
            .lookup_location(&name)
            .ok_or_else(|| self.err(format!("undeclared location `{name}`")))?;
        self.pos += 1;
        Ok(id)
    }

    fn parse_edge(&mut self) -> Result<(), ParseError> {
        let source = self.location_ref("a source location")?;
        self.expect(Tok::Arrow)?;
        let target = self.location_ref("a target location")?;
        self.expect_keyword("on")?;
        let event = self.event_ref("an event")?;
        let guard = if self.eat_keyword("when") {
            self.parse_constraint()?
        } else {
            ClockConstraint::tt()
        };
        let mut resets = Vec::new();
        if self.eat_keyword("reset") {
            loop {
                resets.push(self.clock_ref("a clock to reset")?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::Semi)?;
        self.builder_mut()?
            .edge(source, event, guard, resets, target);
        Ok(())
    }

    fn parse_constraint(&mut self) -> Result<ClockConstraint, ParseError> {
        let mut lhs = self.parse_conjunction()?;
        while self.eat_keyword("or") {
            let rhs = self.parse_conjunction()?;
            lhs = ClockConstraint::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_conjunction(&mut self) -> Result<ClockConstraint, ParseError> {
        let mut lhs = self.parse_atom()?;
        while self.eat_keyword("and") {
            let rhs = self.parse_atom()?;
            lhs = ClockConstraint::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_atom(&mut self) -> Result<ClockConstraint, ParseError> {
        if self.eat_keyword("true") {
            return Ok(ClockConstraint::tt());
        }
        if self.eat(&Tok::LParen) {
            let inner = self.parse_constraint()?;
            self.expect(Tok::RParen)?;
            return Ok(inner);
        }
        let clock = self.clock_ref("a clock")?;
        let subtrahend = if self.eat(&Tok::Minus) {
            Some(self.clock_ref("a clock")?)
        } else {
            None
        };
        let op = match self.next("a comparison operator")? {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::EqEq => CmpOp::Eq,
            Tok::Ge => CmpOp::Ge,
            Tok::Gt => CmpOp::Gt,
            other => {
                self.pos -= 1;
                return Err(self.err(format!(
                    "expected a comparison operator (`<`, `<=`, `==`, `>=`, `>`), found {}",
                    other.describe()
                )));
            }
        };
        let at = self.here();
        let bound = match self.next("a constant")? {
            Tok::Number(s) => {
                if s.contains('.') || self.peek() == Some(&Tok::Slash) {
                    return Err(ParseError::new(
                        at.0,
                        at.1,
                        "constraint constants must be natural numbers",
                    ));
                }
                s.parse::<u64>().map_err(|_| {
                    ParseError::new(at.0, at.1, "constraint constant is out of range")
                })?
            }
            other => {
                self.pos -= 1;
                return Err(self.err(format!(
                    "expected a natural constant, found {}",
                    other.describe()
                )));
            }
        };
        Ok(match subtrahend {
            None => ClockConstraint::cmp(clock, op, bound),
            Some(sub) => ClockConstraint::diff(clock, sub, op, bound),
        })
    }

    fn unique_config_name(
        &mut self,
        kind: &'static str,
        name: &str,
    ) -> Result<(), ParseError> {
        let clash = match kind {
            "obs" => self.obs_configs.iter().any(|(n, _)| n == name),
            "secret" => self.secrets.iter().any(|(n, _)| n == name),
            "budget" => self.budgets.iter().any(|(n, _)| n == name),
            "check" => self.checks.iter().any(|c| c.name == name),
            _ => unreachable!(),
        };
        if clash {
            Err(self.err(format!("duplicate {kind} name `{name}`")))
        } else {
            Ok(())
        }
    }

    fn ident_list_until_semi(&mut self, what: &str) -> Result<Vec<String>, ParseError> {
        let mut names = Vec::new();
        if self.eat(&Tok::Semi) {
            return Ok(names);
        }
        loop {
            names.push(self.ident(what)?);
            if !self.eat(&Tok::Comma) {
                self.expect(Tok::Semi)?;
                return Ok(names);
            }
        }
    }

    fn parse_obs(&mut self) -> Result<(), ParseError> {
        let name = self.ident("an observation config name")?;
        self.pos -= 1;
        self.unique_config_name("obs", &name)?;
        self.pos += 1;
        self.finish_automaton()?;
        self.expect(Tok::LBrace)?;
        self.expect_keyword("locations")?;
        self.expect(Tok::Colon)?;
        let location_names = self.ident_list_until_semi("a location name")?;
        self.expect_keyword("clocks")?;
        self.expect(Tok::Colon)?;
        let clock_names = self.ident_list_until_semi("a clock name")?;
        self.expect_keyword("events")?;
        self.expect(Tok::Colon)?;
        let event_names = self.ident_list_until_semi("an event name")?;
        self.expect(Tok::RBrace)?;

        let mut locations = Vec::new();
        for n in &location_names {
            locations.push(
                self.lookup_location(n)
                    .ok_or_else(|| self.err(format!("undeclared location `{n}`")))?,
            );
        }
        let mut clocks = Vec::new();
        for n in &clock_names {
            clocks.push(
                self.lookup_clock(n)
                    .ok_or_else(|| self.err(format!("undeclared clock `{n}`")))?,
            );
        }
        let mut events = Vec::new();
        for n in &event_names {
            events.push(
                self.lookup_event(n)
                    .ok_or_else(|| self.err(format!("undeclared event `{n}`")))?,
            );
        }
        let ta = self.automaton.as_ref().expect("automaton built");
        let cfg = ObservationConfig::new(ta, locations, clocks, events)
            .expect("ids resolved against this automaton");
        self.obs_configs.push((name, cfg));
        Ok(())
    }

    fn parse_secret(&mut self) -> Result<(), ParseError> {
        let name = self.ident("a secret name")?;
        self.pos -= 1;
        self.unique_config_name("secret", &name)?;
        self.pos += 1;
        self.finish_automaton()?;
        self.expect(Tok::Assign)?;
        let kind = self.ident("a secret kind")?;
        let spec = match kind.as_str() {
            "location_visit" => {
                self.expect(Tok::LParen)?;
                let location = self.location_ref("a location")?;
                self.expect(Tok::RParen)?;
                SecretSpec::LocationVisit(location)
            }
            "word_in_list" => {
                let words = self.parse_word_block()?;
                SecretSpec::WordInLanguage(TimedLanguageSpec::FiniteList(words))
            }
            "word_prefix_of" => {
                self.expect(Tok::LParen)?;
                let word = self.parse_word()?;
                self.expect(Tok::RParen)?;
                SecretSpec::WordInLanguage(TimedLanguageSpec::Predicate(PredicateCall {
                    name: "word_prefix_of".to_string(),
                    args: vec![PredicateArg::Word(word)],
                }))
            }
            "event_count_eq" => {
                self.expect(Tok::LParen)?;
                let event = self.event_ref("an event")?;
                self.expect(Tok::Comma)?;
                let count = self.natural("a count")?;
                self.expect(Tok::RParen)?;
                SecretSpec::WordInLanguage(TimedLanguageSpec::Predicate(PredicateCall {
                    name: "event_count_eq".to_string(),
                    args: vec![PredicateArg::Event(event), PredicateArg::Count(count)],
                }))
            }
            "trailing_delay_gt" => {
                self.expect(Tok::LParen)?;
                let at = self.here();
                let threshold = self.rational("a threshold")?;
                if threshold <= rat(0) {
                    return Err(ParseError::new(
                        at.0,
                        at.1,
                        "trailing-delay threshold must be positive",
                    ));
                }
                self.expect(Tok::Comma)?;
                self.expect_keyword("after")?;
                let after_event = self.event_ref("an event")?;
                self.expect(Tok::RParen)?;
                SecretSpec::TrailingDelayGreater {
                    threshold,
                    after_event,
                }
            }
            "private_run" => {
                self.expect(Tok::LParen)?;
                let private = self.location_ref("a private location")?;
                self.expect(Tok::Comma)?;
                let final_location = self.location_ref("a final location")?;
                self.expect(Tok::RParen)?;
                let ta = self.automaton.as_ref().expect("automaton built");
                let spec = EtoSpec::new(ta, private, final_location)
                    .expect("ids resolved against this automaton");
                SecretSpec::PrivateRun(spec)
            }
            "evolutions" => {
                let list = self.parse_evolution_block()?;
                SecretSpec::ExplicitList(list)
            }
            other => {
                self.pos -= 1;
                return Err(self.err(format!(
                    "unknown secret kind `{other}` (expected `location_visit`, \
                     `word_in_list`, `word_prefix_of`, `event_count_eq`, \
                     `trailing_delay_gt`, `private_run`, or `evolutions`)"
                )));
            }
        };
        self.expect(Tok::Semi)?;
        self.secrets.push((name, spec));
        Ok(())
    }

    fn parse_word_block(&mut self) -> Result<Vec<TimedWord>, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut words = Vec::new();
        if self.eat(&Tok::RBrace) {
            return Ok(words);
        }
        loop {
            words.push(self.parse_word()?);
            if self.eat(&Tok::Semi) {
                if self.eat(&Tok::RBrace) {
                    return Ok(words);
                }
                continue;
            }
            self.expect(Tok::RBrace)?;
            return Ok(words);
        }
    }

    fn parse_word(&mut self) -> Result<TimedWord, ParseError> {
        if self.eat_keyword("eps") {
            return Ok(TimedWord::empty());
        }
        let at = self.here();
        let mut pairs = Vec::new();
        while self.peek() == Some(&Tok::LParen) {
            self.expect(Tok::LParen)?;
            let event = self.event_ref("an event")?;
            self.expect(Tok::Comma)?;
            let timestamp = self.rational("a timestamp")?;
            self.expect(Tok::RParen)?;
            pairs.push((event, timestamp));
        }
        if pairs.is_empty() {
            return Err(self.err("expected a timed word: `eps` or pairs like `(a,1)(b,3/2)`"));
        }
        TimedWord::new(pairs).map_err(|e| ParseError::new(at.0, at.1, e.to_string()))
    }

    fn parse_evolution_block(&mut self) -> Result<Vec<Evolution>, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut evolutions = Vec::new();
        if self.eat(&Tok::RBrace) {
            return Ok(evolutions);
        }
        loop {
            evolutions.push(self.parse_evolution()?);
            if self.eat(&Tok::Semi) {
                if self.eat(&Tok::RBrace) {
                    return Ok(evolutions);
                }
                continue;
            }
            self.expect(Tok::RBrace)?;
            return Ok(evolutions);
        }
    }

    fn parse_evolution(&mut self) -> Result<Evolution, ParseError> {
        let at = self.here();
        let initial = self.parse_state_literal()?;
        let mut evolution = Evolution::new(initial);
        while self.eat(&Tok::StepOpen) {
            let action = match self.peek() {
                Some(Tok::Number(_)) => Action::Delay(self.rational("a delay")?),
                Some(Tok::Ident(_)) => Action::Event(self.event_ref("an event")?),
                _ => return Err(self.err("expected a delay or an event")),
            };
            self.expect(Tok::StepClose)?;
            let state = self.parse_state_literal()?;
            evolution.push(action, state);
        }
        let ta = self.automaton.as_ref().expect("automaton built");
        if let Err(defect) = validate_evolution(ta, &evolution, false) {
            return Err(ParseError::new(
                at.0,
                at.1,
                format!("evolution literal is not a path of the automaton: {defect}"),
            ));
        }
        Ok(evolution)
    }

    fn parse_state_literal(&mut self) -> Result<State, ParseError> {
        let at = self.here();
        self.expect(Tok::LParen)?;
        let location = self.location_ref("a location")?;
        self.expect(Tok::Comma)?;
        self.expect(Tok::LBrace)?;
        let mut assignments: BTreeMap<ClockId, Rational> = BTreeMap::new();
        if !self.eat(&Tok::RBrace) {
            loop {
                let clock = self.clock_ref("a clock")?;
                if assignments.contains_key(&clock) {
                    return Err(self.err("clock assigned twice in state literal"));
                }
                self.expect(Tok::Colon)?;
                let value = self.rational("a clock value")?;
                assignments.insert(clock, value);
                if !self.eat(&Tok::Comma) {
                    self.expect(Tok::RBrace)?;
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        let ta = self.automaton.as_ref().expect("automaton built");
        if assignments.len() != ta.clock_count() {
            return Err(ParseError::new(
                at.0,
                at.1,
                "state literal must assign every declared clock",
            ));
        }
        let values = (0..ta.clock_count())
            .map(|i| assignments[&ClockId::from_index(i)].clone())
            .collect();
        let valuation = ClockValuation::from_values(values)
            .map_err(|e| ParseError::new(at.0, at.1, e.to_string()))?;
        State::new(ta, location, valuation).map_err(|e| ParseError::new(at.0, at.1, e.to_string()))
    }

    fn parse_budget(&mut self) -> Result<(), ParseError> {
        let name = self.ident("a budget name")?;
        self.pos -= 1;
        self.unique_config_name("budget", &name)?;
        self.pos += 1;
        self.finish_automaton()?;
        self.expect(Tok::LBrace)?;
        self.expect_keyword("steps")?;
        self.expect(Tok::Colon)?;
        let steps = self.natural("a step count")?;
        self.expect(Tok::Semi)?;
        self.expect_keyword("grid")?;
        self.expect(Tok::Colon)?;
        let at = self.here();
        let mut grid = Vec::new();
        loop {
            grid.push(self.rational("a grid delay")?);
            if !self.eat(&Tok::Comma) {
                self.expect(Tok::Semi)?;
                break;
            }
        }
        self.expect_keyword("zero_delay")?;
        self.expect(Tok::Colon)?;
        let zero_delay = self.boolean()?;
        self.expect(Tok::Semi)?;
        let alternating = if self.eat_keyword("alternating") {
            self.expect(Tok::Colon)?;
            let value = self.boolean()?;
            self.expect(Tok::Semi)?;
            value
        } else {
            false
        };
        self.expect(Tok::RBrace)?;
        let budget = EnumerationBudget::new(steps as usize, grid, zero_delay)
            .map_err(|e| ParseError::new(at.0, at.1, e.to_string()))?
            .with_alternating(alternating);
        self.budgets.push((name, budget));
        Ok(())
    }

    fn boolean(&mut self) -> Result<bool, ParseError> {
        if self.eat_keyword("true") {
            Ok(true)
        } else if self.eat_keyword("false") {
            Ok(false)
        } else {
            Err(self.err("expected `true` or `false`"))
        }
    }

    fn secret_ref(&mut self) -> Result<String, ParseError> {
        let name = self.ident("a secret name")?;
        if self.secrets.iter().any(|(n, _)| *n == name) {
            Ok(name)
        } else {
            self.pos -= 1;
            Err(self.err(format!("undeclared secret `{name}`")))
        }
    }

    fn cfg_ref(&mut self) -> Result<String, ParseError> {
        let name = self.ident("an observation config name")?;
        if self.obs_configs.iter().any(|(n, _)| *n == name) {
            Ok(name)
        } else {
            self.pos -= 1;
            Err(self.err(format!("undeclared observation config `{name}`")))
        }
    }

    fn budget_ref(&mut self) -> Result<String, ParseError> {
        let name = self.ident("a budget name")?;
        if self.budgets.iter().any(|(n, _)| *n == name) {
            Ok(name)
        } else {
            self.pos -= 1;
            Err(self.err(format!("undeclared budget `{name}`")))
        }
    }

    fn parse_check(&mut self) -> Result<(), ParseError> {
        self.finish_automaton()?;
        let first = self.ident("a check kind or name")?;
        let (name, kind_word) = if self.eat(&Tok::Colon) {
            (Some(first), self.ident("a check kind")?)
        } else {
            (None, first)
        };
        let kind = match kind_word.as_str() {
            "ebto" => {
                self.expect(Tok::LParen)?;
                let secret = self.secret_ref()?;
                self.expect(Tok::Comma)?;
                let cfg = self.cfg_ref()?;
                self.expect(Tok::Comma)?;
                let budget = self.budget_ref()?;
                self.expect(Tok::RParen)?;
                CheckKind::Ebto {
                    secret,
                    cfg,
                    budget,
                }
            }
            "lbto" => {
                self.expect(Tok::LParen)?;
                let at = self.here();
                let secret = self.secret_ref()?;
                let is_language = matches!(
                    self.secrets.iter().find(|(n, _)| *n == secret),
                    Some((_, SecretSpec::WordInLanguage(_)))
                );
                if !is_language {
                    return Err(ParseError::new(
                        at.0,
                        at.1,
                        format!(
                            "lbto requires a word-language secret (`word_in_list`, \
                             `word_prefix_of`, or `event_count_eq`); `{secret}` is not one"
                        ),
                    ));
                }
                self.expect(Tok::Comma)?;
                let cfg = self.cfg_ref()?;
                self.expect(Tok::Comma)?;
                let budget = self.budget_ref()?;
                self.expect(Tok::RParen)?;
                CheckKind::Lbto {
                    secret,
                    cfg,
                    budget,
                }
            }
            "eto" => {
                self.expect(Tok::LParen)?;
                let at = self.here();
                let secret = self.secret_ref()?;
                let is_run = matches!(
                    self.secrets.iter().find(|(n, _)| *n == secret),
                    Some((_, SecretSpec::PrivateRun(_)))
                );
                if !is_run {
                    return Err(ParseError::new(
                        at.0,
                        at.1,
                        format!("eto requires a `private_run` secret; `{secret}` is not one"),
                    ));
                }
                self.expect(Tok::Comma)?;
                let budget = self.budget_ref()?;
                self.expect(Tok::RParen)?;
                CheckKind::Eto { secret, budget }
            }
            "representable" => {
                self.expect(Tok::LParen)?;
                let secret = self.secret_ref()?;
                self.expect(Tok::Comma)?;
                let budget = self.budget_ref()?;
                self.expect(Tok::RParen)?;
                CheckKind::Representable { secret, budget }
            }
            "closure" => {
                self.expect(Tok::LParen)?;
                let secret = self.secret_ref()?;
                self.expect(Tok::Comma)?;
                let budget = self.budget_ref()?;
                self.expect(Tok::RParen)?;
                CheckKind::Closure { secret, budget }
            }
            other => {
                self.pos -= 1;
                return Err(self.err(format!(
                    "unknown check kind `{other}` (expected `ebto`, `lbto`, `eto`, \
                     `representable`, or `closure`)"
                )));
            }
        };
        self.expect(Tok::Semi)?;

        let ordinal = self.checks_per_kind.entry(kind.notion()).or_insert(0);
        *ordinal += 1;
        let name = name.unwrap_or_else(|| format!("{}{}", kind.notion(), ordinal));
        self.pos -= 1;
        self.unique_config_name("check", &name)?;
        self.pos += 1;
        self.checks.push(CheckRequest { name, kind });
        Ok(())
    }
}
