use std::collections::{BTreeMap, BTreeSet};

use super::diagnostic::ParseDiagnostic;
use super::lexer::{tokenize, Tok, Token};
use super::{Fact, Parsed, Program};
use crate::semlogic::{
    Concept, Concern, FiniteDomain, Literal, Pattern, QuantKind, Quantifier, Requirement, Rule, RuleId, RuleLink,
    Symbol, Wrapper,
};

const KEYWORDS: &[&str] =
    &["not", "and", "exists", "forall", "in", "domain", "rule", "for", "concern", "requirement", "of", "concept", "as"];

/// ALL-CAPS identifiers (digits and underscores allowed) are variables.
pub(crate) fn is_variable_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_uppercase()) && !s.chars().any(|c| c.is_ascii_lowercase())
}

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[derive(Clone, Copy)]
struct Loc {
    line: usize,
    col: usize,
}

type PResult<T> = Result<T, ParseDiagnostic>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    program: Program,
    diags: Vec<ParseDiagnostic>,
    domain_locs: Vec<Loc>,
    fact_locs: Vec<Loc>,
    rule_locs: Vec<Loc>,
}

pub fn parse_program(src: &str) -> Parsed {
    let (tokens, lex_diags) = tokenize(src);
    let mut p = Parser {
        tokens,
        pos: 0,
        program: Program::default(),
        diags: lex_diags,
        domain_locs: Vec::new(),
        fact_locs: Vec::new(),
        rule_locs: Vec::new(),
    };
    while !p.at(&Tok::Eof) {
        let before = p.pos;
        if let Err(d) = p.statement() {
            p.diags.push(d);
            p.recover(before);
        }
    }
    p.resolve();
    let mut diagnostics = p.diags;
    diagnostics.sort_by_key(|a| (a.line, a.column));
    Parsed { program: p.program, diagnostics }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Token {
        &self.tokens[(self.pos + offset).min(self.tokens.len() - 1)]
    }

    fn at(&self, t: &Tok) -> bool {
        &self.peek().tok == t
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn loc(&self) -> Loc {
        Loc { line: self.peek().line, col: self.peek().col }
    }

    fn unexpected(&self, expected: &str) -> ParseDiagnostic {
        let t = self.peek();
        let found = if t.tok == Tok::Eof { "end of input".to_string() } else { format!("`{}`", t.text) };
        ParseDiagnostic::error(t.line, t.col, format!("expected {expected}, found {found}"), t.text.clone())
    }

    fn expect(&mut self, t: Tok, what: &str) -> PResult<Token> {
        if self.peek().tok == t {
            Ok(self.advance())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.at_keyword(kw) {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    /// Any non-keyword identifier.
    fn ident(&mut self, what: &str) -> PResult<Symbol> {
        match &self.peek().tok {
            Tok::Ident(s) if !is_keyword(s) => {
                let s = Symbol::new(s);
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn name(&mut self, what: &str) -> PResult<Symbol> {
        match &self.peek().tok {
            Tok::Ident(s) if !is_keyword(s) && !is_variable_name(s) => {
                let s = Symbol::new(s);
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn variable(&mut self) -> PResult<Symbol> {
        match &self.peek().tok {
            Tok::Ident(s) if is_variable_name(s) && s != "O" && s != "P" => {
                let s = Symbol::new(s);
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected("a variable")),
        }
    }

    /// Skip to the end of the broken statement: a `.` that is the last token
    /// on its line. Always makes progress.
    fn recover(&mut self, start: usize) {
        if self.pos == start {
            self.advance();
        }
        loop {
            match self.peek().tok {
                Tok::Eof => return,
                Tok::Dot => {
                    let line = self.peek().line;
                    self.advance();
                    if self.peek().tok == Tok::Eof || self.peek().line > line {
                        return;
                    }
                }
                _ => {
                    self.advance();
                }
            }
        }
    }

    fn statement(&mut self) -> PResult<()> {
        let loc = self.loc();
        if let Tok::Ident(kw) = &self.peek().tok {
            match kw.as_str() {
                "domain" => return self.domain(loc),
                "concern" => return self.concern(),
                "requirement" => return self.requirement(),
                "concept" => return self.concept(),
                "rule" => return self.labeled_rule(loc),
                _ => {}
            }
        }
        self.fact_or_rule(loc)
    }

    fn domain(&mut self, loc: Loc) -> PResult<()> {
        self.expect_keyword("domain")?;
        let name = self.ident("a domain name")?;
        self.expect(Tok::Eq, "`=`")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut members = Vec::new();
        if !self.at(&Tok::RBrace) {
            members.push(self.name("a constant")?);
            while self.at(&Tok::Comma) {
                self.advance();
                members.push(self.name("a constant")?);
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        self.expect(Tok::Dot, "`.`")?;
        let domain = FiniteDomain::new(name, members)
            .map_err(|e| ParseDiagnostic::error(loc.line, loc.col, e.to_string(), "domain"))?;
        self.program.domains.push(domain);
        self.domain_locs.push(loc);
        Ok(())
    }

    fn concern(&mut self) -> PResult<()> {
        self.expect_keyword("concern")?;
        let name = self.name("a concern name")?;
        self.expect(Tok::Dot, "`.`")?;
        self.program.model.concerns.push(Concern { name });
        Ok(())
    }

    fn requirement(&mut self) -> PResult<()> {
        self.expect_keyword("requirement")?;
        let id = self.name("a requirement name")?;
        self.expect_keyword("of")?;
        let concern = self.name("a concern name")?;
        let text = match self.advance() {
            Token { tok: Tok::Str(s), .. } => s,
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("a quoted requirement text"));
            }
        };
        self.expect(Tok::Dot, "`.`")?;
        self.program.model.requirements.push(Requirement { id, concern, text });
        Ok(())
    }

    fn concept(&mut self) -> PResult<()> {
        self.expect_keyword("concept")?;
        let name = match &self.peek().tok {
            Tok::Str(s) => s.clone(),
            _ => return Err(self.unexpected("a quoted concept name")),
        };
        self.advance();
        self.expect_keyword("as")?;
        let symbol = self.name("a symbol")?;
        self.expect(Tok::Dot, "`.`")?;
        self.program.model.concepts.push(Concept { name, symbol });
        Ok(())
    }

    fn labeled_rule(&mut self, loc: Loc) -> PResult<()> {
        self.expect_keyword("rule")?;
        let id = self.name("a rule name")?;
        let requirement = if self.at_keyword("for") {
            self.advance();
            Some(self.name("a requirement name")?)
        } else {
            None
        };
        self.expect(Tok::Colon, "`:`")?;
        let alpha = self.weight_prefix()?;
        let lhs = self.conj()?;
        if !self.at(&Tok::Arrow) {
            return Err(self.unexpected("`=>`"));
        }
        let rule = self.rule_tail(RuleId(id), alpha, lhs)?;
        if let Some(requirement) = requirement {
            self.program.model.rules.push(RuleLink { rule: rule.id.clone(), requirement });
        }
        self.program.rules.push(rule);
        self.rule_locs.push(loc);
        Ok(())
    }

    fn fact_or_rule(&mut self, loc: Loc) -> PResult<()> {
        let weight_tok = self.peek().clone();
        let weight = self.weight_prefix()?;
        let lhs = self.conj()?;
        if self.at(&Tok::Arrow) {
            let id = RuleId(Symbol::from(format!("r{}", self.program.rules.len() + 1)));
            let rule = self.rule_tail(id, weight, lhs)?;
            self.program.rules.push(rule);
            self.rule_locs.push(loc);
            return Ok(());
        }
        self.expect(Tok::Dot, "`.` or `=>`")?;
        if lhs.len() != 1 {
            return Err(ParseDiagnostic::error(loc.line, loc.col, "a fact must be a single term", ""));
        }
        let multiplicity = match weight {
            None => 1,
            Some(_) => weight_tok.text.parse::<u64>().ok().filter(|&n| n >= 1).ok_or_else(|| {
                ParseDiagnostic::error(
                    weight_tok.line,
                    weight_tok.col,
                    "fact multiplicity must be a positive integer",
                    weight_tok.text.clone(),
                )
            })?,
        };
        let literal = lhs.into_iter().next().expect("one literal");
        self.program.facts.push(Fact { literal, multiplicity });
        self.fact_locs.push(loc);
        Ok(())
    }

    fn rule_tail(&mut self, id: RuleId, alpha: Option<f64>, lhs: Vec<Literal>) -> PResult<Rule> {
        self.expect(Tok::Arrow, "`=>`")?;
        let beta = self.weight_prefix()?;
        let rhs = self.conj()?;
        self.expect(Tok::Dot, "`.`")?;
        Ok(Rule { id, alpha: alpha.unwrap_or(1.0), lhs, beta: beta.unwrap_or(1.0), rhs })
    }

    fn weight_prefix(&mut self) -> PResult<Option<f64>> {
        if let Tok::Num(text) = &self.peek().tok {
            let value: f64 = text.parse().map_err(|_| self.unexpected("a number"))?;
            self.advance();
            self.expect(Tok::Star, "`*` after a weight")?;
            return Ok(Some(value));
        }
        Ok(None)
    }

    fn conj(&mut self) -> PResult<Vec<Literal>> {
        let mut lits = vec![self.quantterm()?];
        while self.at_keyword("and") {
            self.advance();
            lits.push(self.quantterm()?);
        }
        Ok(lits)
    }

    fn quantterm(&mut self) -> PResult<Literal> {
        let mut quantifiers = Vec::new();
        loop {
            let kind = if self.at_keyword("exists") {
                QuantKind::Exists
            } else if self.at_keyword("forall") {
                QuantKind::Forall
            } else {
                break;
            };
            self.advance();
            let var = self.variable()?;
            self.expect_keyword("in")?;
            let domain = self.ident("a domain name")?;
            self.expect(Tok::Dot, "`.` after the quantifier")?;
            quantifiers.push(Quantifier { kind, var, domain });
        }
        Ok(Literal { quantifiers, body: self.term()? })
    }

    fn term(&mut self) -> PResult<Pattern> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Ident(s) if s == "not" => {
                self.advance();
                Ok(Pattern::wrap(Wrapper::Not, self.term()?))
            }
            Tok::Ident(s) if (s == "O" || s == "P") && self.peek_at(1).tok == Tok::LParen => {
                let op = if s == "O" { Wrapper::Obligation } else { Wrapper::Permission };
                self.advance();
                self.advance();
                let inner = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Pattern::wrap(op, inner))
            }
            Tok::Ident(s) if s == "O" || s == "P" => Err(ParseDiagnostic::error(
                t.line,
                t.col,
                format!("`{s}` is a modal operator and must be applied as `{s}(...)`"),
                s.clone(),
            )),
            Tok::Meta(m) => {
                let var = Symbol::new(m);
                self.advance();
                self.expect(Tok::LParen, "`(` after a metavariable")?;
                let arg = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Pattern::Meta { var, arg: Box::new(arg) })
            }
            Tok::Ident(s) if is_keyword(s) => Err(self.unexpected("a term")),
            Tok::Ident(s) if is_variable_name(s) => {
                self.advance();
                Ok(Pattern::Var(Symbol::new(s)))
            }
            Tok::Ident(s) => {
                let head = Symbol::new(s);
                self.advance();
                let mut args = Vec::new();
                if self.at(&Tok::LParen) {
                    self.advance();
                    args.push(self.term()?);
                    while self.at(&Tok::Comma) {
                        self.advance();
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen, "`)` or `,`")?;
                }
                Ok(Pattern::App { head, args })
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    /// Name resolution and binding checks once every statement is known.
    /// Statements that fail are dropped so the program stays well-formed.
    fn resolve(&mut self) {
        let mut declared: BTreeMap<Symbol, usize> = BTreeMap::new();
        let mut keep_domain = vec![true; self.program.domains.len()];
        for (i, d) in self.program.domains.iter().enumerate() {
            if declared.insert(d.name.clone(), i).is_some() {
                let l = self.domain_locs[i];
                self.diags.push(ParseDiagnostic::error(
                    l.line,
                    l.col,
                    format!("domain `{}` is declared twice", d.name),
                    d.name.to_string(),
                ));
                keep_domain[i] = false;
            }
        }
        let mut flags = keep_domain.into_iter();
        self.program.domains.retain(|_| flags.next().unwrap());

        let unknown_domain = |lits: &[Literal]| -> Option<Symbol> {
            lits.iter().flat_map(|l| &l.quantifiers).map(|q| &q.domain).find(|d| !declared.contains_key(*d)).cloned()
        };

        let mut keep_fact = Vec::with_capacity(self.program.facts.len());
        for (i, f) in self.program.facts.iter().enumerate() {
            let l = self.fact_locs[i];
            let mut problem = None;
            if let Some(d) = unknown_domain(std::slice::from_ref(&f.literal)) {
                problem = Some(format!("unknown domain `{d}`"));
            } else if let Some(v) = f.literal.free_vars().into_iter().next() {
                problem = Some(format!("fact is not ground: variable `{v}` is unbound"));
            } else {
                let mut metas = BTreeSet::new();
                f.literal.body.collect_metas(&mut metas);
                if let Some(m) = metas.into_iter().next() {
                    problem = Some(format!("fact is not ground: metavariable `${m}` is unbound"));
                }
            }
            if let Some(msg) = &problem {
                self.diags.push(ParseDiagnostic::error(l.line, l.col, msg.clone(), f.literal.to_string()));
            }
            keep_fact.push(problem.is_none());
        }
        let mut flags = keep_fact.into_iter();
        self.program.facts.retain(|_| flags.next().unwrap());

        let mut ids = BTreeSet::new();
        let mut keep_rule = Vec::with_capacity(self.program.rules.len());
        for (i, r) in self.program.rules.iter().enumerate() {
            let l = self.rule_locs[i];
            let mut ok = true;
            if !ids.insert(r.id.clone()) {
                self.diags.push(ParseDiagnostic::error(l.line, l.col, format!("duplicate rule id `{}`", r.id), r.id.to_string()));
                ok = false;
            }
            if let Some(d) = unknown_domain(&r.lhs).or_else(|| unknown_domain(&r.rhs)) {
                self.diags.push(ParseDiagnostic::error(l.line, l.col, format!("unknown domain `{d}`"), d.to_string()));
                ok = false;
            }
            for e in r.validate() {
                self.diags.push(ParseDiagnostic::error(l.line, l.col, e.to_string(), r.id.to_string()));
                ok = false;
            }
            keep_rule.push(ok);
        }
        let dropped: BTreeSet<RuleId> = self
            .program
            .rules
            .iter()
            .zip(&keep_rule)
            .filter(|(_, keep)| !**keep)
            .map(|(r, _)| r.id.clone())
            .collect();
        let mut flags = keep_rule.into_iter();
        self.program.rules.retain(|_| flags.next().unwrap());
        // links of dropped rules go too, unless another rule kept the same id
        let kept: BTreeSet<RuleId> = self.program.rules.iter().map(|r| r.id.clone()).collect();
        self.program.model.rules.retain(|l| !dropped.contains(&l.rule) || kept.contains(&l.rule));

        for e in self.program.model.validate(&self.program.rules) {
            self.diags.push(ParseDiagnostic::error(1, 1, e.to_string(), ""));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::Severity;

    fn only_rule(src: &str) -> Rule {
        let parsed = parse_program(src);
        assert!(parsed.diagnostics.is_empty(), "{:?}", parsed.diagnostics);
        assert_eq!(parsed.program.rules.len(), 1);
        parsed.program.rules.into_iter().next().unwrap()
    }

    #[test]
    fn obligation_excludes_negative_permission() {
        let r = only_rule("O(X) => not P(not X).");
        assert_eq!(r.lhs, vec![Literal::from(Pattern::wrap(Wrapper::Obligation, Pattern::var("X")))]);
        assert_eq!(
            r.rhs,
            vec![Literal::from(Pattern::not(Pattern::wrap(Wrapper::Permission, Pattern::not(Pattern::var("X")))))]
        );
        assert_eq!(r.id.as_str(), "r1");
    }

    #[test]
    fn empty_source() {
        let parsed = parse_program("");
        assert!(parsed.diagnostics.is_empty());
        assert_eq!(parsed.program, Program::default());
        let parsed = parse_program("  # only a comment\n");
        assert_eq!(parsed.program, Program::default());
    }

    #[test]
    fn weighted_rule() {
        let r = only_rule("2 * edge(X,Y) => 3 * path(X,Y).");
        assert_eq!((r.alpha, r.beta), (2.0, 3.0));
    }

    #[test]
    fn quantified_fact_and_domain() {
        let parsed = parse_program("domain SMS = {}.\nexists M in SMS . O(Confidential(M)).");
        assert!(parsed.diagnostics.is_empty(), "{:?}", parsed.diagnostics);
        let f = &parsed.program.facts[0];
        assert_eq!(f.literal.quantifiers.len(), 1);
        assert_eq!(f.literal.to_string(), "exists M in SMS . O(Confidential(M))");
        assert_eq!(f.multiplicity, 1);
    }

    #[test]
    fn unknown_domain_is_reported() {
        let parsed = parse_program("forall X in Nope . q(X).");
        assert_eq!(parsed.diagnostics.len(), 1);
        assert!(parsed.diagnostics[0].message.contains("unknown domain `Nope`"));
        assert!(parsed.program.facts.is_empty());
    }

    #[test]
    fn unbound_rhs_variable_is_reported() {
        let parsed = parse_program("p(X) => q(Y).");
        assert_eq!(parsed.diagnostics.len(), 1);
        assert!(parsed.diagnostics[0].message.contains("`Y`"));
        assert!(parsed.program.rules.is_empty());
    }

    #[test]
    fn syntax_error_location() {
        let parsed = parse_program("a.\np(x => q.\nb.");
        assert_eq!(parsed.diagnostics.len(), 1);
        let d = &parsed.diagnostics[0];
        assert_eq!((d.line, d.column, d.severity), (2, 5, Severity::Error));
        assert_eq!(d.render("f.karb"), "f.karb:2:5: error: expected `)` or `,`, found `=>`");
        assert_eq!(parsed.program.facts.len(), 2);
    }

    #[test]
    fn recovery_skips_quantifier_dots() {
        let parsed = parse_program("domain D = {a}.\nforall X in D . q(X) junk junk.\nok.");
        assert_eq!(parsed.diagnostics.len(), 1);
        assert_eq!(parsed.program.facts.len(), 1);
        assert_eq!(parsed.program.facts[0].literal.to_string(), "ok");
    }

    #[test]
    fn non_ground_fact() {
        let parsed = parse_program("p(X).");
        assert!(parsed.diagnostics[0].message.contains("not ground"));
    }

    #[test]
    fn fact_multiplicity_must_be_integer() {
        assert_eq!(parse_program("3 * e(a).").program.facts[0].multiplicity, 3);
        let bad = parse_program("1.5 * e(a).");
        assert!(bad.diagnostics[0].message.contains("positive integer"));
        let zero = parse_program("0 * e(a).");
        assert_eq!(zero.diagnostics.len(), 1);
    }

    #[test]
    fn metavariable_rule() {
        let src = "domain K = {a}.\ndomain Q = {}.\n\
                   forall X in K . $A(X) and exists Y in Q . P(member(Y, k)) => exists Y in Q . P($A(Y)).";
        let r = only_rule(src);
        assert_eq!(r.lhs[0].quantifiers[0].kind, QuantKind::Forall);
        assert_eq!(r.lhs[0].body, Pattern::meta("A", Pattern::var("X")));
        assert_eq!(r.rhs[0].to_string(), "exists Y in Q . P($A(Y))");
    }

    #[test]
    fn unbound_rhs_metavariable() {
        let parsed = parse_program("p(X) => $B(X).");
        assert!(parsed.diagnostics[0].message.contains("metavariable"));
    }

    #[test]
    fn model_statements() {
        let src = r#"
concern safety.
requirement cr1 of safety "Animals must not harm visitors.".
concept "Cage" as cage.
rule crul1 for cr1 : is_a(X, fence(cage)) => O(proper_specification(X)) and O(proper_condition(X)).
"#;
        let parsed = parse_program(src);
        assert!(parsed.diagnostics.is_empty(), "{:?}", parsed.diagnostics);
        let m = &parsed.program.model;
        assert_eq!(m.requirements[0].text, "Animals must not harm visitors.");
        assert_eq!(m.rules[0].rule.as_str(), "crul1");
        assert_eq!(parsed.program.rules[0].rhs.len(), 2);
    }

    #[test]
    fn duplicate_rule_ids() {
        let parsed = parse_program("rule a : p => q.\nrule a : q => r.");
        assert_eq!(parsed.diagnostics.len(), 1);
        assert!(parsed.diagnostics[0].message.contains("duplicate rule id"));
    }

    #[test]
    fn reserved_modal_letters() {
        let parsed = parse_program("p(O).");
        assert!(parsed.diagnostics[0].message.contains("modal operator"));
    }
}
