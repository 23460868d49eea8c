use std::collections::BTreeSet;
use std::path::Path;

use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, SourceSpan};
use crate::ast::{
    ActionLabel, Binder, BinOp, Choreography, Expr, Formula, Ident, Located, QuantSort, SessionType, State,
    Value, ValueType,
};

const MAX_DEPTH: usize = 200;

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    file: Option<std::path::PathBuf>,
    depth: usize,
    /// Process variables in scope, for closed-mode checking.
    rec_scope: Vec<Ident>,
    pub(crate) closed: bool,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    pub(crate) fn new(src: &str, file: Option<&Path>) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src, file)?,
            pos: 0,
            file: file.map(Path::to_path_buf),
            depth: 0,
            rec_scope: Vec::new(),
            closed: true,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn span(&self) -> SourceSpan {
        let t = &self.toks[self.pos];
        SourceSpan {
            file: self.file.clone(),
            line: t.line,
            column: t.col,
        }
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            span: self.span(),
            message: msg.into(),
        })
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Arrow => "`->`".into(),
            Tok::Implies => "`=>`".into(),
            Tok::Or => "`\\/`".into(),
            Tok::Ne => "`!=`".into(),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn unexpected<T>(&self, what: &str) -> PResult<T> {
        self.error(format!("expected {what}, found {}", Self::describe(self.peek())))
    }

    fn is_sym(&self, c: char) -> bool {
        *self.peek() == Tok::Sym(c)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.is_sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> PResult<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.unexpected(&format!("`{c}`"))
        }
    }

    fn expect_tok(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&Self::describe(&t))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Ident::from(s))
            }
            _ => self.unexpected(what),
        }
    }

    pub(crate) fn expect_eof(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.error("nesting too deep");
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    // ---------------------------------------------------------------- values

    fn value(&mut self) -> PResult<Value> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Value::Int(i))
            }
            Tok::Sym('-') => {
                self.bump();
                match self.bump() {
                    Tok::Int(i) => Ok(Value::Int(-i)),
                    _ => self.error("expected integer after `-`"),
                }
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Value::Str(s))
            }
            Tok::Ident(s) if s == "eps" => {
                self.bump();
                Ok(Value::str(""))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Value::Bool(s == "true"))
            }
            _ => self.unexpected("a value"),
        }
    }

    /// `x@A = v, ...` (possibly empty), stopping at `}` or end of input.
    pub(crate) fn state_bindings(&mut self) -> PResult<State> {
        let mut state = State::new();
        if self.is_sym('}') || self.at_eof() {
            return Ok(state);
        }
        loop {
            let span = self.span();
            let x = self.ident("a variable")?;
            self.expect_sym('@')?;
            let p = self.ident("a participant")?;
            self.expect_sym('=')?;
            let v = self.value()?;
            if state.insert(x.clone(), p.clone(), v).is_some() {
                return Err(ParseError {
                    span,
                    message: format!("duplicate binding for {x}@{p}"),
                });
            }
            if !self.eat_sym(',') {
                return Ok(state);
            }
        }
    }

    // ----------------------------------------------------------- expressions

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.enter()?;
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::Sym('=') => Some(BinOp::Eq),
            Tok::Ne => Some(BinOp::Ne),
            Tok::Sym('<') => Some(BinOp::Lt),
            _ => None,
        };
        let out = match op {
            Some(op) => {
                self.bump();
                let rhs = self.additive()?;
                Expr::bin(op, lhs, rhs)
            }
            None => lhs,
        };
        self.leave();
        Ok(out)
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                Tok::Sym('.') => BinOp::Concat,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary_expr()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn unary_expr(&mut self) -> PResult<Expr> {
        if self.eat_sym('!') {
            self.enter()?;
            let e = self.unary_expr()?;
            self.leave();
            return Ok(Expr::Not(Box::new(e)));
        }
        let mut e = self.primary_expr()?;
        while self.eat_sym('@') {
            let p = self.ident("a participant after `@`")?;
            e = Expr::At(Box::new(e), p);
        }
        Ok(e)
    }

    fn primary_expr(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(_) | Tok::Str(_) | Tok::Sym('-') => Ok(Expr::Lit(self.value()?)),
            Tok::Ident(s) if matches!(s.as_str(), "eps" | "true" | "false") => Ok(Expr::Lit(self.value()?)),
            Tok::Ident(s) => {
                self.bump();
                Ok(Expr::Var(Ident::from(s)))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            _ => self.unexpected("an expression"),
        }
    }

    // --------------------------------------------------------- choreography

    pub(crate) fn choreography(&mut self) -> PResult<Choreography> {
        self.enter()?;
        let mut c = self.prefix()?;
        while self.eat_sym('|') {
            let r = self.prefix()?;
            c = Choreography::par(c, r);
        }
        self.leave();
        Ok(c)
    }

    fn prefix(&mut self) -> PResult<Choreography> {
        self.enter()?;
        let c = self.prefix_inner()?;
        self.leave();
        Ok(c)
    }

    fn prefix_inner(&mut self) -> PResult<Choreography> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(0) => {
                self.bump();
                Ok(Choreography::Inaction)
            }
            Tok::Sym('(') => {
                self.bump();
                let c = self.choreography()?;
                self.expect_sym(')')?;
                Ok(c)
            }
            Tok::Ident(s) if s == "if" => {
                self.bump();
                let (guard, at) = self.guard()?;
                self.expect_kw("then")?;
                let then = self.choreography()?;
                self.expect_kw("else")?;
                let els = self.prefix()?;
                Ok(Choreography::Cond {
                    guard,
                    at,
                    then: Box::new(then),
                    els: Box::new(els),
                })
            }
            Tok::Ident(s) if s == "rec" => {
                self.bump();
                let x = self.ident("a process variable")?;
                let body = if self.eat_sym('{') {
                    self.rec_scope.push(x.clone());
                    let b = self.choreography();
                    self.rec_scope.pop();
                    let b = b?;
                    self.expect_sym('}')?;
                    b
                } else {
                    self.expect_sym('.')?;
                    self.rec_scope.push(x.clone());
                    let b = self.prefix();
                    self.rec_scope.pop();
                    b?
                };
                Ok(Choreography::Rec { var: x, body: Box::new(body) })
            }
            Tok::Ident(s) => {
                self.bump();
                if *self.peek() != Tok::Arrow {
                    let x = Ident::from(s);
                    if self.closed && !self.rec_scope.contains(&x) {
                        return Err(ParseError {
                            span,
                            message: format!("unbound process variable `{x}`"),
                        });
                    }
                    return Ok(Choreography::RecVar(x));
                }
                self.bump();
                let from = Ident::from(s);
                let to = self.ident("a participant")?;
                self.expect_sym(':')?;
                let chan = self.ident("a channel")?;
                self.interaction(from, to, chan)
            }
            _ => self.unexpected("a choreography"),
        }
    }

    fn interaction(&mut self, from: Ident, to: Ident, chan: Ident) -> PResult<Choreography> {
        match self.peek() {
            Tok::Sym('(') => {
                self.bump();
                let session = self.ident("a session channel")?;
                self.expect_sym(')')?;
                self.expect_sym('.')?;
                let cont = self.prefix()?;
                Ok(Choreography::Init {
                    from,
                    to,
                    service: chan,
                    session,
                    cont: Box::new(cont),
                })
            }
            Tok::Sym('<') => {
                self.bump();
                let expr = self.expr()?;
                self.expect_sym(',')?;
                let var = self.ident("a variable")?;
                self.expect_sym('>')?;
                self.expect_sym('.')?;
                let cont = self.prefix()?;
                Ok(Choreography::Com {
                    from,
                    to,
                    session: chan,
                    expr,
                    var,
                    cont: Box::new(cont),
                })
            }
            Tok::Sym('[') => {
                self.bump();
                self.expect_sym('+')?;
                self.expect_sym(']')?;
                self.expect_sym('{')?;
                let mut branches = Vec::new();
                let mut seen = BTreeSet::new();
                loop {
                    let span = self.span();
                    let l = self.ident("a branch label")?;
                    if !seen.insert(l.clone()) {
                        return Err(ParseError {
                            span,
                            message: format!("duplicate branch label `{l}`"),
                        });
                    }
                    self.expect_sym(':')?;
                    let c = self.choreography()?;
                    branches.push((l, c));
                    if !self.eat_sym(',') {
                        break;
                    }
                }
                self.expect_sym('}')?;
                Ok(Choreography::Choice {
                    from,
                    to,
                    session: chan,
                    branches,
                })
            }
            _ => self.unexpected("`(`, `<` or `[+]` after the channel"),
        }
    }

    /// A conditional guard `e@A`. The evaluating participant is taken from a
    /// top-level `@`, or else from the unique participant the guard reads at.
    fn guard(&mut self) -> PResult<(Expr, Ident)> {
        let span = self.span();
        let e = self.expr()?;
        if let Expr::At(inner, p) = e {
            return Ok((*inner, p));
        }
        let mut locs = BTreeSet::new();
        e.location_participants(&mut locs);
        if locs.len() == 1 && !e.reads_locally() {
            let p = locs.into_iter().next().unwrap();
            return Ok((e, p));
        }
        Err(ParseError {
            span,
            message: "cannot tell where the guard is evaluated; write it as (e)@A".into(),
        })
    }

    // -------------------------------------------------------------- formulae

    pub(crate) fn formula(&mut self) -> PResult<Formula> {
        self.enter()?;
        let lhs = self.or_formula()?;
        let f = if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.formula()?;
            Formula::implies(lhs, rhs)
        } else {
            lhs
        };
        self.leave();
        Ok(f)
    }

    fn or_formula(&mut self) -> PResult<Formula> {
        let mut f = self.par_formula()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let r = self.par_formula()?;
            f = Formula::or(f, r);
        }
        Ok(f)
    }

    fn par_formula(&mut self) -> PResult<Formula> {
        let mut f = self.and_formula()?;
        while self.eat_sym('|') {
            let r = self.and_formula()?;
            f = Formula::par(f, r);
        }
        Ok(f)
    }

    fn and_formula(&mut self) -> PResult<Formula> {
        let mut f = self.unary_formula()?;
        while self.eat_sym('&') {
            let r = self.unary_formula()?;
            f = Formula::and(f, r);
        }
        Ok(f)
    }

    fn unary_formula(&mut self) -> PResult<Formula> {
        self.enter()?;
        let f = self.unary_formula_inner()?;
        self.leave();
        Ok(f)
    }

    fn unary_formula_inner(&mut self) -> PResult<Formula> {
        if self.eat_sym('~') {
            return Ok(Formula::neg(self.unary_formula()?));
        }
        if self.is_sym('<') {
            self.bump();
            if self.is_kw("_") {
                self.bump();
                self.expect_sym('>')?;
                return Ok(Formula::ExistsLabel(Box::new(self.unary_formula()?)));
            }
            let l = self.label()?;
            self.expect_sym('>')?;
            return Ok(Formula::action(l, self.unary_formula()?));
        }
        if self.is_sym('[') {
            self.bump();
            let l = self.label()?;
            self.expect_sym(']')?;
            return Ok(Formula::Must(l, Box::new(self.unary_formula()?)));
        }
        if let Tok::Ident(kw) = self.peek().clone() {
            match kw.as_str() {
                "may" | "box" | "next" => {
                    self.bump();
                    let a = Box::new(self.unary_formula()?);
                    return Ok(match kw.as_str() {
                        "may" => Formula::May(a),
                        "box" => Formula::Always(a),
                        _ => Formula::Next(a),
                    });
                }
                "interact" if *self.peek_at(1) == Tok::Sym('(') => {
                    self.bump();
                    self.bump();
                    let a = self.ident("a participant")?;
                    self.expect_sym(',')?;
                    let b = self.ident("a participant")?;
                    self.expect_sym(')')?;
                    return Ok(Formula::Interact(a, b, Box::new(self.unary_formula()?)));
                }
                "exists" | "forall" => {
                    self.bump();
                    let mut binders = vec![self.binder()?];
                    while self.eat_sym(',') {
                        binders.push(self.binder()?);
                    }
                    self.expect_sym('.')?;
                    let mut body = self.formula()?;
                    for b in binders.into_iter().rev() {
                        body = if kw == "exists" {
                            Formula::Exists(b, Box::new(body))
                        } else {
                            Formula::Forall(b, Box::new(body))
                        };
                    }
                    return Ok(body);
                }
                _ => {}
            }
        }
        self.atom()
    }

    fn binder(&mut self) -> PResult<Binder> {
        let var = self.ident("a bound variable")?;
        self.expect_sym(':')?;
        let span = self.span();
        let sort = self.ident("a sort")?;
        match QuantSort::from_keyword(sort.as_str()) {
            Some(sort) => Ok(Binder { var, sort }),
            None => Err(ParseError {
                span,
                message: format!(
                    "unknown sort `{sort}` (expected participant, schan, kchan, label or expr)"
                ),
            }),
        }
    }

    fn label(&mut self) -> PResult<ActionLabel> {
        let span = self.span();
        let kind = self.ident("`init`, `com` or `branch`")?;
        let from = self.ident("a participant")?;
        self.expect_tok(Tok::Arrow)?;
        let to = self.ident("a participant")?;
        match kind.as_str() {
            "init" => {
                let service = self.ident("a shared channel")?;
                self.expect_sym('(')?;
                let session = self.ident("a session channel")?;
                self.expect_sym(')')?;
                Ok(ActionLabel::Init { from, to, service, session })
            }
            "com" => {
                let session = self.ident("a session channel")?;
                Ok(ActionLabel::Com { from, to, session })
            }
            "branch" => {
                let session = self.ident("a session channel")?;
                self.expect_sym('[')?;
                let label = self.ident("a branch label")?;
                self.expect_sym(']')?;
                Ok(ActionLabel::Branch { from, to, session, label })
            }
            other => Err(ParseError {
                span,
                message: format!("unknown action `{other}`"),
            }),
        }
    }

    fn atom(&mut self) -> PResult<Formula> {
        let (save, depth) = (self.pos, self.depth);
        let eq_err = match self.equality() {
            Ok(f) => return Ok(f),
            Err(e) => e,
        };
        self.pos = save;
        self.depth = depth;
        match self.peek().clone() {
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(s) if s == "end" => {
                self.bump();
                Ok(Formula::End)
            }
            Tok::Sym('(') => {
                self.bump();
                let f = self.formula()?;
                self.expect_sym(')')?;
                Ok(f)
            }
            _ => Err(eq_err),
        }
    }

    /// `e1@A = e2@B`. One side may omit its location (as in `x@A = eps`);
    /// it is then read at the other side's participant.
    fn equality(&mut self) -> PResult<Formula> {
        let span = self.span();
        let lhs = self.eq_side()?;
        let negated = match self.peek() {
            Tok::Sym('=') => false,
            Tok::Ne => true,
            _ => return self.unexpected("`=` or `!=`"),
        };
        self.bump();
        let rhs = self.eq_side()?;
        let (lhs, rhs) = match (lhs, rhs) {
            (Expr::At(l, a), Expr::At(r, b)) => (Located { expr: *l, at: a }, Located { expr: *r, at: b }),
            (Expr::At(l, a), r) => (Located { expr: *l, at: a.clone() }, Located { expr: r, at: a }),
            (l, Expr::At(r, b)) => (Located { expr: l, at: b.clone() }, Located { expr: *r, at: b }),
            _ => {
                return Err(ParseError {
                    span,
                    message: "an equality needs a location on at least one side, as in e@A".into(),
                })
            }
        };
        let eq = Formula::Eq(lhs, rhs);
        Ok(if negated { Formula::neg(eq) } else { eq })
    }

    fn eq_side(&mut self) -> PResult<Expr> {
        self.enter()?;
        let e = self.additive()?;
        self.leave();
        Ok(e)
    }

    // --------------------------------------------------------- session types

    pub(crate) fn session_type(&mut self) -> PResult<SessionType> {
        self.enter()?;
        let t = self.session_type_inner()?;
        self.leave();
        Ok(t)
    }

    fn session_type_inner(&mut self) -> PResult<SessionType> {
        match self.peek().clone() {
            Tok::Sym(c @ ('!' | '?')) => {
                self.bump();
                self.expect_sym('(')?;
                let span = self.span();
                let vt = match self.ident("a value type")?.as_str() {
                    "bool" => ValueType::Bool,
                    "string" => ValueType::Str,
                    "int" => ValueType::Int,
                    other => {
                        return Err(ParseError {
                            span,
                            message: format!("unknown value type `{other}`"),
                        })
                    }
                };
                self.expect_sym(')')?;
                self.expect_sym('.')?;
                let k = Box::new(self.session_type()?);
                Ok(if c == '!' {
                    SessionType::Send(vt, k)
                } else {
                    SessionType::Recv(vt, k)
                })
            }
            Tok::Sym(c @ ('&' | '+')) => {
                self.bump();
                self.expect_sym('{')?;
                let mut bs = Vec::new();
                let mut seen = BTreeSet::new();
                loop {
                    let span = self.span();
                    let l = self.ident("a label")?;
                    if !seen.insert(l.clone()) {
                        return Err(ParseError {
                            span,
                            message: format!("duplicate label `{l}`"),
                        });
                    }
                    self.expect_sym(':')?;
                    bs.push((l, self.session_type()?));
                    if !self.eat_sym(',') {
                        break;
                    }
                }
                self.expect_sym('}')?;
                Ok(if c == '&' {
                    SessionType::Branch(bs)
                } else {
                    SessionType::Select(bs)
                })
            }
            Tok::Sym('(') => {
                self.bump();
                let t = self.session_type()?;
                self.expect_sym(')')?;
                Ok(t)
            }
            Tok::Ident(s) if s == "end" => {
                self.bump();
                Ok(SessionType::End)
            }
            Tok::Ident(s) if s == "rec" => {
                self.bump();
                let v = self.ident("a type variable")?;
                self.expect_sym('.')?;
                Ok(SessionType::Rec(v, Box::new(self.session_type()?)))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(SessionType::Var(Ident::from(s)))
            }
            _ => self.unexpected("a session type"),
        }
    }

    // ------------------------------------------------------------- documents

    pub(crate) fn expect_decl_kw(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if matches!(s.as_str(), "chor" | "formula" | "state" | "type") => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("`chor`, `formula`, `state` or `type`"),
        }
    }

    pub(crate) fn decl_name(&mut self) -> PResult<(Ident, SourceSpan)> {
        let span = self.span();
        let n = self.ident("a declaration name")?;
        self.expect_sym('=')?;
        Ok((n, span))
    }

    pub(crate) fn end_decl(&mut self) -> PResult<()> {
        self.expect_sym(';')
    }

    pub(crate) fn open_block(&mut self) -> PResult<()> {
        self.expect_sym('{')
    }

    pub(crate) fn close_block(&mut self) -> PResult<()> {
        self.expect_sym('}')
    }

    pub(crate) fn current_span(&self) -> SourceSpan {
        self.span()
    }
}
