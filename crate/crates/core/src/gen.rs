//! Random terms for property tests: recursion-free (or recursive)
//! choreographies over a small vocabulary, states that make some of their
//! communications enabled, core and sugared formulae, and random
//! rearrangements by the monoid laws of `|`.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ast::{ActionLabel, BinOp, Binder, Choreography, Expr, Formula, Ident, Located, QuantSort, State, Value};
use crate::semantics::{explore, Configuration};

const PARTICIPANTS: [&str; 4] = ["A", "B", "C", "D"];
const SHARED: [&str; 2] = ["a", "b"];
const SESSIONS: [&str; 2] = ["k", "j"];
const LABELS: [&str; 2] = ["l", "m"];
const VARIABLES: [&str; 2] = ["x", "y"];

/// Shape limits for [`choreography`].
#[derive(Debug, Clone, Copy)]
pub struct ChorShape {
    /// Participants are drawn from the first `participants` of `A, B, C, D`.
    pub participants: usize,
    pub max_prefixes: usize,
    pub max_parallel: usize,
    pub max_conditionals: usize,
    /// Allow `rec`/process variables (not for the checker).
    pub recursion: bool,
}

impl Default for ChorShape {
    fn default() -> Self {
        ChorShape {
            participants: 4,
            max_prefixes: 8,
            max_parallel: 2,
            max_conditionals: 2,
            recursion: false,
        }
    }
}

struct ChorGen<'a, R: Rng> {
    rng: &'a mut R,
    shape: ChorShape,
    prefixes: usize,
    conditionals: usize,
    rec_vars: Vec<Ident>,
    next_rec: usize,
}

impl<R: Rng> ChorGen<'_, R> {
    fn participant(&mut self) -> Ident {
        let n = self.shape.participants.clamp(1, PARTICIPANTS.len());
        Ident::from(PARTICIPANTS[self.rng.gen_range(0..n)])
    }

    fn pair(&mut self) -> (Ident, Ident) {
        let a = self.participant();
        let mut b = self.participant();
        if self.shape.participants > 1 {
            while b == a {
                b = self.participant();
            }
        }
        (a, b)
    }

    fn pick(&mut self, xs: &[&str]) -> Ident {
        Ident::from(*xs.choose(self.rng).unwrap())
    }

    /// Mostly well-typed: `x` holds integers and `y` booleans. A few
    /// strings and mixed operands keep the error paths exercised.
    fn value(&mut self) -> Value {
        match self.rng.gen_range(0..10) {
            0..=4 => Value::Int(self.rng.gen_range(0..3)),
            5..=8 => Value::Bool(self.rng.gen()),
            _ => Value::str(["", "s", "t"][self.rng.gen_range(0..3)]),
        }
    }

    fn expr(&mut self, depth: usize) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.6) {
            return if self.rng.gen_bool(0.6) {
                Expr::Lit(self.value())
            } else {
                Expr::Var(self.pick(&VARIABLES))
            };
        }
        match self.rng.gen_range(0..8) {
            0 => Expr::Not(Box::new(Expr::var("y"))),
            1 => Expr::bin(BinOp::Add, Expr::var("x"), Expr::int(1)),
            2 => Expr::bin(BinOp::Lt, Expr::var("x"), Expr::int(self.rng.gen_range(0..3))),
            3 => Expr::bin(BinOp::Eq, Expr::var("x"), Expr::int(1)),
            4 => {
                let p = self.participant();
                Expr::At(Box::new(self.expr(depth - 1)), p)
            }
            k => {
                let op = [BinOp::Concat, BinOp::Sub, BinOp::Ne][k - 5];
                Expr::bin(op, self.expr(depth - 1), self.expr(depth - 1))
            }
        }
    }

    fn guard(&mut self) -> (Expr, Ident) {
        let at = self.participant();
        let g = match self.rng.gen_range(0..6) {
            0 => Expr::bool(self.rng.gen()),
            1 | 2 => Expr::var("y"),
            3 | 4 => Expr::bin(BinOp::Eq, Expr::var("x"), Expr::int(self.rng.gen_range(0..3))),
            _ => self.expr(2),
        };
        (g, at)
    }

    fn thread(&mut self) -> Choreography {
        let budget_left = self.prefixes < self.shape.max_prefixes;
        if !budget_left || self.rng.gen_bool(0.08) {
            if self.shape.recursion && !self.rec_vars.is_empty() && self.rng.gen_bool(0.5) {
                return Choreography::RecVar(self.rec_vars.choose(self.rng).unwrap().clone());
            }
            return Choreography::Inaction;
        }
        let roll = self.rng.gen_range(0..100);
        if self.shape.recursion && roll < 10 {
            let x = Ident::from(format!("X{}", self.next_rec));
            self.next_rec += 1;
            self.rec_vars.push(x.clone());
            let body = self.thread();
            self.rec_vars.pop();
            return Choreography::Rec { var: x, body: Box::new(body) };
        }
        if roll < 18 && self.conditionals < self.shape.max_conditionals {
            self.conditionals += 1;
            let (guard, at) = self.guard();
            let then = self.thread();
            let els = self.thread();
            return Choreography::Cond {
                guard,
                at,
                then: Box::new(then),
                els: Box::new(els),
            };
        }
        self.prefixes += 1;
        let (from, to) = self.pair();
        let session = self.pick(&SESSIONS);
        match self.rng.gen_range(0..10) {
            0..=2 => {
                let service = self.pick(&SHARED);
                let cont = self.thread();
                Choreography::Init {
                    from,
                    to,
                    service,
                    session,
                    cont: Box::new(cont),
                }
            }
            3..=7 => {
                let expr = self.expr(1);
                let var = self.pick(&VARIABLES);
                let cont = self.thread();
                Choreography::Com {
                    from,
                    to,
                    session,
                    expr,
                    var,
                    cont: Box::new(cont),
                }
            }
            _ => {
                let n = self.rng.gen_range(1..=2);
                let mut labels: Vec<&str> = LABELS.to_vec();
                labels.shuffle(self.rng);
                let branches = labels[..n]
                    .iter()
                    .map(|l| (Ident::from(*l), self.thread()))
                    .collect();
                Choreography::Choice {
                    from,
                    to,
                    session,
                    branches,
                }
            }
        }
    }
}

/// A random choreography within `shape`.
pub fn choreography<R: Rng>(rng: &mut R, shape: ChorShape) -> Choreography {
    let mut g = ChorGen {
        rng,
        shape,
        prefixes: 0,
        conditionals: 0,
        rec_vars: Vec::new(),
        next_rec: 0,
    };
    let parts = g.rng.gen_range(1..=shape.max_parallel.max(1));
    let threads: Vec<Choreography> = (0..parts).map(|_| g.thread()).collect();
    let mut it = threads.into_iter();
    let first = it.next().unwrap();
    it.fold(first, Choreography::par)
}

/// A state binding some of the vocabulary's variables.
pub fn state<R: Rng>(rng: &mut R) -> State {
    let mut s = State::new();
    for p in PARTICIPANTS {
        for x in VARIABLES {
            if rng.gen_bool(0.75) {
                let v = match (x, rng.gen_range(0..10)) {
                    (_, 0) => Value::str("s"),
                    ("x", _) => Value::Int(rng.gen_range(0..3)),
                    _ => Value::Bool(rng.gen()),
                };
                s.insert(Ident::from(x), Ident::from(p), v);
            }
        }
    }
    s
}

/// Labels and store cells of a configuration, used to steer formulae towards
/// observations that can actually be made of it.
#[derive(Debug, Clone, Default)]
struct Hints {
    labels: Vec<ActionLabel>,
    cells: Vec<(Ident, Ident, Value)>,
}

impl Hints {
    fn of(cfg: &Configuration) -> Hints {
        let labels = explore(cfg, Some(12), &BTreeSet::new())
            .map(|ex| ex.edges.into_iter().map(|(_, l, _)| l).collect::<BTreeSet<_>>())
            .unwrap_or_default();
        let cells = cfg
            .state
            .iter()
            .map(|(x, p, v)| (x.clone(), p.clone(), v.clone()))
            .collect();
        Hints {
            labels: labels.into_iter().collect(),
            cells,
        }
    }
}

struct FormulaGen<'a, R: Rng> {
    rng: &'a mut R,
    sugar: bool,
    hints: Hints,
    /// bound variables in scope, by sort
    scope: Vec<Binder>,
    next_var: usize,
}

impl<R: Rng> FormulaGen<'_, R> {
    fn name(&mut self, sort: QuantSort, vocab: &[&str]) -> Ident {
        let bound: Vec<Ident> = self.scope.iter().filter(|b| b.sort == sort).map(|b| b.var.clone()).collect();
        if !bound.is_empty() && self.rng.gen_bool(0.5) {
            return bound.choose(self.rng).unwrap().clone();
        }
        Ident::from(*vocab.choose(self.rng).unwrap())
    }

    fn participant(&mut self) -> Ident {
        self.name(QuantSort::Participant, &PARTICIPANTS)
    }

    fn label(&mut self) -> ActionLabel {
        if !self.hints.labels.is_empty() && self.rng.gen_bool(0.6) {
            let mut l = self.hints.labels.choose(self.rng).unwrap().clone();
            let bound: Vec<Ident> = self
                .scope
                .iter()
                .filter(|b| b.sort == QuantSort::Participant)
                .map(|b| b.var.clone())
                .collect();
            if !bound.is_empty() && self.rng.gen_bool(0.3) {
                let p = bound.choose(self.rng).unwrap().clone();
                match &mut l {
                    ActionLabel::Init { from, .. } | ActionLabel::Com { from, .. } | ActionLabel::Branch { from, .. } => {
                        *from = p
                    }
                }
            }
            if let ActionLabel::Init { session, .. } = &mut l {
                if self.rng.gen_bool(0.5) {
                    *session = self.name(QuantSort::Session, &SESSIONS);
                }
            }
            return l;
        }
        let (from, to) = (self.participant(), self.participant());
        let session = self.name(QuantSort::Session, &SESSIONS);
        match self.rng.gen_range(0..3) {
            0 => ActionLabel::Init {
                from,
                to,
                service: self.name(QuantSort::Shared, &SHARED),
                session,
            },
            1 => ActionLabel::Com { from, to, session },
            _ => ActionLabel::Branch {
                from,
                to,
                session,
                label: self.name(QuantSort::Label, &LABELS),
            },
        }
    }

    fn side(&mut self) -> Located {
        if !self.hints.cells.is_empty() && self.rng.gen_bool(0.5) {
            let (x, p, v) = self.hints.cells.choose(self.rng).unwrap().clone();
            let expr = if self.rng.gen_bool(0.5) { Expr::Var(x) } else { Expr::Lit(v) };
            return Located { expr, at: p };
        }
        let at = self.participant();
        let expr = match self.rng.gen_range(0..4) {
            0 => Expr::int(self.rng.gen_range(0..3)),
            1 => Expr::bool(self.rng.gen()),
            _ => {
                let bound: Vec<Ident> = self
                    .scope
                    .iter()
                    .filter(|b| b.sort == QuantSort::Expr)
                    .map(|b| b.var.clone())
                    .collect();
                if !bound.is_empty() && self.rng.gen_bool(0.4) {
                    Expr::Var(bound.choose(self.rng).unwrap().clone())
                } else {
                    Expr::var(VARIABLES.choose(self.rng).unwrap())
                }
            }
        };
        Located { expr, at }
    }

    fn atom(&mut self) -> Formula {
        let n = if self.sugar { 4 } else { 2 };
        match self.rng.gen_range(0..n) {
            0 => Formula::End,
            1 => Formula::Eq(self.side(), self.side()),
            2 => Formula::True,
            _ => Formula::False,
        }
    }

    fn formula(&mut self, depth: usize) -> Formula {
        if depth <= 1 {
            return self.atom();
        }
        let d = depth - 1;
        let kinds = if self.sugar { 16 } else { 7 };
        match self.rng.gen_range(0..kinds) {
            0 => {
                let sort = [
                    QuantSort::Participant,
                    QuantSort::Shared,
                    QuantSort::Session,
                    QuantSort::Label,
                    QuantSort::Expr,
                ]
                .choose(self.rng)
                .copied()
                .unwrap();
                let var = Ident::from(format!("v{}", self.next_var));
                self.next_var += 1;
                let b = Binder { var, sort };
                self.scope.push(b.clone());
                let body = self.formula(d);
                self.scope.pop();
                if self.sugar && self.rng.gen_bool(0.3) {
                    Formula::Forall(b, Box::new(body))
                } else {
                    Formula::Exists(b, Box::new(body))
                }
            }
            1 => Formula::and(self.formula(d), self.formula(d)),
            2 => Formula::neg(self.formula(d)),
            3 => {
                let l = self.label();
                Formula::action(l, self.formula(d))
            }
            4 => Formula::par(self.formula(d), self.formula(d)),
            5 => Formula::may(self.formula(d)),
            6 => self.atom(),
            7 => Formula::or(self.formula(d), self.formula(d)),
            8 => Formula::implies(self.formula(d), self.formula(d)),
            9 => Formula::always(self.formula(d)),
            10 => {
                let l = self.label();
                Formula::Must(l, Box::new(self.formula(d)))
            }
            11 => Formula::Next(Box::new(self.formula(d))),
            12 => Formula::ExistsLabel(Box::new(self.formula(d))),
            13 => {
                let (p, q) = (self.participant(), self.participant());
                Formula::Interact(p, q, Box::new(self.formula(d)))
            }
            14 => Formula::neg(Formula::Eq(self.side(), self.side())),
            _ => Formula::and(self.formula(d), self.atom()),
        }
    }
}

/// A random formula of nesting depth at most `depth` built from the eight
/// core constructors only.
pub fn core_formula<R: Rng>(rng: &mut R, depth: usize) -> Formula {
    FormulaGen {
        rng,
        sugar: false,
        hints: Hints::default(),
        scope: Vec::new(),
        next_var: 0,
    }
    .formula(depth)
}

/// Like [`core_formula`], but with labels and store cells drawn from `cfg`
/// often enough that many formulae are satisfied.
pub fn core_formula_for<R: Rng>(rng: &mut R, depth: usize, cfg: &Configuration) -> Formula {
    FormulaGen {
        rng,
        sugar: false,
        hints: Hints::of(cfg),
        scope: Vec::new(),
        next_var: 0,
    }
    .formula(depth)
}

/// A random formula that may also use every derived operator.
pub fn formula<R: Rng>(rng: &mut R, depth: usize) -> Formula {
    FormulaGen {
        rng,
        sugar: true,
        hints: Hints::default(),
        scope: Vec::new(),
        next_var: 0,
    }
    .formula(depth)
}

/// Rewrites `c` by randomly applying commutativity and associativity of `|`
/// and adding or removing `0` units, everywhere in the term. The result is
/// structurally congruent to `c`.
pub fn shuffle_monoid<R: Rng>(rng: &mut R, c: &Choreography) -> Choreography {
    use Choreography as C;
    let inner = match c {
        C::Inaction | C::RecVar(_) => c.clone(),
        C::Par(l, r) => {
            let (l, r) = (shuffle_monoid(rng, l), shuffle_monoid(rng, r));
            match rng.gen_range(0..4) {
                0 => C::par(r, l),
                1 => match r {
                    // A | (B | C)  =  (A | B) | C
                    C::Par(b, c2) => C::par(C::par(l, *b), *c2),
                    r => C::par(l, r),
                },
                2 => match l {
                    // (A | B) | C  =  A | (B | C)
                    C::Par(a, b) => C::par(*a, C::par(*b, r)),
                    l => C::par(l, r),
                },
                _ => match (l, r) {
                    (C::Inaction, x) | (x, C::Inaction) => x,
                    (l, r) => C::par(l, r),
                },
            }
        }
        C::Init {
            from,
            to,
            service,
            session,
            cont,
        } => C::Init {
            from: from.clone(),
            to: to.clone(),
            service: service.clone(),
            session: session.clone(),
            cont: Box::new(shuffle_monoid(rng, cont)),
        },
        C::Com {
            from,
            to,
            session,
            expr,
            var,
            cont,
        } => C::Com {
            from: from.clone(),
            to: to.clone(),
            session: session.clone(),
            expr: expr.clone(),
            var: var.clone(),
            cont: Box::new(shuffle_monoid(rng, cont)),
        },
        C::Choice {
            from,
            to,
            session,
            branches,
        } => C::Choice {
            from: from.clone(),
            to: to.clone(),
            session: session.clone(),
            branches: branches.iter().map(|(l, b)| (l.clone(), shuffle_monoid(rng, b))).collect(),
        },
        C::Cond { guard, at, then, els } => C::Cond {
            guard: guard.clone(),
            at: at.clone(),
            then: Box::new(shuffle_monoid(rng, then)),
            els: Box::new(shuffle_monoid(rng, els)),
        },
        C::Rec { var, body } => C::Rec {
            var: var.clone(),
            body: Box::new(shuffle_monoid(rng, body)),
        },
    };
    match rng.gen_range(0..6) {
        0 => C::par(C::Inaction, inner),
        1 => C::par(inner, C::Inaction),
        _ => inner,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shapes_are_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let c = choreography(&mut rng, ChorShape::default());
            assert!(c.is_recursion_free());
            assert!(c.prefix_count() <= 8 + 8, "{c:?}");
            assert!(c.validate().is_ok());
            let f = core_formula(&mut rng, 4);
            assert!(f.is_core());
            assert!(f.depth() <= 4);
        }
    }

    #[test]
    fn shuffles_are_congruent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let c = choreography(&mut rng, ChorShape::default());
            let d = shuffle_monoid(&mut rng, &c);
            assert!(crate::semantics::struct_equiv(&c, &d).unwrap());
        }
    }
}
