use std::fmt::Write as _;
use std::io::IsTerminal;

use chorcheck_core::checker::Proof;
use chorcheck_core::semantics::{Configuration, TraceEntry};
use chorcheck_core::syntax::print_label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// ANSI styling, governed by `CHORCHECK_COLOR` (`auto`, `always`, `never`).
#[derive(Debug, Clone, Copy)]
pub struct Palette {
    on: bool,
}

impl Palette {
    pub fn from_env(format: Format) -> Palette {
        let setting = std::env::var("CHORCHECK_COLOR").unwrap_or_default();
        let on = match setting.as_str() {
            "always" => true,
            "never" => false,
            _ => std::io::stdout().is_terminal(),
        };
        Palette {
            on: on && format == Format::Text,
        }
    }

    fn paint(self, code: &str, s: &str) -> String {
        if self.on {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    pub fn good(self, s: &str) -> String {
        self.paint("32", s)
    }

    pub fn bad(self, s: &str) -> String {
        self.paint("31", s)
    }

    pub fn note(self, s: &str) -> String {
        self.paint("33", s)
    }
}

/// `  3. com A->B k  z@A := 42`
pub fn trace_line(i: usize, e: &TraceEntry) -> String {
    let mut line = format!("{:>4}. {}", i + 1, print_label(&e.label));
    if !e.delta.is_empty() {
        let writes: Vec<String> = e
            .delta
            .iter()
            .map(|w| format!("{}@{} := {}", w.var, w.at, w.value))
            .collect();
        let _ = write!(line, "  [{}]", writes.join(", "));
    }
    line
}

pub fn config_line(c: &Configuration) -> String {
    c.to_string()
}

/// An indented rendering of a derivation, one rule per line.
pub fn proof_tree(p: &Proof, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match p {
        Proof::End => {
            let _ = writeln!(out, "{pad}end: nothing left to run");
        }
        Proof::Eq { value } => {
            let _ = writeln!(out, "{pad}eq: both sides are {value}");
        }
        Proof::And { left, right } => {
            let _ = writeln!(out, "{pad}and");
            proof_tree(left, depth + 1, out);
            proof_tree(right, depth + 1, out);
        }
        Proof::Neg => {
            let _ = writeln!(out, "{pad}not: the negated formula has no derivation");
        }
        Proof::Par {
            left,
            right,
            left_proof,
            right_proof,
        } => {
            let _ = writeln!(out, "{pad}par: components {left:?} | {right:?}");
            proof_tree(left_proof, depth + 1, out);
            proof_tree(right_proof, depth + 1, out);
        }
        Proof::Action { target, proof } => {
            let _ = writeln!(out, "{pad}step to {target}");
            proof_tree(proof, depth + 1, out);
        }
        Proof::May { target, proof } => {
            let _ = writeln!(out, "{pad}reach {target}");
            proof_tree(proof, depth + 1, out);
        }
        Proof::Exists { witness, proof } => {
            let _ = writeln!(out, "{pad}exists: take {witness}");
            proof_tree(proof, depth + 1, out);
        }
    }
}

pub fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report values always serialize");
    s.push('\n');
    s
}
