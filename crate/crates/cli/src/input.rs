use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use chorcheck_core::ast::{Choreography, Formula, State};
use chorcheck_core::semantics::Configuration;
use chorcheck_core::syntax::{parse_document, parse_formula, parse_state, Document};

pub fn read_document(path: &Path) -> Result<Document> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(parse_document(&text, Some(path))?)
}

/// Picks the named item, or the only one when no name is given.
fn select<'a, T>(
    what: &str,
    file: &Path,
    items: impl Iterator<Item = (&'a chorcheck_core::ast::Ident, &'a T)>,
    name: Option<&str>,
) -> Result<(String, &'a T)>
where
    T: 'a,
{
    let items: Vec<_> = items.collect();
    match name {
        Some(n) => items
            .into_iter()
            .find(|(i, _)| i.as_str() == n)
            .map(|(i, t)| (i.to_string(), t))
            .ok_or_else(|| anyhow!("{}: no {what} named `{n}`", file.display())),
        None => match items.as_slice() {
            [(i, t)] => Ok((i.to_string(), *t)),
            [] => bail!("{}: no {what} declared", file.display()),
            many => bail!(
                "{}: {} {} declared ({}); pick one by name",
                file.display(),
                many.len(),
                if what == "choreography" { "choreographies".to_string() } else { format!("{what}s") },
                many.iter().map(|(i, _)| i.as_str()).collect::<Vec<_>>().join(", ")
            ),
        },
    }
}

/// Where the initial state comes from when not from the choreography file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct StateArgs {
    /// Read the initial state from FILE (a `state { ... }` block, or bare
    /// `x@A = v, ...` bindings) instead of the choreography file.
    #[arg(long, value_name = "FILE", conflicts_with = "state_text")]
    pub state: Option<PathBuf>,
    /// Initial state given inline, e.g. `x@D = 42, y@A = true`.
    #[arg(long, value_name = "BINDINGS")]
    pub state_text: Option<String>,
}

impl StateArgs {
    fn resolve(&self, doc: &Document) -> Result<State> {
        if let Some(text) = &self.state_text {
            return Ok(parse_state(text)?);
        }
        if let Some(path) = &self.state {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            return match parse_document(&text, Some(path)) {
                Ok(d) if d.state().is_some() => Ok(d.state().cloned().unwrap()),
                _ => parse_state(&text).map_err(|e| anyhow!("{}: {e}", path.display())),
            };
        }
        Ok(doc.state().cloned().unwrap_or_default())
    }
}

/// The configuration named on the command line.
pub struct Model {
    pub doc: Document,
    pub name: String,
    pub config: Configuration,
}

pub fn load_model(file: &Path, chor: Option<&str>, state: &StateArgs) -> Result<Model> {
    let doc = read_document(file)?;
    let (name, c) = select("choreography", file, doc.choreographies(), chor)?;
    let c: Choreography = c.clone();
    let config = Configuration::new(state.resolve(&doc)?, c);
    Ok(Model { doc, name, config })
}

/// Formulae to check: inline text, a named formula of a `.gl` file (all of
/// them when unnamed), or the formulae of the choreography file itself.
pub fn load_formulas(
    model_doc: &Document,
    model_file: &Path,
    file: Option<&Path>,
    text: Option<&str>,
    name: Option<&str>,
) -> Result<Vec<(String, Formula)>> {
    if let Some(t) = text {
        return Ok(vec![("formula".to_string(), parse_formula(t)?)]);
    }
    let owned;
    let (doc, path) = match file {
        Some(p) => {
            owned = read_document(p)?;
            (&owned, p)
        }
        None => (model_doc, model_file),
    };
    if let Some(n) = name {
        let (n, f) = select("formula", path, doc.formulas(), Some(n))?;
        return Ok(vec![(n, f.clone())]);
    }
    let all: Vec<_> = doc.formulas().map(|(n, f)| (n.to_string(), f.clone())).collect();
    if all.is_empty() {
        bail!("{}: no formula declared", path.display());
    }
    Ok(all)
}
