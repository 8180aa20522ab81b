use std::path::Path;

use toml::{Table, Value};

use super::config::RunConfig;
use super::presets::preset;
use crate::{Error, Result};

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn syntax_error(text: &str, origin: &str, e: &toml::de::Error) -> Error {
    let line = e.span().map(|s| format!(" line {}", line_of(text, s.start))).unwrap_or_default();
    Error::Parse(format!("{origin}{line}: {}", e.message().trim()))
}

/// A field-level deserialisation failure before it is tied to a source.
struct FieldError {
    field: String,
    message: String,
    offset: Option<usize>,
}

enum RawError {
    Syntax(toml::de::Error),
    Field(FieldError),
}

fn deserialize(text: &str) -> std::result::Result<RunConfig, RawError> {
    let de = toml::Deserializer::parse(text).map_err(RawError::Syntax)?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let message = inner.message().trim().to_string();
        // serde reports a missing field at its parent; name the field itself
        let field = match message
            .strip_prefix("missing field `")
            .and_then(|rest| rest.split('`').next())
        {
            Some(name) if path == "." => name.to_string(),
            Some(name) => format!("{path}.{name}"),
            None => path,
        };
        RawError::Field(FieldError {
            field,
            message,
            offset: inner.span().map(|s| s.start),
        })
    })
}

/// Parse and validate one configuration document.
pub fn parse_config_str(text: &str, origin: &str) -> Result<RunConfig> {
    let cfg = deserialize(text).map_err(|e| match e {
        RawError::Syntax(e) => syntax_error(text, origin, &e),
        RawError::Field(f) => {
            let line = f
                .offset
                .map(|o| format!(" (line {})", line_of(text, o)))
                .unwrap_or_default();
            Error::config(f.field, format!("{}{line} in {origin}", f.message))
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Line of the key at dotted `path` (e.g. `scan.axes[1].points`) in `text`,
/// or of its deepest enclosing key that exists.
fn key_line(text: &str, path: &str) -> Option<usize> {
    use toml::de::{DeTable, DeValue};
    let root = DeTable::parse(text).ok()?;
    let mut table: &DeTable = root.get_ref();
    let mut found = None;
    for segment in path.split('.') {
        let (name, index) = match segment.split_once('[') {
            Some((name, rest)) => (name, rest.trim_end_matches(']').parse::<usize>().ok()),
            None => (segment, None),
        };
        let (key, value) = table.iter().find(|(k, _)| k.get_ref() == name)?;
        found = Some(line_of(text, key.span().start));
        let mut value: &DeValue = value.get_ref();
        if let (Some(i), Some(items)) = (index, value.as_array()) {
            match items.get(i) {
                Some(item) => {
                    found = Some(line_of(text, item.span().start));
                    value = item.get_ref();
                }
                None => break,
            }
        }
        match value.as_table() {
            Some(t) => table = t,
            None => break,
        }
    }
    found
}

/// Parse and validate the configuration file at `path`.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text, &path.display().to_string())
}

fn parse_table(text: &str, origin: &str) -> Result<Table> {
    text.parse::<Table>().map_err(|e| syntax_error(text, origin, &e))
}

/// Deep merge: tables merge key by key, anything else is replaced.
pub fn merge_tables(base: &mut Table, overlay: Table) {
    for (key, value) in overlay {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(o)) => merge_tables(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// Apply `dotted.key=value`; the value is read as TOML, falling back to a
/// bare string.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("override `{assignment}` is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::Parse(format!("override `{assignment}` has an empty key segment")));
    }
    let value = match format!("v = {}", raw.trim()).parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("key just written"),
        Err(_) => Value::String(raw.trim().to_string()),
    };
    set_path(table, key, value)
}

/// Set (or with `None`, remove) a dotted key.
pub fn set_path(table: &mut Table, key: &str, value: Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let leaf = parts.pop().expect("split yields at least one part");
    let mut current = table;
    for (depth, part) in parts.iter().enumerate() {
        let entry = current
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        current = match entry {
            Value::Table(t) => t,
            _ => {
                return Err(Error::Parse(format!(
                    "override `{key}`: `{}` is not a section",
                    parts[..=depth].join(".")
                )))
            }
        };
    }
    current.insert(leaf.to_string(), value);
    Ok(())
}

pub fn remove_path(table: &mut Table, key: &str) {
    let mut parts: Vec<&str> = key.split('.').collect();
    let leaf = parts.pop().expect("split yields at least one part");
    let mut current = table;
    for part in parts {
        match current.get_mut(part) {
            Some(Value::Table(t)) => current = t,
            _ => return,
        }
    }
    current.remove(leaf);
}

/// Configuration layers, lowest precedence first: preset, file, overrides.
#[derive(Clone, Debug, Default)]
pub struct ConfigSources {
    pub preset: Option<String>,
    pub file: Option<std::path::PathBuf>,
    pub overrides: Vec<String>,
}

impl ConfigSources {
    /// Merged document before validation.
    pub fn table(&self) -> Result<Table> {
        let mut table = Table::new();
        if let Some(name) = &self.preset {
            let p = preset(name)?;
            table = parse_table(p.text, &format!("preset {}", p.name))?;
        }
        if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path)?;
            merge_tables(&mut table, parse_table(&text, &path.display().to_string())?);
        }
        for o in &self.overrides {
            apply_override(&mut table, o)?;
        }
        Ok(table)
    }

    /// Merge and validate. Errors name the layer (and line) that set the
    /// offending key.
    pub fn load(&self) -> Result<RunConfig> {
        let text = toml::to_string(&self.table()?).map_err(|e| Error::Parse(e.to_string()))?;
        let cfg = deserialize(&text).map_err(|e| match e {
            RawError::Syntax(e) => syntax_error(&text, "merged configuration", &e),
            RawError::Field(f) => Error::config(&f.field, format!("{} {}", f.message, self.locate(&f.field))),
        })?;
        cfg.validate().map_err(|e| match e {
            Error::Config { field, message } => {
                let location = self.locate(&field);
                Error::Config { field, message: format!("{message} {location}") }
            }
            other => other,
        })?;
        Ok(cfg)
    }

    /// Which layer supplied `field`, highest precedence first.
    fn locate(&self, field: &str) -> String {
        let covers = |key: &str| {
            field == key || field.starts_with(&format!("{key}.")) || field.starts_with(&format!("{key}["))
        };
        if let Some(o) = self.overrides.iter().rev().find(|o| o.split_once('=').is_some_and(|(k, _)| covers(k.trim()))) {
            return format!("(from --set {o})");
        }
        if let Some(path) = &self.file {
            if let Ok(text) = std::fs::read_to_string(path) {
                if let Some(line) = key_line(&text, field) {
                    return format!("(line {line}) in {}", path.display());
                }
            }
        }
        if let Some(p) = self.preset.as_deref().and_then(|name| preset(name).ok()) {
            if let Some(line) = key_line(p.text, field) {
                return format!("(line {line}) in preset {}", p.name);
            }
        }
        format!("in {}", self.origin())
    }

    fn origin(&self) -> String {
        match (&self.preset, &self.file, self.overrides.is_empty()) {
            (None, Some(f), true) => f.display().to_string(),
            (Some(p), None, true) => format!("preset {p}"),
            _ => "merged configuration".into(),
        }
    }
}

/// Validate a merged document.
pub fn load_table(table: Table, origin: &str) -> Result<RunConfig> {
    let text = toml::to_string(&table).map_err(|e| Error::Parse(e.to_string()))?;
    parse_config_str(&text, origin)
}

pub fn to_toml_string(cfg: &RunConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Parse(e.to_string()))
}
