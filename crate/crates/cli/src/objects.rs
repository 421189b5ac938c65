use std::path::Path;

use lineconf::catalog::by_name;
use lineconf::schema::from_json;
use lineconf::LineConfiguration;

/// A configuration named on the command line.
pub struct Object {
    pub name: String,
    pub config: LineConfiguration,
}

/// Groups tokens into object names: a bare number continues the name before
/// it, so `q-minus 3 fano` is two objects.
pub fn group_tokens(tokens: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for t in tokens {
        let numeric = !t.is_empty() && t.chars().all(|c| c.is_ascii_digit());
        match out.last_mut() {
            Some(prev) if numeric && !Path::new(prev.as_str()).is_file() => {
                prev.push(' ');
                prev.push_str(t);
            }
            _ => out.push(t.clone()),
        }
    }
    out
}

/// Catalog name or path to a schema document.
pub fn resolve(name: &str) -> Result<Object, String> {
    let path = Path::new(name);
    let config = if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{name}: {e}"))?;
        from_json(&text).map_err(|e| format!("{name}: {e}"))?
    } else {
        by_name(name).map_err(|e| e.to_string())?
    };
    Ok(Object {
        name: name.to_string(),
        config,
    })
}

pub fn resolve_all(tokens: &[String], expected: usize) -> Result<Vec<Object>, String> {
    let names = group_tokens(tokens);
    if names.len() != expected {
        return Err(format!(
            "expected {expected} object(s), got {}: {names:?}",
            names.len()
        ));
    }
    names.iter().map(|n| resolve(n)).collect()
}
