//! Configuration file parsing and the configuration chain.
//!
//! The config format is line-oriented INI: a mandatory `[datar]` section
//! naming one engine per slot, plus optional `[<kind>.<engine>]` parameter
//! sections. `build_chain` resolves the named engines against the registry,
//! probes each one, and yields a [`ConfChain`] that can only exist with all
//! five slots bound and available.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::engine::{
    Availability, ComputationEngine, ControlEngine, EngineDescriptor, EngineHandle, EngineKind,
    EngineRegistry, InputEngine, OutputEngine, Params, StorageEngine,
};
use crate::error::{Error, Result};

/// Parsed configuration file: one engine name per slot plus per-engine
/// parameter sections (sections for engines that end up unselected are kept;
/// they only matter if the slot points at them).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatarConfig {
    slots: BTreeMap<EngineKind, String>,
    params: BTreeMap<(EngineKind, String), Params>,
}

impl DatarConfig {
    pub fn new(slots: BTreeMap<EngineKind, String>) -> Result<Self> {
        for kind in EngineKind::ALL {
            match slots.get(&kind) {
                Some(name) if !name.is_empty() => {}
                _ => return Err(Error::MissingSlot(kind)),
            }
        }
        Ok(DatarConfig {
            slots,
            params: BTreeMap::new(),
        })
    }

    pub fn engine_name(&self, kind: EngineKind) -> &str {
        &self.slots[&kind]
    }

    pub fn set_params(&mut self, kind: EngineKind, engine: &str, params: Params) {
        if params.is_empty() {
            self.params.remove(&(kind, engine.to_string()));
        } else {
            self.params.insert((kind, engine.to_string()), params);
        }
    }

    pub fn params_for(&self, kind: EngineKind, engine: &str) -> Params {
        self.params
            .get(&(kind, engine.to_string()))
            .cloned()
            .unwrap_or_default()
    }

    /// Params bound to the engine currently selected for `kind`.
    pub fn slot_params(&self, kind: EngineKind) -> Params {
        self.params_for(kind, self.engine_name(kind).to_string().as_str())
    }
}

/// Parses config file text. Rules: section headers in brackets, `key = value`
/// with single spaces, `#` starts a comment line, `[datar]` is mandatory and
/// must contain exactly the five slot keys.
pub fn parse_config(text: &str) -> Result<DatarConfig> {
    enum Section {
        None,
        Datar,
        Engine(EngineKind, String),
    }

    let mut section = Section::None;
    let mut slots: BTreeMap<EngineKind, String> = BTreeMap::new();
    let mut params: BTreeMap<(EngineKind, String), Params> = BTreeMap::new();
    let mut saw_datar = false;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end();
        if line.is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let header = header.strip_suffix(']').ok_or_else(|| Error::SyntaxError {
                line: lineno,
                message: format!("unterminated section header: {line:?}"),
            })?;
            section = if header == "datar" {
                saw_datar = true;
                Section::Datar
            } else if let Some((kind_str, engine)) = header.split_once('.') {
                let kind = EngineKind::parse(kind_str)
                    .ok_or_else(|| Error::UnknownSection(header.to_string()))?;
                if engine.is_empty() {
                    return Err(Error::UnknownSection(header.to_string()));
                }
                Section::Engine(kind, engine.to_string())
            } else {
                return Err(Error::UnknownSection(header.to_string()));
            };
            continue;
        }
        let (key, value) = split_key_value(line, lineno)?;
        match &section {
            Section::None => {
                return Err(Error::SyntaxError {
                    line: lineno,
                    message: "key outside any section".into(),
                });
            }
            Section::Datar => {
                let kind = EngineKind::parse(&key).ok_or_else(|| Error::SyntaxError {
                    line: lineno,
                    message: format!("unknown key {key:?} in [datar] section"),
                })?;
                if value.is_empty() {
                    return Err(Error::SyntaxError {
                        line: lineno,
                        message: format!("empty engine name for slot {kind}"),
                    });
                }
                slots.insert(kind, value);
            }
            Section::Engine(kind, engine) => {
                params
                    .entry((*kind, engine.clone()))
                    .or_default()
                    .insert(key, value);
            }
        }
    }

    if !saw_datar {
        return Err(Error::MissingSlot(EngineKind::Input));
    }
    let mut config = DatarConfig::new(slots)?;
    config.params = params;
    Ok(config)
}

fn split_key_value(line: &str, lineno: usize) -> Result<(String, String)> {
    let line = line.trim_start();
    match line.split_once(" = ") {
        Some((key, value)) if !key.is_empty() && !key.contains(' ') => {
            Ok((key.to_string(), value.to_string()))
        }
        _ => Err(Error::SyntaxError {
            line: lineno,
            message: format!("expected `key = value`, got {line:?}"),
        }),
    }
}

/// Renders the config back into its canonical textual form.
/// `parse_config(serialize_config(c)) == c` for every valid config.
pub fn serialize_config(config: &DatarConfig) -> String {
    let mut out = String::from("[datar]\n");
    for kind in EngineKind::ALL {
        out.push_str(&format!("{} = {}\n", kind, config.engine_name(kind)));
    }
    for ((kind, engine), params) in &config.params {
        if params.is_empty() {
            continue;
        }
        out.push('\n');
        out.push_str(&format!("[{kind}.{engine}]\n"));
        for (key, value) in params {
            out.push_str(&format!("{key} = {value}\n"));
        }
    }
    out
}

/// One bound slot of the chain.
#[derive(Clone)]
pub struct Binding {
    pub descriptor: EngineDescriptor,
    pub params: Params,
    handle: EngineHandle,
}

impl Binding {
    pub fn handle(&self) -> &EngineHandle {
        &self.handle
    }
}

/// Validated binding of the five engine slots to registered engines. Can
/// only be built through [`build_chain`], which guarantees every slot is
/// bound and every probe returned Available.
#[derive(Clone)]
pub struct ConfChain {
    bindings: BTreeMap<EngineKind, Binding>,
}

impl fmt::Debug for ConfChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (kind, binding) in self.bindings() {
            map.entry(&kind.as_str(), &binding.descriptor.name);
        }
        map.finish()
    }
}

impl ConfChain {
    pub fn binding(&self, kind: EngineKind) -> &Binding {
        &self.bindings[&kind]
    }

    /// Bindings in canonical slot order (Input, Storage, Computation,
    /// Control, Output) for deterministic reporting.
    pub fn bindings(&self) -> impl Iterator<Item = (EngineKind, &Binding)> {
        EngineKind::ALL.into_iter().map(|k| (k, &self.bindings[&k]))
    }

    pub fn input(&self) -> (Arc<dyn InputEngine>, Params) {
        let b = self.binding(EngineKind::Input);
        match b.handle() {
            EngineHandle::Input(e) => (e.clone(), b.params.clone()),
            _ => unreachable!("input slot holds a non-input engine"),
        }
    }

    pub fn storage(&self) -> (Arc<dyn StorageEngine>, Params) {
        let b = self.binding(EngineKind::Storage);
        match b.handle() {
            EngineHandle::Storage(e) => (e.clone(), b.params.clone()),
            _ => unreachable!("storage slot holds a non-storage engine"),
        }
    }

    pub fn computation(&self) -> (Arc<dyn ComputationEngine>, Params) {
        let b = self.binding(EngineKind::Computation);
        match b.handle() {
            EngineHandle::Computation(e) => (e.clone(), b.params.clone()),
            _ => unreachable!("computation slot holds a non-computation engine"),
        }
    }

    pub fn control(&self) -> (Arc<dyn ControlEngine>, Params) {
        let b = self.binding(EngineKind::Control);
        match b.handle() {
            EngineHandle::Control(e) => (e.clone(), b.params.clone()),
            _ => unreachable!("control slot holds a non-control engine"),
        }
    }

    pub fn output(&self) -> (Arc<dyn OutputEngine>, Params) {
        let b = self.binding(EngineKind::Output);
        match b.handle() {
            EngineHandle::Output(e) => (e.clone(), b.params.clone()),
            _ => unreachable!("output slot holds a non-output engine"),
        }
    }
}

/// Resolves and probes every slot of `config` against `registry`.
pub fn build_chain(registry: &EngineRegistry, config: &DatarConfig) -> Result<ConfChain> {
    let mut bindings = BTreeMap::new();
    for kind in EngineKind::ALL {
        let name = config.engine_name(kind);
        let handle = registry
            .lookup(kind, name)
            .ok_or_else(|| Error::UnknownEngine {
                kind,
                name: name.to_string(),
            })?
            .clone();
        let params = config.params_for(kind, name);
        match handle.probe(&params) {
            Availability::Available => {}
            Availability::Unavailable(reason) => {
                return Err(Error::EngineUnavailable {
                    kind,
                    name: name.to_string(),
                    reason,
                });
            }
        }
        bindings.insert(
            kind,
            Binding {
                descriptor: handle.descriptor().clone(),
                params,
                handle,
            },
        );
    }
    Ok(ConfChain { bindings })
}

/// Freshly probes every binding; the chain itself is unmodified.
pub fn probe_all(chain: &ConfChain) -> BTreeMap<EngineKind, Availability> {
    chain
        .bindings()
        .map(|(kind, b)| (kind, b.handle().probe(&b.params)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const REFERENCE_CONFIG: &str = "\
[datar]
input = file
storage = memstore
computation = builtin
control = standalone
output = svg

[input.file]
path = data/egDBcount.txt
format = lines

[storage.logstore]
dir = bigdb/
";

    #[test]
    fn parses_reference_config() {
        let cfg = parse_config(REFERENCE_CONFIG).unwrap();
        assert_eq!(cfg.engine_name(EngineKind::Input), "file");
        assert_eq!(cfg.engine_name(EngineKind::Storage), "memstore");
        assert_eq!(cfg.engine_name(EngineKind::Computation), "builtin");
        assert_eq!(cfg.engine_name(EngineKind::Control), "standalone");
        assert_eq!(cfg.engine_name(EngineKind::Output), "svg");
        let input_params = cfg.params_for(EngineKind::Input, "file");
        assert_eq!(input_params.get("path").unwrap(), "data/egDBcount.txt");
        assert_eq!(input_params.get("format").unwrap(), "lines");
        let log_params = cfg.params_for(EngineKind::Storage, "logstore");
        assert_eq!(log_params.get("dir").unwrap(), "bigdb/");
    }

    #[test]
    fn missing_slot_detected() {
        let text = REFERENCE_CONFIG.replace("control = standalone\n", "");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, Error::MissingSlot(EngineKind::Control)));
    }

    #[test]
    fn params_propagated_for_selected_engine() {
        let text = "\
[datar]
input = generator
storage = memstore
computation = builtin
control = standalone
output = json

[storage.memstore]
capacity = 1000000
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(
            cfg.slot_params(EngineKind::Storage).get("capacity").unwrap(),
            "1000000"
        );
    }

    #[test]
    fn unknown_section_rejected() {
        let text = format!("{REFERENCE_CONFIG}\n[frobnicator]\nx = 1\n");
        assert!(matches!(
            parse_config(&text).unwrap_err(),
            Error::UnknownSection(_)
        ));
        let text = format!("{REFERENCE_CONFIG}\n[telepathy.remote]\nx = 1\n");
        assert!(matches!(
            parse_config(&text).unwrap_err(),
            Error::UnknownSection(_)
        ));
    }

    #[test]
    fn unknown_datar_key_rejected() {
        let text = REFERENCE_CONFIG.replace("[datar]\n", "[datar]\nturbo = yes\n");
        assert!(matches!(
            parse_config(&text).unwrap_err(),
            Error::SyntaxError { .. }
        ));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_config("[datar]\ninput=file\n").unwrap_err();
        match err {
            Error::SyntaxError { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = format!("# reference setup\n\n{REFERENCE_CONFIG}");
        parse_config(&text).unwrap();
    }

    #[test]
    fn serialize_parse_round_trip() {
        let cfg = parse_config(REFERENCE_CONFIG).unwrap();
        let text = serialize_config(&cfg);
        let back = parse_config(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
