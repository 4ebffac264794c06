//! Parameter sets of the published figures, as configuration files.

use crate::config::{parse_config, ConfigErrors, ExperimentConfig};

pub const PRESET_NAMES: [&str; 4] = ["fig2", "fig3", "fig4", "fig5"];

/// Configuration text of a preset.
pub fn preset_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig2" => include_str!("../presets/fig2.conf"),
        "fig3" => include_str!("../presets/fig3.conf"),
        "fig4" => include_str!("../presets/fig4.conf"),
        "fig5" => include_str!("../presets/fig5.conf"),
        _ => return None,
    })
}

/// Parsed preset; `None` for an unknown name.
pub fn preset_config(name: &str) -> Option<ExperimentConfig> {
    preset_text(name).map(|t| parse_config(t).expect("preset files are valid"))
}

/// Like [`preset_config`] but reporting parse errors instead of panicking.
pub fn try_preset_config(name: &str) -> Option<Result<ExperimentConfig, ConfigErrors>> {
    preset_text(name).map(parse_config)
}
