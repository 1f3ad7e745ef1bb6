//! Config files shipped with the binary, selectable with `--preset`.

pub const PRESETS: &[(&str, &str)] = &[
    ("fig5", include_str!("../presets/fig5.toml")),
    ("fig6-50m", include_str!("../presets/fig6-50m.toml")),
    ("fig6-15m", include_str!("../presets/fig6-15m.toml")),
    ("fig7", include_str!("../presets/fig7.toml")),
    ("single-wimax", include_str!("../presets/single-wimax.toml")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}
