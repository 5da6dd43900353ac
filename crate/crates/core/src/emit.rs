//! Self-contained HTML pages booting a visualization library with a
//! configuration object.

use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::json::{parse_relaxed, to_strict, JsonValue};

/// The visualization libraries with an emitter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Framework {
    Tabulator,
    ChartJs,
    VisNetwork,
    VisTimeline,
    VisGraph3d,
    ApexCharts,
    FabricJs,
}

impl Framework {
    pub const ALL: [Framework; 7] = [
        Framework::Tabulator,
        Framework::ChartJs,
        Framework::VisNetwork,
        Framework::VisTimeline,
        Framework::VisGraph3d,
        Framework::ApexCharts,
        Framework::FabricJs,
    ];

    /// Operation name used in recipes and side-output names.
    pub fn name(self) -> &'static str {
        match self {
            Framework::Tabulator => "tabulator",
            Framework::ChartJs => "chartjs",
            Framework::VisNetwork => "vis-network",
            Framework::VisTimeline => "vis-timeline",
            Framework::VisGraph3d => "vis-graph3d",
            Framework::ApexCharts => "apexcharts",
            Framework::FabricJs => "fabricjs",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Framework::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn title(self) -> &'static str {
        match self {
            Framework::Tabulator => "Tabulator",
            Framework::ChartJs => "Chart.js",
            Framework::VisNetwork => "vis.js Network",
            Framework::VisTimeline => "vis.js Timeline",
            Framework::VisGraph3d => "vis.js Graph3D",
            Framework::ApexCharts => "ApexCharts",
            Framework::FabricJs => "Fabric.js",
        }
    }

    /// Script that turns the parsed `config` into a visualization in `#root`.
    fn boot_script(self) -> &'static str {
        match self {
            Framework::Tabulator => {
                r##"const { download = [], ...options } = config;
const table = new Tabulator("#root", options);
document.querySelectorAll("button[data-download]").forEach((button) => {
  const entry = download[Number(button.dataset.download)];
  button.addEventListener("click", () =>
    table.download(entry.format, entry.filename || "data." + entry.format, entry.options || {}));
});"##
            }
            Framework::ChartJs => r#"new Chart(document.getElementById("root"), config);"#,
            Framework::ApexCharts => r#"new ApexCharts(document.getElementById("root"), config).render();"#,
            Framework::VisNetwork => {
                r#"new vis.Network(document.getElementById("root"), config.data, config.options || {});"#
            }
            Framework::VisTimeline => {
                r#"const root = document.getElementById("root");
if (config.groups) {
  new vis.Timeline(root, config.items, config.groups, config.options || {});
} else {
  new vis.Timeline(root, config.items, config.options || {});
}"#
            }
            Framework::VisGraph3d => {
                r#"new vis.Graph3d(document.getElementById("root"), config.data, config.options || {});"#
            }
            Framework::FabricJs => {
                r#"const canvas = new fabric.Canvas("root", config.canvas || {});
canvas.loadFromJSON(config, () => canvas.renderAll());"#
            }
        }
    }

    fn root_element(self) -> &'static str {
        match self {
            Framework::ChartJs | Framework::FabricJs => r#"<canvas id="root"></canvas>"#,
            Framework::VisNetwork | Framework::VisGraph3d => r#"<div id="root" style="height: 90vh"></div>"#,
            _ => r#"<div id="root"></div>"#,
        }
    }
}

impl fmt::Display for Framework {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmitError {
    #[error("{framework} configuration: {path}: {message}")]
    Schema { framework: Framework, path: String, message: String },
}

/// Pinned script and style URLs of a framework.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CdnAssets {
    pub scripts: Vec<String>,
    pub styles: Vec<String>,
}

const CDN_MANIFEST: &str = include_str!("../assets/cdn.json");

/// The CDN URLs pinned for `framework`.
pub fn cdn_assets(framework: Framework) -> CdnAssets {
    static MANIFEST: OnceLock<JsonValue> = OnceLock::new();
    let manifest = MANIFEST.get_or_init(|| parse_relaxed(CDN_MANIFEST).expect("bundled CDN manifest parses"));
    let urls = |kind: &str| -> Vec<String> {
        manifest
            .get(framework.name())
            .and_then(|entry| entry.get(kind))
            .and_then(JsonValue::as_array)
            .map(|items| items.iter().filter_map(|u| u.as_str().map(str::to_string)).collect())
            .unwrap_or_default()
    };
    CdnAssets { scripts: urls("scripts"), styles: urls("styles") }
}

enum Expect {
    Array,
    Object,
    String,
}

fn check(framework: Framework, config: &JsonValue, member: &str, expect: Expect) -> Result<(), EmitError> {
    let path = format!("$.{member}");
    let error = |message: String| EmitError::Schema { framework, path: path.clone(), message };
    let value = config.get(member).ok_or_else(|| error("required member is missing".into()))?;
    let ok = match expect {
        Expect::Array => value.as_array().is_some(),
        Expect::Object => value.as_object().is_some(),
        Expect::String => value.as_str().is_some(),
    };
    if ok {
        Ok(())
    } else {
        let wanted = match expect {
            Expect::Array => "an array",
            Expect::Object => "an object",
            Expect::String => "a string",
        };
        Err(error(format!("expected {wanted}, found {}", value.kind())))
    }
}

/// Shallow structural checks; everything else passes through untouched.
pub fn validate_config(framework: Framework, config: &JsonValue) -> Result<(), EmitError> {
    if config.as_object().is_none() {
        return Err(EmitError::Schema {
            framework,
            path: "$".into(),
            message: format!("expected an object, found {}", config.kind()),
        });
    }
    match framework {
        Framework::Tabulator => {
            check(framework, config, "data", Expect::Array)?;
            check(framework, config, "columns", Expect::Array)?;
            if config.get("download").is_some() {
                check(framework, config, "download", Expect::Array)?;
                for (i, entry) in config.get("download").and_then(JsonValue::as_array).unwrap_or(&[]).iter().enumerate() {
                    if entry.get("format").and_then(JsonValue::as_str).is_none() {
                        return Err(EmitError::Schema {
                            framework,
                            path: format!("$.download[{i}].format"),
                            message: "each download entry needs a format string".into(),
                        });
                    }
                }
            }
        }
        Framework::ChartJs => {
            check(framework, config, "type", Expect::String)?;
            check(framework, config, "data", Expect::Object)?;
        }
        Framework::ApexCharts => {
            check(framework, config, "series", Expect::Array)?;
            check(framework, config, "chart", Expect::Object)?;
        }
        Framework::VisNetwork => check(framework, config, "data", Expect::Object)?,
        Framework::VisTimeline => check(framework, config, "items", Expect::Array)?,
        Framework::VisGraph3d => check(framework, config, "data", Expect::Array)?,
        Framework::FabricJs => check(framework, config, "objects", Expect::Array)?,
    }
    Ok(())
}

fn escape_html(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// Strict JSON safe inside a `<script>` element; `</` is written `<\/`.
pub fn embed_json(config: &JsonValue) -> String {
    to_strict(config).replace("</", "<\\/")
}

/// Recovers the strict JSON embedded in a page produced by [`emit_html`].
pub fn extract_config(page: &str) -> Option<String> {
    const OPEN: &str = r#"<script type="application/json" id="config">"#;
    let start = page.find(OPEN)? + OPEN.len();
    let end = start + page[start..].find("</script>")?;
    Some(page[start..end].replace("<\\/", "</"))
}

fn download_buttons(config: &JsonValue) -> String {
    let Some(entries) = config.get("download").and_then(JsonValue::as_array) else { return String::new() };
    let mut out = String::from("<div class=\"downloads\">\n");
    for (i, entry) in entries.iter().enumerate() {
        let format = entry.get("format").and_then(JsonValue::as_str).unwrap_or("csv");
        let color = entry.get("color").and_then(JsonValue::as_str).unwrap_or("primary");
        let label = entry
            .get("label")
            .and_then(JsonValue::as_str)
            .map_or_else(|| format!("Download {}", format.to_uppercase()), str::to_string);
        out.push_str(&format!(
            "  <button type=\"button\" class=\"download {}\" data-download=\"{i}\">{}</button>\n",
            escape_html(color),
            escape_html(&label)
        ));
    }
    out.push_str("</div>\n");
    out
}

/// A single HTML page rendering `config` with the framework's library.
pub fn emit_html(framework: Framework, config: &JsonValue) -> Result<String, EmitError> {
    validate_config(framework, config)?;
    let assets = cdn_assets(framework);
    let mut page = String::new();
    page.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    page.push_str(&format!("<title>{}</title>\n", escape_html(framework.title())));
    for style in &assets.styles {
        page.push_str(&format!("<link rel=\"stylesheet\" href=\"{}\">\n", escape_html(style)));
    }
    for script in &assets.scripts {
        page.push_str(&format!("<script src=\"{}\"></script>\n", escape_html(script)));
    }
    page.push_str(
        "<style>\nbody { font-family: sans-serif; margin: 1em; }\n\
         .downloads { margin-bottom: 0.5em; }\n\
         .download { margin-right: 0.5em; padding: 0.3em 0.8em; border: 0; border-radius: 4px; color: white; background: #0d6efd; }\n\
         .download.success { background: #198754; }\n.download.danger { background: #dc3545; }\n\
         .download.warning { background: #ffc107; color: black; }\n.download.info { background: #0dcaf0; color: black; }\n\
         .download.secondary { background: #6c757d; }\n.download.dark { background: #212529; }\n</style>\n",
    );
    page.push_str("</head>\n<body>\n");
    if framework == Framework::Tabulator {
        page.push_str(&download_buttons(config));
    }
    page.push_str(framework.root_element());
    page.push('\n');
    page.push_str(&format!("<script type=\"application/json\" id=\"config\">{}</script>\n", embed_json(config)));
    page.push_str("<script>\nconst config = JSON.parse(document.getElementById(\"config\").textContent);\n");
    page.push_str(framework.boot_script());
    page.push_str("\n</script>\n</body>\n</html>\n");
    Ok(page)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> JsonValue {
        parse_relaxed(text).unwrap()
    }

    #[test]
    fn every_framework_has_assets_and_a_name() {
        assert_eq!(Framework::ALL.len(), 7);
        for framework in Framework::ALL {
            assert_eq!(Framework::from_name(framework.name()), Some(framework));
            assert!(!cdn_assets(framework).scripts.is_empty(), "{framework}");
        }
    }

    #[test]
    fn missing_members_name_their_path() {
        let err = validate_config(Framework::Tabulator, &config("{ data: [] }")).unwrap_err();
        assert!(matches!(&err, EmitError::Schema { path, .. } if path == "$.columns"), "{err}");
        let err = validate_config(Framework::ChartJs, &config("{ type: bar, data: [] }")).unwrap_err();
        assert!(matches!(&err, EmitError::Schema { path, .. } if path == "$.data"));
        assert!(validate_config(Framework::Tabulator, &config("{ data: [], columns: [], foo: 1 }")).is_ok());
        assert!(validate_config(Framework::VisTimeline, &config("[]")).is_err());
    }

    #[test]
    fn minimal_chart_page() {
        let page = emit_html(Framework::ChartJs, &config("{type:\"bar\",data:{labels:[],datasets:[]}}")).unwrap();
        assert!(page.starts_with("<!DOCTYPE html>"));
        assert!(page.contains("chart.umd.min.js"));
        assert_eq!(extract_config(&page).unwrap(), r#"{"type":"bar","data":{"labels":[],"datasets":[]}}"#);
    }

    #[test]
    fn embedded_json_cannot_close_the_script() {
        let value = config(r#"{ type: "bar", data: { labels: ["</script><b>"] } }"#);
        let page = emit_html(Framework::ChartJs, &value).unwrap();
        assert_eq!(page.matches("</script>").count(), 1 + cdn_assets(Framework::ChartJs).scripts.len() + 1);
        assert_eq!(extract_config(&page).unwrap(), to_strict(&value));
    }

    #[test]
    fn tabulator_download_buttons() {
        let value = config(
            r#"{ data: [], columns: [], download: [ { color: "success", format: "csv", options: { delimiter: "\t" } } ] }"#,
        );
        let page = emit_html(Framework::Tabulator, &value).unwrap();
        assert!(page.contains(r#"<button type="button" class="download success" data-download="0">Download CSV</button>"#));
        assert!(page.contains("table.download(entry.format"));
    }
}
