//! Browser bindings over the bundled sample corpus.
//!
//! Every method takes and returns JSON strings so the page script stays a
//! thin renderer. The page never scores anything itself.

use ontorank_core::fixtures::{SAMPLE_OBO, SAMPLE_TSV};
use ontorank_core::{ApiError, Engine, IngestMode, MeasureSpec, QueryRequest};
use serde_json::json;
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct Demo {
    engine: Engine,
}

#[wasm_bindgen]
impl Demo {
    /// Loads the sample ontology and annotations compiled into the module.
    #[wasm_bindgen(constructor)]
    pub fn new() -> Result<Demo, JsValue> {
        Self::from_sources(SAMPLE_OBO, SAMPLE_TSV).map_err(|e| JsValue::from_str(&e))
    }

    /// `{"status","docCount","conceptCount"}`
    pub fn health(&self) -> String {
        serde_json::to_string(&self.engine.health()).expect("health serializes")
    }

    /// Query request JSON in, query response JSON out. Errors come back as
    /// `{"error":{"code","message"}}`.
    pub fn query(&self, request: &str) -> String {
        let started = js_sys::Date::now();
        self.query_json(request, || js_sys::Date::now() - started)
    }

    /// `[{"id","label"}]`
    pub fn autocomplete(&self, prefix: &str, limit: usize) -> String {
        serde_json::to_string(&self.engine.autocomplete(prefix, limit)).expect("hits serialize")
    }

    /// `{"measure","c1","c2","raw","similarity"}` or an error body.
    pub fn similarity(&self, measure: &str, c1: &str, c2: &str) -> String {
        self.similarity_json(measure, c1, c2)
    }

    /// Document view JSON, or an error body for unknown ids.
    pub fn document(&self, id: &str) -> String {
        match self.engine.document(id) {
            Some(view) => serde_json::to_string(&view).expect("views serialize"),
            None => ApiError::not_found(format!("no document {id}")).body().to_string(),
        }
    }
}

impl Demo {
    pub fn from_sources(ontology: &str, annotations: &str) -> Result<Demo, String> {
        let (engine, _) = Engine::from_sources(ontology, annotations, IngestMode::Strict).map_err(|e| e.to_string())?;
        Ok(Demo { engine })
    }

    fn query_json(&self, request: &str, elapsed_ms: impl FnOnce() -> f64) -> String {
        let parsed: Result<QueryRequest, ApiError> =
            serde_json::from_str(request).map_err(|e| ApiError::bad_query(format!("malformed query body: {e}")));
        match parsed.and_then(|r| self.engine.respond(&r)) {
            Ok(mut response) => {
                response.timing_ms = elapsed_ms();
                serde_json::to_string(&response).expect("responses serialize")
            }
            Err(e) => e.body().to_string(),
        }
    }

    fn similarity_json(&self, measure: &str, c1: &str, c2: &str) -> String {
        let result = measure
            .parse::<MeasureSpec>()
            .and_then(|spec| self.engine.similarity(spec, c1, c2));
        match result {
            Ok(pair) => serde_json::to_string(&pair).expect("pairs serialize"),
            Err(e) => json!({ "error": { "code": "BAD_QUERY", "message": e.to_string() } }).to_string(),
        }
    }
}
