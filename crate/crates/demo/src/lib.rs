//! Browser bindings for exploring walks on small graphs.
//!
//! [`Session`] holds the Rust-side state and is usable (and tested) natively;
//! [`Explorer`] is the thin `wasm-bindgen` wrapper the page talks to. All
//! results cross the boundary as JSON strings.

use arcwalk::community::{self, AverageSource, DEFAULT_MARGINAL_BAND};
use arcwalk::datasets;
use arcwalk::evolution::{finite_time_matrix, AveragingWindow, TransitionMatrix};
use arcwalk::loaders::load_edge_list;
use arcwalk::spectral::{self, SpectralDecomposition, DEFAULT_DEGENERACY_TOL};
use arcwalk::{CoinKind, Graph, WalkOperator};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest arc count the page will diagonalize.
pub const DEMO_DENSE_CAP: usize = 600;

pub struct Session {
    graph: Graph,
    coin: CoinKind,
    decomposition: Option<SpectralDecomposition>,
    infinite: Option<TransitionMatrix>,
}

impl Session {
    pub fn builtin(name: &str, coin: &str) -> Result<Self, String> {
        let graph = datasets::builtin(name).map_err(|e| e.to_string())?;
        Self::new(graph, coin)
    }

    pub fn from_edge_list(text: &str, coin: &str) -> Result<Self, String> {
        let graph = load_edge_list(text).map_err(|e| e.to_string())?;
        Self::new(graph, coin)
    }

    fn new(graph: Graph, coin: &str) -> Result<Self, String> {
        Ok(Self {
            graph,
            coin: coin.parse()?,
            decomposition: None,
            infinite: None,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn set_coin(&mut self, coin: &str) -> Result<(), String> {
        let coin: CoinKind = coin.parse()?;
        if coin != self.coin {
            self.coin = coin;
            self.decomposition = None;
            self.infinite = None;
        }
        Ok(())
    }

    pub fn summary(&self) -> Value {
        let g = &self.graph;
        json!({
            "nodes": g.node_count(),
            "arcs": g.arc_count(),
            "betti": g.betti_number().unwrap_or(0),
            "bipartite": g.is_bipartite(),
            "coin": self.coin.to_string(),
            "edges": g.edges().iter().map(|(a, b)| [a + 1, b + 1]).collect::<Vec<_>>(),
        })
    }

    fn decomposition(&mut self) -> Result<&SpectralDecomposition, String> {
        if self.decomposition.is_none() {
            let dec = spectral::decompose_walk(&self.graph, self.coin, DEMO_DENSE_CAP, DEFAULT_DEGENERACY_TOL)
                .map_err(|e| e.to_string())?;
            self.decomposition = Some(dec);
        }
        Ok(self.decomposition.as_ref().expect("just filled"))
    }

    fn infinite(&mut self) -> Result<&TransitionMatrix, String> {
        if self.infinite.is_none() {
            self.decomposition()?;
            let dec = self.decomposition.as_ref().expect("just filled");
            let m = spectral::infinite_time_matrix(dec, &self.graph).map_err(|e| e.to_string())?;
            self.infinite = Some(m);
        }
        Ok(self.infinite.as_ref().expect("just filled"))
    }

    fn averaged(&mut self, steps: usize) -> Result<(TransitionMatrix, AverageSource), String> {
        if steps == 0 {
            return Ok((self.infinite()?.clone(), AverageSource::InfiniteTime));
        }
        let op = WalkOperator::new(&self.graph, self.coin);
        let m = finite_time_matrix(&op, AveragingWindow::new(steps)).map_err(|e| e.to_string())?;
        let source = AverageSource::FiniteTime {
            steps,
            include_initial: false,
        };
        Ok((m, source))
    }

    /// Normalized averaged matrix; `steps = 0` selects the infinite-time average.
    pub fn heatmap(&mut self, steps: usize) -> Result<Value, String> {
        let (m, _) = self.averaged(steps)?;
        let n = m.size;
        let rows: Vec<&[f64]> = (0..n).map(|i| m.normalized_row(i)).collect();
        Ok(json!({
            "size": n,
            "max": m.max_normalized(),
            "threshold": 1.0 / self.graph.arc_count() as f64,
            "rows": rows,
        }))
    }

    pub fn spectrum(&mut self) -> Result<Value, String> {
        let graph = self.graph.clone();
        let dec = self.decomposition()?;
        let iprs = spectral::ipr(dec, &graph).map_err(|e| e.to_string())?;
        let report = spectral::degeneracy_report(dec, &graph).map_err(|e| e.to_string())?;
        let points: Vec<Value> = dec
            .eigenvalues()
            .iter()
            .zip(&iprs)
            .map(|(z, ipr)| json!({ "re": z.re, "im": z.im, "ipr": ipr }))
            .collect();
        Ok(json!({
            "eigenvalues": points,
            "plus_one": report.plus_one,
            "minus_one": report.minus_one,
            "predicted": [report.predicted_plus_one, report.predicted_minus_one],
            "max_multiplicity": report.max_multiplicity(),
        }))
    }

    /// Communities at threshold `q` (`q ≤ 0` means `1/D`).
    pub fn detect(&mut self, q: f64, steps: usize) -> Result<Value, String> {
        let q = if q > 0.0 { q } else { 1.0 / self.graph.arc_count() as f64 };
        let (m, source) = self.averaged(steps)?;
        let partition = community::detect(&m, &self.graph, q, source).map_err(|e| e.to_string())?;
        let margins = community::margin_report(&partition, &m, DEFAULT_MARGINAL_BAND);
        let marginal: Vec<usize> = margins.iter().filter(|m| m.is_marginal()).map(|m| m.node + 1).collect();
        Ok(json!({
            "threshold": q,
            "hubs": partition.hubs.iter().map(|h| h + 1).collect::<Vec<_>>(),
            "assignment": partition.assignment,
            "sizes": partition.sizes(),
            "marginal": marginal,
        }))
    }
}

fn to_js(result: Result<Value, String>) -> Result<String, JsError> {
    result.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub struct Explorer {
    session: Session,
}

#[wasm_bindgen]
impl Explorer {
    /// Opens a builtin graph such as `karate` or `cycle(8)`.
    #[wasm_bindgen(constructor)]
    pub fn new(graph: &str, coin: &str) -> Result<Explorer, JsError> {
        Session::builtin(graph, coin)
            .map(|session| Explorer { session })
            .map_err(|e| JsError::new(&e))
    }

    /// Opens a graph from 1-based edge-list text.
    #[wasm_bindgen(js_name = fromEdgeList)]
    pub fn from_edge_list(text: &str, coin: &str) -> Result<Explorer, JsError> {
        Session::from_edge_list(text, coin)
            .map(|session| Explorer { session })
            .map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = setCoin)]
    pub fn set_coin(&mut self, coin: &str) -> Result<(), JsError> {
        self.session.set_coin(coin).map_err(|e| JsError::new(&e))
    }

    pub fn summary(&self) -> String {
        self.session.summary().to_string()
    }

    pub fn heatmap(&mut self, steps: usize) -> Result<String, JsError> {
        to_js(self.session.heatmap(steps))
    }

    pub fn spectrum(&mut self) -> Result<String, JsError> {
        to_js(self.session.spectrum())
    }

    pub fn detect(&mut self, q: f64, steps: usize) -> Result<String, JsError> {
        to_js(self.session.detect(q, steps))
    }
}
