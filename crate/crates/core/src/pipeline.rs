//! Token-generation loop over synthetic token and predicate spaces.
//!
//! One step maps the latest token through
//!
//! ```text
//! one-hot (V) --Lplus--> predicate estimate (P) --M--> activation (P)
//!             --S--> scores (V) --argmax--> token --L--> reconstruction (P)
//! ```
//!
//! and reports `||reconstruction - activation||` as the hallucination
//! residual. Earlier history is kept for logging but does not enter the
//! linear chain.

use std::collections::HashMap;
use std::io::Write;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{norm2, LinearOperator, Matrix, ALIAS_TOL, DEFAULT_RANK_TOL};
use crate::scalar::Real;

/// Bijection between surface symbols and token ids `0..V`.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenTable {
    symbols: Vec<String>,
    ids: HashMap<String, usize>,
}

impl TokenTable {
    pub fn new(symbols: Vec<String>) -> Result<Self> {
        if symbols.is_empty() {
            return domain("token table is empty");
        }
        let mut ids = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if ids.insert(s.clone(), i).is_some() {
                return domain(format!("symbol {s:?} appears twice in the token table"));
            }
        }
        Ok(Self { symbols, ids })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn tokenize(&self, symbol: &str) -> Result<usize> {
        self.ids
            .get(symbol)
            .copied()
            .ok_or_else(|| Error::Domain(format!("unknown symbol {symbol:?}")))
    }

    pub fn detokenize(&self, id: usize) -> Result<&str> {
        self.symbols.get(id).map(String::as_str).ok_or_else(|| {
            Error::Domain(format!(
                "token id {id} outside vocabulary of {}",
                self.len()
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig<S> {
    tokens: TokenTable,
    lplus: LinearOperator<S>,
    m: LinearOperator<S>,
    s: LinearOperator<S>,
    l: LinearOperator<S>,
}

impl<S: Real> PipelineConfig<S> {
    /// Checks every operator shape against `V = tokens.len()` and
    /// `P = lplus.rows()`, and that `M` has full rank. Without an explicit
    /// `l`, the reconstruction is the transposed pseudoinverse of `lplus`.
    pub fn new(
        tokens: TokenTable,
        lplus: LinearOperator<S>,
        m: LinearOperator<S>,
        s: LinearOperator<S>,
        l: Option<LinearOperator<S>>,
    ) -> Result<Self> {
        let v = tokens.len();
        let p = lplus.rows();
        let expect = |name: &str, op: &LinearOperator<S>, rows: usize, cols: usize| {
            if (op.rows(), op.cols()) != (rows, cols) {
                Err(Error::Config(format!(
                    "{name} is {}x{}, expected {rows}x{cols} (V = {v}, P = {p})",
                    op.rows(),
                    op.cols()
                )))
            } else {
                Ok(())
            }
        };
        if p == 0 {
            return Err(Error::Config("predicate dimension must be positive".into()));
        }
        expect("lplus", &lplus, p, v)?;
        expect("m", &m, p, p)?;
        expect("s", &s, v, p)?;
        let m_rank = m.rank();
        if m_rank != p {
            return Err(Error::Config(format!(
                "m has rank {m_rank}, must be invertible (rank {p})"
            )));
        }
        let l = match l {
            Some(l) => l,
            None => {
                let pinv = lplus.pseudoinverse()?;
                LinearOperator::with_rank_tol(pinv.matrix().transpose(), lplus.rank_tol())?
            }
        };
        expect("l", &l, p, v)?;
        Ok(Self {
            tokens,
            lplus,
            m,
            s,
            l,
        })
    }

    /// Every operator the identity on `V = P` symbols.
    pub fn identity(symbols: Vec<String>) -> Result<Self> {
        let n = symbols.len();
        let id = || LinearOperator::identity(n);
        Self::new(TokenTable::new(symbols)?, id(), id(), id(), Some(id()))
    }

    pub fn tokens(&self) -> &TokenTable {
        &self.tokens
    }

    pub fn vocab(&self) -> usize {
        self.tokens.len()
    }

    pub fn pred_dim(&self) -> usize {
        self.lplus.rows()
    }

    pub fn lplus(&self) -> &LinearOperator<S> {
        &self.lplus
    }

    pub fn m(&self) -> &LinearOperator<S> {
        &self.m
    }

    pub fn s(&self) -> &LinearOperator<S> {
        &self.s
    }

    pub fn l(&self) -> &LinearOperator<S> {
        &self.l
    }

    pub fn tokenize(&self, symbol: &str) -> Result<usize> {
        self.tokens.tokenize(symbol)
    }

    pub fn detokenize(&self, id: usize) -> Result<&str> {
        self.tokens.detokenize(id)
    }

    fn one_hot(&self, id: usize) -> Vec<S> {
        let mut e = vec![S::zero(); self.vocab()];
        e[id] = S::one();
        e
    }
}

/// Index of the largest score; ties go to the lowest index.
pub fn select<S: Real>(scores: &[S]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, s) in scores.iter().enumerate() {
        if best.is_none_or(|b| *s > scores[b]) {
            best = Some(i);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepTrace<S> {
    pub input_token: usize,
    pub predicate_estimate: Vec<S>,
    pub activation: Vec<S>,
    pub scores: Vec<S>,
    pub selected_token: usize,
    pub reconstruction: Vec<S>,
    pub hallucination_residual: S,
}

pub fn step<S: Real>(cfg: &PipelineConfig<S>, history: &[usize]) -> Result<StepTrace<S>> {
    let Some(&last) = history.last() else {
        return domain("history is empty");
    };
    if let Some(bad) = history.iter().find(|&&t| t >= cfg.vocab()) {
        return domain(format!(
            "token id {bad} outside vocabulary of {}",
            cfg.vocab()
        ));
    }
    let predicate_estimate = cfg.lplus.apply(&cfg.one_hot(last))?;
    let activation = cfg.m.apply(&predicate_estimate)?;
    let scores = cfg.s.apply(&activation)?;
    let selected_token = select(&scores).expect("vocabulary is nonempty");
    let reconstruction = cfg.l.apply(&cfg.one_hot(selected_token))?;
    let gap: Vec<S> = reconstruction
        .iter()
        .zip(&activation)
        .map(|(r, a)| *r - *a)
        .collect();
    let hallucination_residual = gap.iter().fold(S::zero(), |acc, x| acc + *x * *x).sqrt();
    Ok(StepTrace {
        input_token: last,
        predicate_estimate,
        activation,
        scores,
        selected_token,
        reconstruction,
        hallucination_residual,
    })
}

/// Iterates [`step`], appending each selected token to the history.
pub fn run<S: Real>(
    cfg: &PipelineConfig<S>,
    seed_history: &[usize],
    steps: usize,
) -> Result<Vec<StepTrace<S>>> {
    if steps == 0 {
        return domain("steps must be at least 1");
    }
    let mut history = seed_history.to_vec();
    let mut traces = Vec::with_capacity(steps);
    for _ in 0..steps {
        let t = step(cfg, &history)?;
        history.push(t.selected_token);
        traces.push(t);
    }
    Ok(traces)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AliasedPair {
    pub a: usize,
    pub b: usize,
    pub symbol_a: String,
    pub symbol_b: String,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSpaceReport<S> {
    pub vocab: usize,
    pub pred_dim: usize,
    pub rank: usize,
    pub nullity: usize,
    pub basis: Vec<Vec<S>>,
    pub aliased_pairs: Vec<AliasedPair>,
}

/// Rank and kernel of `lplus`, and every token pair `a < b` whose one-hots
/// it maps within [`ALIAS_TOL`] of each other.
pub fn null_space_report<S: Real>(cfg: &PipelineConfig<S>) -> NullSpaceReport<S> {
    let ns = cfg.lplus.null_space_basis();
    let cols: Vec<Vec<S>> = (0..cfg.vocab())
        .map(|j| cfg.lplus.matrix().column(j))
        .collect();
    let mut aliased_pairs = Vec::new();
    for a in 0..cols.len() {
        for b in (a + 1)..cols.len() {
            let diff: Vec<S> = cols[a].iter().zip(&cols[b]).map(|(x, y)| *x - *y).collect();
            let distance = norm2(&diff);
            if distance <= ALIAS_TOL {
                aliased_pairs.push(AliasedPair {
                    a,
                    b,
                    symbol_a: cfg.tokens.symbols[a].clone(),
                    symbol_b: cfg.tokens.symbols[b].clone(),
                    distance,
                });
            }
        }
    }
    NullSpaceReport {
        vocab: cfg.vocab(),
        pred_dim: cfg.pred_dim(),
        rank: cfg.vocab() - ns.dim,
        nullity: ns.dim,
        basis: ns.basis,
        aliased_pairs,
    }
}

/// Pipeline config file: operators in the `{rows, cols, data}` matrix
/// record format, plus the token table and an optional seed history.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(
    serialize = "S: Real + Serialize",
    deserialize = "S: Real + DeserializeOwned"
))]
pub struct PipelineFile<S> {
    pub symbols: Vec<String>,
    pub lplus: Matrix<S>,
    pub m: Matrix<S>,
    pub s: Matrix<S>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<Matrix<S>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_history: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
}

impl<S: Real + DeserializeOwned> PipelineFile<S> {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("pipeline config: {e}")))
    }
}

impl<S: Real> PipelineFile<S> {
    pub fn into_config(self) -> Result<(PipelineConfig<S>, Vec<usize>)> {
        let tol = self.rank_tol.unwrap_or(DEFAULT_RANK_TOL);
        let op = |m: Matrix<S>| {
            LinearOperator::with_rank_tol(m, tol).map_err(|e| Error::Config(e.to_string()))
        };
        let tokens = TokenTable::new(self.symbols).map_err(|e| Error::Config(e.to_string()))?;
        let l = self.l.map(op).transpose()?;
        let cfg = PipelineConfig::new(tokens, op(self.lplus)?, op(self.m)?, op(self.s)?, l)?;
        let seed = match self.seed_history {
            Some(symbols) => symbols
                .iter()
                .map(|s| cfg.tokenize(s).map_err(|e| Error::Config(e.to_string())))
                .collect::<Result<Vec<_>>>()?,
            None => vec![0],
        };
        Ok((cfg, seed))
    }
}

/// One JSON object per line.
pub fn write_trace_jsonl<S: Real + Serialize, W: Write>(
    traces: &[StepTrace<S>],
    mut out: W,
) -> Result<()> {
    for t in traces {
        serde_json::to_writer(&mut out, t)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// `step,selected_token,residual`, steps numbered from 1.
pub fn write_summary_csv<S: Real, W: Write>(traces: &[StepTrace<S>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "selected_token", "residual"])?;
    for (i, t) in traces.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            t.selected_token.to_string(),
            t.hallucination_residual.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
