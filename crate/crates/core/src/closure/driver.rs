use std::ops::Range;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use super::gram::{GramState, PreciseProjection, INVERSE_RESIDUAL_LIMIT};
use super::ortho::{project_residual, OrthoState};
use super::{CandidateSource, ClosureConfig, ClosureStats, ClosureWarning};
use crate::dense::{
    default_rank_tolerance, rank_independence_check, DenseOperator, StackedBasisMatrix,
};
use crate::error::{Error, Result};
use crate::ops::Operator;

/// Position of the next pending commutator `[B[l], B[r]]`.
///
/// Pairs are visited row by row: `r` runs over `0..l`, then `l` advances.
/// Each unordered pair of basis elements is therefore bracketed exactly once.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoopCursor {
    pub l: usize,
    pub r: usize,
}

impl Default for LoopCursor {
    fn default() -> Self {
        Self { l: 1, r: 0 }
    }
}

impl LoopCursor {
    pub fn new() -> Self {
        Self::default()
    }

    /// Next pair for a basis of current size `len`, or `None` once the closure
    /// is complete.
    pub fn next_pair(&mut self, len: usize) -> Option<(usize, usize)> {
        self.next_batch(len, 1).map(|(l, r)| (l, r.start))
    }

    /// Up to `max` consecutive pairs `(l, r)` for `r` in the returned range.
    /// Batches never cross a row.
    pub fn next_batch(&mut self, len: usize, max: usize) -> Option<(usize, Range<usize>)> {
        if self.l >= len {
            return None;
        }
        let l = self.l;
        let start = self.r;
        let end = (start + max.max(1)).min(l);
        self.r = end;
        if self.r == l {
            self.l += 1;
            self.r = 0;
        }
        Some((l, start..end))
    }
}

/// Outcome of one independence query.
pub(crate) trait Verdict: Send {
    fn independent(&self) -> bool;
    /// Residual norm of the unit-normalized candidate, when the test has one.
    fn residual(&self) -> Option<f64>;
}

pub(crate) struct Context<'a> {
    pub cfg: &'a ClosureConfig,
    pub stats: &'a mut ClosureStats,
    pub warnings: &'a mut Vec<ClosureWarning>,
}

pub(crate) trait Strategy<T: Operator>: Sync {
    type Verdict: Verdict;

    /// Elements that are bracketed against each other.
    fn elements(&self) -> &[T];

    fn check(&self, h: &T, h_norm: f64, cfg: &ClosureConfig) -> Result<Self::Verdict>;

    fn accept(
        &mut self,
        h: T,
        h_norm: f64,
        verdict: Self::Verdict,
        ctx: &mut Context<'_>,
    ) -> Result<()>;
}

fn unit<T: Operator>(h: &T, h_norm: f64) -> T {
    h.scaled(Complex64::new(1.0 / h_norm, 0.0))
}

pub(crate) struct RankStrategy<T> {
    basis: Vec<T>,
    stack: Option<StackedBasisMatrix>,
}

impl<T> RankStrategy<T> {
    pub fn new() -> Self {
        Self {
            basis: Vec::new(),
            stack: None,
        }
    }

    pub fn into_basis(self) -> Vec<T> {
        self.basis
    }
}

pub(crate) struct RankVerdict {
    independent: bool,
    dense: DenseOperator,
}

impl Verdict for RankVerdict {
    fn independent(&self) -> bool {
        self.independent
    }

    fn residual(&self) -> Option<f64> {
        None
    }
}

impl<T: Operator> Strategy<T> for RankStrategy<T> {
    type Verdict = RankVerdict;

    fn elements(&self) -> &[T] {
        &self.basis
    }

    fn check(&self, h: &T, _h_norm: f64, cfg: &ClosureConfig) -> Result<RankVerdict> {
        let dense = h.to_dense()?;
        let d = dense.dim();
        let empty;
        let stack = match &self.stack {
            Some(s) => s,
            None => {
                empty = StackedBasisMatrix::new(d);
                &empty
            }
        };
        let tol = cfg
            .rank_tolerance
            .unwrap_or_else(|| default_rank_tolerance(stack.nrows(), stack.ncols() + 1));
        let independent = rank_independence_check(stack, &dense, tol)?;
        Ok(RankVerdict { independent, dense })
    }

    fn accept(&mut self, h: T, _h_norm: f64, v: RankVerdict, _ctx: &mut Context<'_>) -> Result<()> {
        let d = v.dense.dim();
        self.stack
            .get_or_insert_with(|| StackedBasisMatrix::new(d))
            .push(&v.dense)?;
        self.basis.push(h);
        Ok(())
    }
}

pub(crate) struct InversionStrategy<T> {
    basis: Vec<T>,
    gram: GramState,
}

impl<T> InversionStrategy<T> {
    pub fn new() -> Self {
        Self {
            basis: Vec::new(),
            gram: GramState::new(),
        }
    }

    pub fn into_parts(self) -> (Vec<T>, GramState) {
        (self.basis, self.gram)
    }
}

pub(crate) struct InversionVerdict<T> {
    independent: bool,
    residual: f64,
    precise: Option<PreciseProjection>,
    unit: T,
}

impl<T: Send> Verdict for InversionVerdict<T> {
    fn independent(&self) -> bool {
        self.independent
    }

    fn residual(&self) -> Option<f64> {
        Some(self.residual)
    }
}

impl<T: Operator> Strategy<T> for InversionStrategy<T> {
    type Verdict = InversionVerdict<T>;

    fn elements(&self) -> &[T] {
        &self.basis
    }

    fn check(&self, h: &T, h_norm: f64, cfg: &ClosureConfig) -> Result<InversionVerdict<T>> {
        let u = unit(h, h_norm);
        let r = super::gram::check_matrix_inversion(&self.gram, &self.basis, &u, cfg.tolerance)?;
        Ok(InversionVerdict {
            independent: r.independent,
            residual: r.residual,
            precise: r.precise,
            unit: u,
        })
    }

    fn accept(
        &mut self,
        _h: T,
        _h_norm: f64,
        v: InversionVerdict<T>,
        ctx: &mut Context<'_>,
    ) -> Result<()> {
        let element = self.gram.len();
        let p = match v.precise {
            Some(p) => p,
            None => PreciseProjection::compute(&self.basis, &v.unit)?,
        };
        let s = self
            .gram
            .expand_dd(&p.beta, p.norm_sq, ctx.cfg.conditioning_floor)?;
        if s < ctx.cfg.tolerance * ctx.cfg.tolerance {
            log::warn!("element {element} accepted with schur complement {s:e}");
            ctx.warnings
                .push(ClosureWarning::IllConditioned { element, schur: s });
        }
        self.basis.push(v.unit);
        let size = self.gram.len();
        let k = ctx.cfg.refresh_interval;
        if k > 0 && size % k == 0 {
            if size <= DRIFT_CHECK_LIMIT {
                let drift = self.gram.inverse_residual();
                if drift > INVERSE_RESIDUAL_LIMIT {
                    ctx.warnings.push(ClosureWarning::InverseDrift {
                        size,
                        residual: drift,
                    });
                }
            }
            match self.gram.refresh_inverse() {
                Ok(()) => ctx.stats.inverse_refreshes += 1,
                Err(e) => {
                    log::warn!("gram refresh at size {size} failed: {e}");
                    ctx.warnings.push(ClosureWarning::RefreshFailed {
                        size,
                        message: e.to_string(),
                    });
                }
            }
        }
        if ctx.cfg.check_invariants && size <= INVARIANT_CHECK_LIMIT {
            let min_eig = self.gram.min_eigenvalue()?;
            if !(min_eig > 0.0) {
                ctx.warnings.push(ClosureWarning::GramNotPositive {
                    size,
                    min_eigenvalue: min_eig,
                });
            }
            let drift = self.gram.inverse_residual();
            if drift > INVERSE_RESIDUAL_LIMIT {
                ctx.warnings.push(ClosureWarning::InverseDrift {
                    size,
                    residual: drift,
                });
            }
        }
        Ok(())
    }
}

/// Largest basis for which the O(N^3) drift measurement runs at refresh time.
const DRIFT_CHECK_LIMIT: usize = 1024;
/// Largest basis for which per-acceptance invariant checks run.
const INVARIANT_CHECK_LIMIT: usize = 512;
/// Orthonormality tolerance of the invariant check.
const ORTHONORMALITY_TOL: f64 = 1e-10;

pub(crate) struct OrthoStrategy<T> {
    state: OrthoState<T>,
}

impl<T: Operator> OrthoStrategy<T> {
    pub fn new(keep_original: bool) -> Self {
        Self {
            state: OrthoState::new(keep_original),
        }
    }

    pub fn into_state(self) -> OrthoState<T> {
        self.state
    }
}

pub(crate) struct OrthoVerdict<T> {
    residual: f64,
    perp: T,
    tolerance: f64,
}

impl<T: Send> Verdict for OrthoVerdict<T> {
    fn independent(&self) -> bool {
        self.residual > self.tolerance
    }

    fn residual(&self) -> Option<f64> {
        Some(self.residual)
    }
}

impl<T: Operator> Strategy<T> for OrthoStrategy<T> {
    type Verdict = OrthoVerdict<T>;

    fn elements(&self) -> &[T] {
        self.state.b.as_deref().unwrap_or(&self.state.v)
    }

    fn check(&self, h: &T, h_norm: f64, cfg: &ClosureConfig) -> Result<OrthoVerdict<T>> {
        let (perp, _) = project_residual(&self.state.v, &unit(h, h_norm))?;
        Ok(OrthoVerdict {
            residual: perp.norm(),
            perp,
            tolerance: cfg.tolerance,
        })
    }

    fn accept(
        &mut self,
        h: T,
        _h_norm: f64,
        v: OrthoVerdict<T>,
        ctx: &mut Context<'_>,
    ) -> Result<()> {
        let new = unit(&v.perp, v.residual);
        if ctx.cfg.check_invariants && self.state.v.len() < INVARIANT_CHECK_LIMIT {
            let mut worst = (new.norm() - 1.0).abs();
            for e in &self.state.v {
                worst = worst.max(e.inner_product(&new)?.norm());
            }
            if worst > ORTHONORMALITY_TOL {
                ctx.warnings.push(ClosureWarning::OrthonormalityLoss {
                    size: self.state.v.len() + 1,
                    error: worst,
                });
            }
        }
        self.state.v.push(new);
        if let Some(b) = &mut self.state.b {
            b.push(h);
        }
        Ok(())
    }
}

struct Candidate<T> {
    source: CandidateSource,
    op: Option<T>,
    norm: f64,
}

pub(crate) struct Driver<'a> {
    cfg: &'a ClosureConfig,
    pool: Option<rayon::ThreadPool>,
    start: Instant,
    cap: usize,
    pub stats: ClosureStats,
    pub warnings: Vec<ClosureWarning>,
}

impl<'a> Driver<'a> {
    pub fn new(cfg: &'a ClosureConfig, dim: usize) -> Result<Self> {
        cfg.validate()?;
        let pool = if cfg.threads > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(cfg.threads)
                    .build()
                    .map_err(|e| {
                        Error::invalid(format!("cannot start {} worker threads: {e}", cfg.threads))
                    })?,
            )
        } else {
            None
        };
        let cap = cfg
            .max_dim
            .unwrap_or_else(|| dim.checked_mul(dim).unwrap_or(usize::MAX));
        Ok(Self {
            cfg,
            pool,
            start: Instant::now(),
            cap,
            stats: ClosureStats::default(),
            warnings: Vec::new(),
        })
    }

    fn check_deadline(&self) -> Result<()> {
        if let Some(limit) = self.cfg.timeout {
            let elapsed = self.start.elapsed();
            if elapsed > limit {
                return Err(Error::Timeout(elapsed.as_secs_f64()));
            }
        }
        Ok(())
    }

    fn map<I: Sync, O: Send>(&self, items: &[I], f: impl Fn(&I) -> O + Sync + Send) -> Vec<O> {
        match &self.pool {
            Some(pool) if items.len() > 1 => pool.install(|| items.par_iter().map(&f).collect()),
            _ => items.iter().map(f).collect(),
        }
    }

    pub fn run<T: Operator, S: Strategy<T>>(
        &mut self,
        generators: &[T],
        strategy: &mut S,
    ) -> Result<()> {
        self.start = Instant::now();
        let first = generators
            .first()
            .ok_or_else(|| Error::invalid("generator set is empty"))?;
        for (i, g) in generators.iter().enumerate() {
            if g.backend() != first.backend() || g.dim() != first.dim() {
                return Err(Error::invalid(format!(
                    "generator {i} is a {} operator of dimension {}, generator 0 is {} of dimension {}",
                    g.backend(),
                    g.dim(),
                    first.backend(),
                    first.dim()
                )));
            }
        }

        for (i, g) in generators.iter().enumerate() {
            let norm = g.norm();
            if !norm.is_finite() {
                return Err(Error::invalid(format!("generator {i} has non-finite norm")));
            }
            if norm == 0.0 {
                log::debug!("generator {i} is null, skipped");
                self.warnings
                    .push(ClosureWarning::NullGenerator { index: i });
                self.stats.null_generators += 1;
                continue;
            }
            let c = Candidate {
                source: CandidateSource::Generator(i),
                op: Some(g.clone()),
                norm,
            };
            self.process(strategy, vec![c])?;
        }

        let batch = self.cfg.batch_size.max(1);
        let mut cursor = LoopCursor::new();
        let mut norms: Vec<f64> = Vec::new();
        loop {
            self.check_deadline()?;
            let len = strategy.elements().len();
            let Some((l, range)) = cursor.next_batch(len, batch) else {
                break;
            };
            let elements = strategy.elements();
            for e in &elements[norms.len()..] {
                norms.push(e.norm());
            }
            let pairs: Vec<usize> = range.collect();
            let comms = self.map(&pairs, |&m| elements[l].commutator(&elements[m]));
            self.stats.commutators_evaluated += pairs.len() as u64;
            let mut candidates = Vec::new();
            for (&m, c) in pairs.iter().zip(comms) {
                let c = c?;
                let norm = c.norm();
                if norm <= self.cfg.tolerance * norms[l] * norms[m] {
                    self.stats.null_commutators += 1;
                    continue;
                }
                candidates.push(Candidate {
                    source: CandidateSource::Pair(l, m),
                    op: Some(c),
                    norm,
                });
            }
            self.process(strategy, candidates)?;
        }
        self.stats.accepted = strategy.elements().len();
        self.stats.wall_time_s = self.start.elapsed().as_secs_f64();
        Ok(())
    }

    /// Test candidates in order against the current basis.
    ///
    /// With a worker pool, a window of candidates is checked concurrently
    /// against the same basis snapshot. The verdicts are consumed in order up
    /// to the first acceptance; checks after it saw a stale basis and are
    /// redone in the next window.
    fn process<T: Operator, S: Strategy<T>>(
        &mut self,
        strategy: &mut S,
        mut candidates: Vec<Candidate<T>>,
    ) -> Result<()> {
        let window = match &self.pool {
            Some(_) => 2 * self.cfg.threads,
            None => 1,
        };
        let mut i = 0;
        while i < candidates.len() {
            self.check_deadline()?;
            let end = (i + window).min(candidates.len());
            let cfg = self.cfg;
            let snapshot: &S = strategy;
            let verdicts = self.map(&candidates[i..end], |c| {
                snapshot.check(
                    c.op.as_ref().expect("candidate consumed twice"),
                    c.norm,
                    cfg,
                )
            });
            let mut advance = end - i;
            for (k, v) in verdicts.into_iter().enumerate() {
                let v = v?;
                self.stats.independence_checks += 1;
                let c = &mut candidates[i + k];
                if let Some(r) = v.residual() {
                    let tol = self.cfg.tolerance;
                    if r >= tol / 10.0 && r <= tol * 10.0 {
                        log::warn!(
                            "residual {r:e} of {:?} is within a factor 10 of the tolerance",
                            c.source
                        );
                        self.warnings.push(ClosureWarning::NearThreshold {
                            source: c.source,
                            residual: r,
                            tolerance: tol,
                        });
                    }
                }
                if v.independent() {
                    let len = strategy.elements().len();
                    if len >= self.cap {
                        return Err(Error::Capacity(format!(
                            "basis would exceed the cap of {} elements",
                            self.cap
                        )));
                    }
                    let op = c.op.take().expect("candidate consumed twice");
                    let norm = c.norm;
                    let mut ctx = Context {
                        cfg: self.cfg,
                        stats: &mut self.stats,
                        warnings: &mut self.warnings,
                    };
                    strategy.accept(op, norm, v, &mut ctx)?;
                    advance = k + 1;
                    break;
                }
            }
            i += advance;
        }
        Ok(())
    }
}
