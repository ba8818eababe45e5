use super::kernel::{Batch, Factored, Gathered};
use super::loss::{balanced_loss, Examples};
use super::tnorm::{and_partials, or_partials, or_reduce, or_reduce_backward, tnorm_and, tnorm_or, TNormConfig};
use super::weights::{softmax_backward, WeightMode, WeightStore};
use crate::hypothesis::{HypothesisSpace, InferenceIndex};
use crate::logic::Valuation;

/// Which kernel mixes per-literal weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mixer {
    /// Index-free factored sums (fast path).
    #[default]
    Factored,
    /// Gathers through the [`InferenceIndex`].
    Gathered,
}

/// Valuations after every inference step, `steps[0]` being the input.
#[derive(Debug, Clone)]
pub struct InferenceTrace {
    pub steps: Vec<Valuation>,
}

impl InferenceTrace {
    pub fn n_steps(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn last(&self) -> &Valuation {
        self.steps.last().expect("trace holds the initial valuation")
    }
}

/// Result of [`Engine::loss_and_gradient`].
#[derive(Debug, Clone)]
pub struct LossAndGradient {
    pub loss: f64,
    /// `∂loss/∂logit`, laid out like [`WeightStore::params`].
    pub gradient: Vec<f64>,
    /// Valuation after the last inference step.
    pub valuation: Valuation,
}

#[derive(Debug, Clone, Copy)]
struct HeadBlock {
    offset: usize,
    arity: usize,
    h: usize,
    z: usize,
}

/// Differentiable forward chaining over one hypothesis space.
///
/// Each step evaluates every template against the same input valuation: the
/// two body literals of each clause slot are conjoined per `(head, binding)`
/// row, the rows are disjoined over the existential bindings, the two clause
/// slots are disjoined, and the result is disjoined with the previous value of
/// the head atom. Extensional atoms never change.
pub struct Engine<'a> {
    space: &'a HypothesisSpace,
    index: Option<&'a InferenceIndex>,
    tnorms: TNormConfig,
    mixer: Mixer,
    factored: Factored,
    heads: Vec<HeadBlock>,
    n: usize,
}

#[derive(Default)]
struct Workspace {
    batch: Batch,
    lit: [Vec<f64>; 4],
    conj: [Vec<f64>; 2],
    clause: [Vec<f64>; 2],
    head: Vec<f64>,
    dlit: [Vec<f64>; 2],
    dconj: Vec<f64>,
    dclause: [Vec<f64>; 2],
    dhead: Vec<f64>,
    /// Clause-candidate values `[k * H + h]`, one table per head arity.
    clause_values: [Vec<f64>; 2],
    dclause_values: [Vec<f64>; 2],
    tmp: Vec<f64>,
    dtmp: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        let cube = n * n * n;
        let sq = n * n;
        let mut ws = Workspace::default();
        for b in ws.lit.iter_mut().chain(ws.conj.iter_mut()).chain(ws.dlit.iter_mut()) {
            b.resize(cube, 0.0);
        }
        ws.dconj.resize(cube, 0.0);
        for b in ws.clause.iter_mut().chain(ws.dclause.iter_mut()) {
            b.resize(sq, 0.0);
        }
        ws.head.resize(sq, 0.0);
        ws.dhead.resize(sq, 0.0);
        ws
    }
}

impl<'a> Engine<'a> {
    /// Engine using the factored per-literal kernel. `index` is required for
    /// per-clause and per-template weights and for [`Mixer::Gathered`].
    pub fn new(space: &'a HypothesisSpace, index: Option<&'a InferenceIndex>, tnorms: TNormConfig) -> Self {
        let lang = space.language();
        let n = lang.num_constants();
        let heads = space
            .templates()
            .iter()
            .map(|t| {
                let h = n.pow(t.arity as u32);
                HeadBlock { offset: lang.offset(t.head), arity: t.arity, h, z: n * n * n / h }
            })
            .collect();
        if let Some(idx) = index {
            assert_eq!(idx.num_constants(), n, "index built for a different domain");
            assert_eq!(idx.num_candidates(), space.literals().len(), "index built for a different candidate set");
        }
        Engine { space, index, tnorms, mixer: Mixer::Factored, factored: Factored::new(space), heads, n }
    }

    pub fn with_mixer(mut self, mixer: Mixer) -> Self {
        if mixer == Mixer::Gathered {
            assert!(self.index.is_some(), "the gathered mixer needs an inference index");
        }
        self.mixer = mixer;
        self
    }

    pub fn tnorms(&self) -> &TNormConfig {
        &self.tnorms
    }

    pub fn space(&self) -> &HypothesisSpace {
        self.space
    }

    fn check(&self, w: &WeightStore, v: &Valuation) {
        assert_eq!(v.len(), self.space.language().atom_count(), "valuation length differs from G");
        assert_eq!(w.num_templates(), self.heads.len(), "weight store built for another template set");
        if w.mode() != WeightMode::PerLiteral {
            assert!(self.index.is_some(), "{} weights need an inference index", w.mode());
        }
    }

    fn index(&self) -> &InferenceIndex {
        self.index.expect("checked on entry")
    }

    /// One forward-chaining step.
    pub fn step(&self, v: &Valuation, w: &WeightStore) -> Valuation {
        self.check(w, v);
        let probs = w.probabilities();
        let mut ws = Workspace::new(self.n);
        let mut out = v.0.clone();
        self.step_into(&v.0, w, &probs, &mut ws, &mut out);
        Valuation(out)
    }

    /// `n_steps` compositions of [`Engine::step`].
    pub fn infer(&self, ev0: &Valuation, w: &WeightStore, n_steps: usize) -> Valuation {
        self.check(w, ev0);
        let probs = w.probabilities();
        let mut ws = Workspace::new(self.n);
        let mut cur = ev0.0.clone();
        let mut next = cur.clone();
        for _ in 0..n_steps {
            self.step_into(&cur, w, &probs, &mut ws, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        Valuation(cur)
    }

    /// Like [`Engine::infer`], retaining every intermediate valuation.
    pub fn infer_trace(&self, ev0: &Valuation, w: &WeightStore, n_steps: usize) -> InferenceTrace {
        self.check(w, ev0);
        let probs = w.probabilities();
        let mut ws = Workspace::new(self.n);
        let mut steps = vec![ev0.clone()];
        for _ in 0..n_steps {
            let mut next = vec![0.0; ev0.len()];
            self.step_into(&steps.last().unwrap().0, w, &probs, &mut ws, &mut next);
            steps.push(Valuation(next));
        }
        InferenceTrace { steps }
    }

    /// Runs `n_steps` of inference from `ev0`, evaluates the balanced loss on
    /// the examples selected by `mask` and backpropagates it to the logits.
    pub fn loss_and_gradient(
        &self,
        ev0: &Valuation,
        w: &WeightStore,
        n_steps: usize,
        examples: &Examples,
        mask: Option<&[bool]>,
    ) -> LossAndGradient {
        let trace = self.infer_trace(ev0, w, n_steps);
        let last = trace.last();
        let (loss, dvalues) = balanced_loss(&last.0, examples, mask);
        let mut dv = vec![0.0; last.len()];
        for (i, (atom, _)) in examples.iter().enumerate() {
            dv[atom] += dvalues[i];
        }
        let gradient = self.backward(&trace, w, dv);
        LossAndGradient { loss, gradient, valuation: last.clone() }
    }

    /// Backpropagates `∂loss/∂V_n` through a trace to the logits of `w`.
    pub fn backward(&self, trace: &InferenceTrace, w: &WeightStore, mut dnext: Vec<f64>) -> Vec<f64> {
        let probs = w.probabilities();
        let mut ws = Workspace::new(self.n);
        let mut dprobs = vec![0.0; probs.len()];
        let mut dcur = vec![0.0; dnext.len()];
        for i in (0..trace.n_steps()).rev() {
            self.step_backward(&trace.steps[i].0, w, &probs, &dnext, &mut dcur, &mut dprobs, &mut ws);
            std::mem::swap(&mut dnext, &mut dcur);
        }
        let mut grad = vec![0.0; probs.len()];
        for t in 0..w.num_templates() {
            for s in 0..w.shape().blocks[t].slots {
                let r = w.slot_range(t, s);
                softmax_backward(&probs[r.clone()], &dprobs[r.clone()], &mut grad[r]);
            }
        }
        grad
    }

    fn prepare_step(&self, v: &[f64], w: &WeightStore, probs: &[f64], ws: &mut Workspace) {
        match w.mode() {
            WeightMode::PerLiteral => {
                if self.mixer == Mixer::Factored {
                    let slots = 4 * self.heads.len();
                    self.factored.prepare(v, slots, probs, |s| w.slot_range(s / 4, s % 4).start, &mut ws.batch);
                }
            }
            WeightMode::PerClause | WeightMode::PerTemplate => {
                for arity in [1, 2] {
                    if self.heads.iter().any(|hb| hb.arity == arity) {
                        self.clause_values(arity, v, ws);
                    }
                }
            }
        }
    }

    fn step_into(&self, v: &[f64], w: &WeightStore, probs: &[f64], ws: &mut Workspace, out: &mut [f64]) {
        out.copy_from_slice(v);
        self.prepare_step(v, w, probs, ws);
        for (t, hb) in self.heads.iter().enumerate() {
            self.template_forward(t, v, w, probs, ws);
            for h in 0..hb.h {
                let a = hb.offset + h;
                out[a] = tnorm_or(v[a], ws.head[h], self.tnorms.or_step);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn step_backward(
        &self,
        v: &[f64],
        w: &WeightStore,
        probs: &[f64],
        dnext: &[f64],
        dcur: &mut [f64],
        dprobs: &mut [f64],
        ws: &mut Workspace,
    ) {
        dcur.iter_mut().for_each(|d| *d = 0.0);
        self.prepare_step(v, w, probs, ws);
        let batched = w.mode() == WeightMode::PerLiteral && self.mixer == Mixer::Factored;
        if batched {
            self.factored.begin_backward(&mut ws.batch);
        }
        for (dcv, cv) in ws.dclause_values.iter_mut().zip(&ws.clause_values) {
            dcv.clear();
            dcv.resize(cv.len(), 0.0);
        }
        for (t, hb) in self.heads.iter().enumerate() {
            let any_upstream = (0..hb.h).any(|h| dnext[hb.offset + h] != 0.0);
            if !any_upstream {
                continue;
            }
            self.template_forward(t, v, w, probs, ws);
            let mut live = false;
            for h in 0..hb.h {
                let a = hb.offset + h;
                let (d_old, d_new) = or_partials(v[a], ws.head[h], self.tnorms.or_step);
                dcur[a] += dnext[a] * d_old;
                ws.dhead[h] = dnext[a] * d_new;
                live |= ws.dhead[h] != 0.0;
            }
            if live {
                self.template_backward(t, v, w, probs, ws, dprobs, dcur);
            }
        }
        match w.mode() {
            WeightMode::PerLiteral => {
                if batched {
                    self.factored.finish_backward(&mut ws.batch, |s| w.slot_range(s / 4, s % 4).start, dprobs, dcur);
                }
            }
            WeightMode::PerClause | WeightMode::PerTemplate => {
                for arity in [1, 2] {
                    if self.heads.iter().any(|hb| hb.arity == arity) {
                        self.clause_values_backward(arity, v, ws, dcur);
                    }
                }
            }
        }
    }

    fn template_forward(&self, t: usize, v: &[f64], w: &WeightStore, probs: &[f64], ws: &mut Workspace) {
        let hb = self.heads[t];
        let tn = self.tnorms;
        match w.mode() {
            WeightMode::PerLiteral => {
                for slot in 0..4 {
                    let p = &probs[w.slot_range(t, slot)];
                    match self.mixer {
                        Mixer::Factored => self.factored.mix(&ws.batch, 4 * t + slot, &mut ws.lit[slot]),
                        Mixer::Gathered => Gathered { index: self.index() }.mix(v, p, &mut ws.lit[slot]),
                    }
                }
                for s in 0..2 {
                    let (l0, l1) = (&ws.lit[2 * s], &ws.lit[2 * s + 1]);
                    for ((c, &a), &b) in ws.conj[s].iter_mut().zip(l0).zip(l1) {
                        *c = tnorm_and(a, b, tn.and_literal);
                    }
                    for h in 0..hb.h {
                        ws.clause[s][h] = or_reduce(&ws.conj[s][h * hb.z..(h + 1) * hb.z], tn.or_exists);
                    }
                }
                for h in 0..hb.h {
                    ws.head[h] = tnorm_or(ws.clause[0][h], ws.clause[1][h], tn.or_clausal);
                }
            }
            WeightMode::PerClause => {
                let cv = &ws.clause_values[hb.arity - 1];
                for s in 0..2 {
                    let p = &probs[w.slot_range(t, s)];
                    let clause = &mut ws.clause[s][..hb.h];
                    clause.iter_mut().for_each(|c| *c = 0.0);
                    for (k, &pk) in p.iter().enumerate() {
                        for (c, &x) in clause.iter_mut().zip(&cv[k * hb.h..(k + 1) * hb.h]) {
                            *c += pk * x;
                        }
                    }
                }
                for h in 0..hb.h {
                    ws.head[h] = tnorm_or(ws.clause[0][h], ws.clause[1][h], tn.or_clausal);
                }
            }
            WeightMode::PerTemplate => {
                let cv = &ws.clause_values[hb.arity - 1];
                let p = &probs[w.slot_range(t, 0)];
                let k = cv.len() / hb.h;
                ws.head[..hb.h].iter_mut().for_each(|x| *x = 0.0);
                for k1 in 0..k {
                    for k2 in 0..k {
                        let pk = p[k1 * k + k2];
                        for h in 0..hb.h {
                            ws.head[h] += pk * tnorm_or(cv[k1 * hb.h + h], cv[k2 * hb.h + h], tn.or_clausal);
                        }
                    }
                }
            }
        }
    }

    /// Backward pass of one template given `ws.dhead`; expects the
    /// intermediates left by [`Engine::template_forward`].
    #[allow(clippy::too_many_arguments)]
    fn template_backward(
        &self,
        t: usize,
        v: &[f64],
        w: &WeightStore,
        probs: &[f64],
        ws: &mut Workspace,
        dprobs: &mut [f64],
        dcur: &mut [f64],
    ) {
        let hb = self.heads[t];
        let tn = self.tnorms;
        match w.mode() {
            WeightMode::PerLiteral => {
                for h in 0..hb.h {
                    let (a, b) = or_partials(ws.clause[0][h], ws.clause[1][h], tn.or_clausal);
                    ws.dclause[0][h] = ws.dhead[h] * a;
                    ws.dclause[1][h] = ws.dhead[h] * b;
                }
                for s in 0..2 {
                    if ws.dclause[s][..hb.h].iter().all(|&d| d == 0.0) {
                        continue;
                    }
                    ws.dconj.iter_mut().for_each(|d| *d = 0.0);
                    for h in 0..hb.h {
                        let r = h * hb.z..(h + 1) * hb.z;
                        or_reduce_backward(&ws.conj[s][r.clone()], tn.or_exists, ws.dclause[s][h], &mut ws.dconj[r]);
                    }
                    let [dl0, dl1] = &mut ws.dlit;
                    for (((g, &l0), &l1), (d0, d1)) in ws
                        .dconj
                        .iter()
                        .zip(&ws.lit[2 * s])
                        .zip(&ws.lit[2 * s + 1])
                        .zip(dl0.iter_mut().zip(dl1.iter_mut()))
                    {
                        if *g == 0.0 {
                            *d0 = 0.0;
                            *d1 = 0.0;
                        } else {
                            let (pa, pb) = and_partials(l0, l1, tn.and_literal);
                            *d0 = g * pa;
                            *d1 = g * pb;
                        }
                    }
                    for (lit, slot) in [(0, 2 * s), (1, 2 * s + 1)] {
                        let r = w.slot_range(t, slot);
                        let p = &probs[r.clone()];
                        match self.mixer {
                            Mixer::Factored => self.factored.mix_backward(&mut ws.batch, 4 * t + slot, &ws.dlit[lit]),
                            Mixer::Gathered => Gathered { index: self.index() }.mix_backward(
                                v,
                                p,
                                &ws.dlit[lit],
                                &mut dprobs[r],
                                dcur,
                            ),
                        }
                    }
                }
            }
            WeightMode::PerClause => {
                for h in 0..hb.h {
                    let (a, b) = or_partials(ws.clause[0][h], ws.clause[1][h], tn.or_clausal);
                    ws.dclause[0][h] = ws.dhead[h] * a;
                    ws.dclause[1][h] = ws.dhead[h] * b;
                }
                let cv = &ws.clause_values[hb.arity - 1];
                let dcv = &mut ws.dclause_values[hb.arity - 1];
                for s in 0..2 {
                    let r = w.slot_range(t, s);
                    let dclause = &ws.dclause[s][..hb.h];
                    for (k, (&pk, dp)) in probs[r.clone()].iter().zip(&mut dprobs[r]).enumerate() {
                        let row = k * hb.h..(k + 1) * hb.h;
                        *dp += cv[row.clone()].iter().zip(dclause).map(|(x, d)| x * d).sum::<f64>();
                        for (dc, &d) in dcv[row].iter_mut().zip(dclause) {
                            *dc += pk * d;
                        }
                    }
                }
            }
            WeightMode::PerTemplate => {
                let cv = &ws.clause_values[hb.arity - 1];
                let dcv = &mut ws.dclause_values[hb.arity - 1];
                let r = w.slot_range(t, 0);
                let p = &probs[r.clone()];
                let dp = &mut dprobs[r];
                let k = cv.len() / hb.h;
                for k1 in 0..k {
                    for k2 in 0..k {
                        let pk = p[k1 * k + k2];
                        let mut acc = 0.0;
                        for h in 0..hb.h {
                            let (a, b) = (cv[k1 * hb.h + h], cv[k2 * hb.h + h]);
                            let g = ws.dhead[h];
                            if g == 0.0 {
                                continue;
                            }
                            acc += g * tnorm_or(a, b, tn.or_clausal);
                            let (pa, pb) = or_partials(a, b, tn.or_clausal);
                            dcv[k1 * hb.h + h] += g * pk * pa;
                            dcv[k2 * hb.h + h] += g * pk * pb;
                        }
                        dp[k1 * k + k2] += acc;
                    }
                }
            }
        }
    }

    /// Value of every clause candidate for every head grounding: conjunction of
    /// its two literals, disjoined over existential bindings.
    fn clause_values(&self, arity: usize, v: &[f64], ws: &mut Workspace) {
        let index = self.index();
        let (h_count, z_count, _) = index.shape(arity);
        let clauses = self.space.clauses(arity);
        let out = &mut ws.clause_values[arity - 1];
        out.resize(clauses.len() * h_count, 0.0);
        ws.tmp.resize(z_count, 0.0);
        for (k, cc) in clauses.iter().enumerate() {
            let [c1, c2] = cc.body;
            for h in 0..h_count {
                for b in 0..z_count {
                    let row = index.row(h * z_count + b);
                    ws.tmp[b] = tnorm_and(v[row[c1] as usize], v[row[c2] as usize], self.tnorms.and_literal);
                }
                out[k * h_count + h] = or_reduce(&ws.tmp, self.tnorms.or_exists);
            }
        }
    }

    fn clause_values_backward(&self, arity: usize, v: &[f64], ws: &mut Workspace, dcur: &mut [f64]) {
        let index = self.index();
        let (h_count, z_count, _) = index.shape(arity);
        let clauses = self.space.clauses(arity);
        ws.tmp.resize(z_count, 0.0);
        ws.dtmp.resize(z_count, 0.0);
        for (k, cc) in clauses.iter().enumerate() {
            let [c1, c2] = cc.body;
            for h in 0..h_count {
                let g = ws.dclause_values[arity - 1][k * h_count + h];
                if g == 0.0 {
                    continue;
                }
                for b in 0..z_count {
                    let row = index.row(h * z_count + b);
                    ws.tmp[b] = tnorm_and(v[row[c1] as usize], v[row[c2] as usize], self.tnorms.and_literal);
                }
                ws.dtmp.iter_mut().for_each(|d| *d = 0.0);
                or_reduce_backward(&ws.tmp, self.tnorms.or_exists, g, &mut ws.dtmp);
                for b in 0..z_count {
                    if ws.dtmp[b] == 0.0 {
                        continue;
                    }
                    let row = index.row(h * z_count + b);
                    let (a1, a2) = (row[c1] as usize, row[c2] as usize);
                    let (pa, pb) = and_partials(v[a1], v[a2], self.tnorms.and_literal);
                    dcur[a1] += ws.dtmp[b] * pa;
                    dcur[a2] += ws.dtmp[b] * pb;
                }
            }
        }
    }
}
