//! Literal mixing kernels: `out[r] = Σ_c p_c · V[atom(r, c)]` for every
//! `(x, y, z)` row `r`, and the matching backward pass.
//!
//! [`Gathered`] reads the precompiled [`InferenceIndex`] directly. [`Factored`]
//! produces the same numbers without touching the index: a candidate's value
//! depends on at most two of the three variables, so the weighted sum splits
//! into three `n × n` tables (over `(x,y)`, `(x,z)`, `(y,z)`) and three vectors
//! (over `x`, `y`, `z`), each a weighted sum of predicate slices. For all slots
//! at once those sums are matrix products, which turns `n³·C` gathers per slot
//! into `O(n²·C + n³)` work.

use crate::hypothesis::{HypothesisSpace, InferenceIndex, Pattern};
use crate::logic::Var;

/// Table a candidate contributes to. The first three are `n × n` tables over
/// `(x,y)`, `(x,z)` and `(y,z)`; the last three are vectors over one variable.
const XY: usize = 0;
const XZ: usize = 1;
const YZ: usize = 2;
const RX: usize = 3;
const RY: usize = 4;
const RZ: usize = 5;

/// Probabilities and tables of every literal slot, plus their gradients.
///
/// Rows are slots. Table groups multiply against `m2`, whose rows are the
/// dyadic predicate slices followed by their transposes; vector groups
/// multiply against `m1`, whose rows are the dyadic diagonals followed by the
/// unary slices.
#[derive(Debug, Default)]
pub(crate) struct Batch {
    slots: usize,
    /// Whether `probs` holds the current weights; they stay fixed for the
    /// lifetime of one batch.
    loaded: bool,
    m2: Vec<f64>,
    m1: Vec<f64>,
    probs: [Vec<f64>; 6],
    tables: [Vec<f64>; 6],
    dtables: [Vec<f64>; 6],
    dprobs: [Vec<f64>; 6],
    dm2: Vec<f64>,
    dm1: Vec<f64>,
}

/// `c = a · b` (or `c += a · b` when `accumulate`), with `a` of shape `m × k`
/// and `b` of shape `k × n`, each given by row and column strides.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    c: &mut [f64],
    accumulate: bool,
) {
    if m == 0 || n == 0 {
        return;
    }
    assert!(k == 0 || (a.len() > (m - 1) * rsa + (k - 1) * csa && b.len() > (k - 1) * rsb + (n - 1) * csb));
    assert!(c.len() >= m * n);
    let beta = if accumulate { 1.0 } else { 0.0 };
    // SAFETY: the asserts above keep every strided access inside the slices.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// Index-free mixing kernel, batched over all literal slots.
#[derive(Debug, Clone)]
pub struct Factored {
    n: usize,
    /// Atom offsets and intensionality of dyadic predicates.
    dyadic: Vec<(usize, bool)>,
    unary: Vec<(usize, bool)>,
    /// `(group, column)` of every literal candidate.
    placement: Vec<(usize, usize)>,
}

impl Factored {
    pub fn new(space: &HypothesisSpace) -> Self {
        let lang = space.language();
        let n = lang.num_constants();
        let mut dyadic = Vec::new();
        let mut unary = Vec::new();
        let mut column = vec![0; lang.predicates().len()];
        for p in lang.pred_ids() {
            let entry = (lang.offset(p), lang.predicate(p).kind.is_intensional());
            if lang.predicate(p).arity == 2 {
                column[p.0] = dyadic.len();
                dyadic.push(entry);
            } else {
                column[p.0] = unary.len();
                unary.push(entry);
            }
        }
        let d = dyadic.len();
        let placement = space
            .literals()
            .iter()
            .map(|c| {
                use Var::*;
                let col = column[c.pred.0];
                match c.pattern {
                    Pattern::Dyadic(X, Y) => (XY, col),
                    Pattern::Dyadic(Y, X) => (XY, d + col),
                    Pattern::Dyadic(X, Z) => (XZ, col),
                    Pattern::Dyadic(Z, X) => (XZ, d + col),
                    Pattern::Dyadic(Y, Z) => (YZ, col),
                    Pattern::Dyadic(Z, Y) => (YZ, d + col),
                    Pattern::Dyadic(X, X) => (RX, col),
                    Pattern::Dyadic(Y, Y) => (RY, col),
                    Pattern::Dyadic(Z, Z) => (RZ, col),
                    Pattern::Unary(X) => (RX, d + col),
                    Pattern::Unary(Y) => (RY, d + col),
                    Pattern::Unary(Z) => (RZ, d + col),
                }
            })
            .collect();
        Factored { n, dyadic, unary, placement }
    }

    fn width(&self, group: usize) -> usize {
        if group < RX {
            2 * self.dyadic.len()
        } else {
            self.dyadic.len() + self.unary.len()
        }
    }

    fn len(&self, group: usize) -> usize {
        if group < RX {
            self.n * self.n
        } else {
            self.n
        }
    }

    /// Computes the tables of every slot. Slot `s`'s candidate probabilities
    /// start at `probs[offset(s)]`; they are read on the first call only.
    pub(crate) fn prepare(&self, v: &[f64], slots: usize, probs: &[f64], offset: impl Fn(usize) -> usize, b: &mut Batch) {
        let n = self.n;
        let nn = n * n;
        let d = self.dyadic.len();
        b.slots = slots;
        b.m2.clear();
        b.m2.resize(2 * d * nn, 0.0);
        b.m1.clear();
        b.m1.resize((d + self.unary.len()) * n, 0.0);
        for (i, &(o, _)) in self.dyadic.iter().enumerate() {
            b.m2[i * nn..(i + 1) * nn].copy_from_slice(&v[o..o + nn]);
            let t = &mut b.m2[(d + i) * nn..(d + i + 1) * nn];
            for x in 0..n {
                for y in 0..n {
                    t[y * n + x] = v[o + x * n + y];
                }
            }
            for x in 0..n {
                b.m1[i * n + x] = v[o + x * n + x];
            }
        }
        for (i, &(o, _)) in self.unary.iter().enumerate() {
            b.m1[(d + i) * n..(d + i + 1) * n].copy_from_slice(&v[o..o + n]);
        }
        if !b.loaded {
            for g in 0..6 {
                b.probs[g].clear();
                b.probs[g].resize(slots * self.width(g), 0.0);
                b.tables[g].resize(slots * self.len(g), 0.0);
            }
            for s in 0..slots {
                for (&(g, col), &p) in self.placement.iter().zip(&probs[offset(s)..]) {
                    let w = self.width(g);
                    b.probs[g][s * w + col] += p;
                }
            }
            b.loaded = true;
        }
        for g in 0..6 {
            let (w, len) = (self.width(g), self.len(g));
            let m = if g < RX { &b.m2 } else { &b.m1 };
            gemm(slots, w, len, &b.probs[g], (w, 1), m, (len, 1), &mut b.tables[g], false);
        }
    }

    /// Mixed literal values of `slot` on the `n³` rows.
    pub(crate) fn mix(&self, b: &Batch, slot: usize, out: &mut [f64]) {
        let n = self.n;
        let nn = n * n;
        let txy = &b.tables[XY][slot * nn..(slot + 1) * nn];
        let txz = &b.tables[XZ][slot * nn..(slot + 1) * nn];
        let tyz = &b.tables[YZ][slot * nn..(slot + 1) * nn];
        let rx = &b.tables[RX][slot * n..(slot + 1) * n];
        let ry = &b.tables[RY][slot * n..(slot + 1) * n];
        let rz = &b.tables[RZ][slot * n..(slot + 1) * n];
        for x in 0..n {
            let txz = &txz[x * n..(x + 1) * n];
            for y in 0..n {
                let a = txy[x * n + y] + rx[x] + ry[y];
                let tyz = &tyz[y * n..(y + 1) * n];
                let row = &mut out[(x * n + y) * n..(x * n + y + 1) * n];
                for z in 0..n {
                    row[z] = a + txz[z] + tyz[z] + rz[z];
                }
            }
        }
    }

    /// Clears the table gradients before a backward step.
    pub(crate) fn begin_backward(&self, b: &mut Batch) {
        for g in 0..6 {
            b.dtables[g].clear();
            b.dtables[g].resize(b.slots * self.len(g), 0.0);
        }
    }

    /// Reduces the gradient `dl` of `slot`'s mixed values onto its tables.
    pub(crate) fn mix_backward(&self, b: &mut Batch, slot: usize, dl: &[f64]) {
        let n = self.n;
        let nn = n * n;
        let [dxy, dxz, dyz, drx, dry, drz] = &mut b.dtables;
        let dxy = &mut dxy[slot * nn..(slot + 1) * nn];
        let dxz = &mut dxz[slot * nn..(slot + 1) * nn];
        let dyz = &mut dyz[slot * nn..(slot + 1) * nn];
        let drx = &mut drx[slot * n..(slot + 1) * n];
        let dry = &mut dry[slot * n..(slot + 1) * n];
        let drz = &mut drz[slot * n..(slot + 1) * n];
        for x in 0..n {
            for y in 0..n {
                let row = &dl[(x * n + y) * n..(x * n + y + 1) * n];
                let sum: f64 = row.iter().sum();
                dxy[x * n + y] += sum;
                drx[x] += sum;
                dry[y] += sum;
                for (a, g) in dxz[x * n..(x + 1) * n].iter_mut().zip(row) {
                    *a += g;
                }
                for (a, g) in dyz[y * n..(y + 1) * n].iter_mut().zip(row) {
                    *a += g;
                }
                for (a, g) in drz.iter_mut().zip(row) {
                    *a += g;
                }
            }
        }
    }

    /// Turns the accumulated table gradients into `∂/∂p` (added to `dprobs`,
    /// laid out like the probabilities given to [`Factored::prepare`]) and
    /// `∂/∂V` of intensional atoms (added to `dv`).
    pub(crate) fn finish_backward(
        &self,
        b: &mut Batch,
        offset: impl Fn(usize) -> usize,
        dprobs: &mut [f64],
        dv: &mut [f64],
    ) {
        let n = self.n;
        let nn = n * n;
        let d = self.dyadic.len();
        let slots = b.slots;
        b.dm2.clear();
        b.dm2.resize(2 * d * nn, 0.0);
        b.dm1.clear();
        b.dm1.resize((d + self.unary.len()) * n, 0.0);
        for g in 0..6 {
            let (w, len) = (self.width(g), self.len(g));
            let (m, dm) = if g < RX { (&b.m2, &mut b.dm2) } else { (&b.m1, &mut b.dm1) };
            b.dprobs[g].resize(slots * w, 0.0);
            // dP = dT · Mᵀ and dM += Pᵀ · dT
            gemm(slots, len, w, &b.dtables[g], (len, 1), m, (1, len), &mut b.dprobs[g], false);
            gemm(w, slots, len, &b.probs[g], (1, w), &b.dtables[g], (len, 1), dm, true);
        }
        for s in 0..slots {
            for (&(g, col), dp) in self.placement.iter().zip(&mut dprobs[offset(s)..]) {
                *dp += b.dprobs[g][s * self.width(g) + col];
            }
        }
        for (i, &(o, intensional)) in self.dyadic.iter().enumerate() {
            if !intensional {
                continue;
            }
            let direct = &b.dm2[i * nn..(i + 1) * nn];
            let transposed = &b.dm2[(d + i) * nn..(d + i + 1) * nn];
            for x in 0..n {
                for y in 0..n {
                    dv[o + x * n + y] += direct[x * n + y] + transposed[y * n + x];
                }
                dv[o + x * n + x] += b.dm1[i * n + x];
            }
        }
        for (i, &(o, intensional)) in self.unary.iter().enumerate() {
            if intensional {
                for x in 0..n {
                    dv[o + x] += b.dm1[(d + i) * n + x];
                }
            }
        }
    }
}

/// Mixing kernel reading the gather index.
#[derive(Debug, Clone, Copy)]
pub struct Gathered<'a> {
    pub index: &'a InferenceIndex,
}

impl Gathered<'_> {
    pub(crate) fn mix(&self, v: &[f64], probs: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.index.row(r).iter().zip(probs).map(|(&a, &p)| p * v[a as usize]).sum();
        }
    }

    pub(crate) fn mix_backward(&self, v: &[f64], probs: &[f64], dl: &[f64], dprobs: &mut [f64], dv: &mut [f64]) {
        for (r, &g) in dl.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            for ((&a, &p), dp) in self.index.row(r).iter().zip(probs).zip(dprobs.iter_mut()) {
                *dp += g * v[a as usize];
                dv[a as usize] += g * p;
            }
        }
    }
}
