/// Clamp applied to predicted values before taking logarithms.
pub const LOSS_EPS: f64 = 1e-7;

/// Labelled target atoms: `atoms[i]` should be true iff `positive[i]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Examples {
    pub atoms: Vec<usize>,
    pub positive: Vec<bool>,
}

impl Examples {
    pub fn new(positive_atoms: &[usize], negative_atoms: &[usize]) -> Self {
        let mut ex = Examples::default();
        for &a in positive_atoms {
            ex.push(a, true);
        }
        for &a in negative_atoms {
            ex.push(a, false);
        }
        ex
    }

    pub fn push(&mut self, atom: usize, positive: bool) {
        self.atoms.push(atom);
        self.positive.push(positive);
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.atoms.iter().copied().zip(self.positive.iter().copied())
    }
}

/// Balanced cross-entropy over the examples selected by `mask` (all when `None`).
///
/// Positives and negatives each contribute half: the mean of `-ln v` over the
/// selected positives and the mean of `-ln(1 - v)` over the selected negatives.
/// A half with no selected examples contributes zero. Returns the loss and
/// `∂loss/∂v` for every example (zero for unselected or clamped ones).
pub fn balanced_loss(values: &[f64], examples: &Examples, mask: Option<&[bool]>) -> (f64, Vec<f64>) {
    let selected = |i: usize| mask.is_none_or(|m| m[i]);
    let (mut n_pos, mut n_neg) = (0usize, 0usize);
    for (i, (_, pos)) in examples.iter().enumerate() {
        if selected(i) {
            if pos {
                n_pos += 1;
            } else {
                n_neg += 1;
            }
        }
    }
    let mut loss = 0.0;
    let mut grad = vec![0.0; examples.len()];
    for (i, (atom, pos)) in examples.iter().enumerate() {
        if !selected(i) {
            continue;
        }
        let raw = values[atom];
        let v = raw.clamp(LOSS_EPS, 1.0 - LOSS_EPS);
        let inside = raw == v;
        if pos {
            let w = 0.5 / n_pos as f64;
            loss += -w * v.ln();
            if inside {
                grad[i] = -w / v;
            }
        } else {
            let w = 0.5 / n_neg as f64;
            loss += -w * (1.0 - v).ln();
            if inside {
                grad[i] = w / (1.0 - v);
            }
        }
    }
    (loss, grad)
}
