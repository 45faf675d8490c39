use std::cell::Cell;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CooccurrenceMatrix, EmbedError, EmbeddingModel, TrainingMeta, Vocabulary, Weighting, MAX_WINDOW};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub x_max: f64,
    pub alpha: f64,
    pub seed: u64,
    pub weighting: Weighting,
    pub min_count: usize,
    /// 1 trains sequentially and reproducibly; more threads use lock-free
    /// concurrent updates.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dim: 400,
            window: 30,
            iterations: 50,
            learning_rate: 0.05,
            x_max: 100.0,
            alpha: 0.75,
            seed: 1,
            weighting: Weighting::InverseDistance,
            min_count: 5,
            threads: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), EmbedError> {
        let bad = |m: String| Err(EmbedError::InvalidConfig(m));
        if self.dim == 0 {
            return bad("dim must be at least 1".into());
        }
        if self.window == 0 || self.window > MAX_WINDOW {
            return bad(format!("window must be in 1..={MAX_WINDOW}"));
        }
        if self.iterations == 0 {
            return bad("iterations must be at least 1".into());
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive".into());
        }
        if !(self.x_max.is_finite() && self.x_max > 0.0) {
            return bad("x_max must be positive".into());
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha must be in (0, 1]".into());
        }
        if self.min_count == 0 {
            return bad("min_count must be at least 1".into());
        }
        if self.threads == 0 {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }
}

/// GloVe weighting f(x) = (x/x_max)^α below x_max, 1 from x_max on.
pub fn weight_fn<T: Scalar>(x: T, x_max: T, alpha: T) -> T {
    if x < x_max {
        (x / x_max).powf(alpha)
    } else {
        T::one()
    }
}

trait Store<T> {
    fn get(&self, k: usize) -> T;
    fn set(&self, k: usize, v: T);
}

impl<T: Scalar> Store<T> for [Cell<T>] {
    #[inline]
    fn get(&self, k: usize) -> T {
        self[k].get()
    }
    #[inline]
    fn set(&self, k: usize, v: T) {
        self[k].set(v)
    }
}

struct Atomics<'a>(&'a [AtomicU64]);

impl<T: Scalar> Store<T> for Atomics<'_> {
    #[inline]
    fn get(&self, k: usize) -> T {
        T::from_bits64(self.0[k].load(Ordering::Relaxed))
    }
    #[inline]
    fn set(&self, k: usize, v: T) {
        self.0[k].store(v.to_bits64(), Ordering::Relaxed)
    }
}

/// Offsets of the four parameter blocks in the flat buffer: w, w̃, b, b̃.
#[derive(Clone, Copy)]
struct Layout {
    dim: usize,
    wc: usize,
    b: usize,
    bc: usize,
}

impl Layout {
    fn new(n: usize, dim: usize) -> Self {
        Self { dim, wc: n * dim, b: 2 * n * dim, bc: 2 * n * dim + n }
    }
}

struct Hyper<T> {
    lr: T,
    x_max: T,
    alpha: T,
}

/// One AdaGrad step on entry (i, j, x). Returns f(x)·diff² before the update.
#[inline]
fn step<T: Scalar, P: Store<T> + ?Sized, G: Store<T> + ?Sized>(
    p: &P,
    g: &G,
    l: Layout,
    h: &Hyper<T>,
    (i, j, x): (u32, u32, T),
) -> T {
    let (i, j) = (i as usize, j as usize);
    let (wi, wj) = (i * l.dim, l.wc + j * l.dim);
    let mut dot = T::zero();
    for k in 0..l.dim {
        dot += p.get(wi + k) * p.get(wj + k);
    }
    let diff = dot + p.get(l.b + i) + p.get(l.bc + j) - x.ln();
    let f = weight_fn(x, h.x_max, h.alpha);
    let loss = f * diff * diff;
    let fdiff = f * diff * h.lr;
    for k in 0..l.dim {
        let (a, c) = (p.get(wi + k), p.get(wj + k));
        let (t1, t2) = (fdiff * c, fdiff * a);
        let (g1, g2) = (g.get(wi + k), g.get(wj + k));
        p.set(wi + k, a - t1 / g1.sqrt());
        p.set(wj + k, c - t2 / g2.sqrt());
        g.set(wi + k, g1 + t1 * t1);
        g.set(wj + k, g2 + t2 * t2);
    }
    for k in [l.b + i, l.bc + j] {
        let gk = g.get(k);
        p.set(k, p.get(k) - fdiff / gk.sqrt());
        g.set(k, gk + fdiff * fdiff);
    }
    loss
}

/// Trains GloVe vectors on `matrix`, whose indices refer to `vocab`.
pub fn train<T: Scalar>(
    matrix: &CooccurrenceMatrix<T>,
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<EmbeddingModel<T>, EmbedError> {
    config.validate()?;
    if matrix.is_empty() {
        return Err(EmbedError::EmptyMatrix);
    }
    if matrix.vocab_size != vocab.len() {
        return Err(EmbedError::InvalidConfig(format!(
            "matrix covers {} words but the vocabulary has {}",
            matrix.vocab_size,
            vocab.len()
        )));
    }
    let n = vocab.len();
    let d = config.dim;
    let layout = Layout::new(n, d);
    let total = 2 * n * d + 2 * n;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let scale = T::of(1.0 / d as f64);
    let half = T::of(0.5);
    let mut params: Vec<T> = (0..total).map(|_| (T::of(rng.random::<f64>()) - half) * scale).collect();
    let mut grads: Vec<T> = vec![T::one(); total];
    let h = Hyper { lr: T::of(config.learning_rate), x_max: T::of(config.x_max), alpha: T::of(config.alpha) };

    let entries = matrix.entries();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    let mut losses = Vec::with_capacity(config.iterations);

    if config.threads <= 1 {
        let p = Cell::from_mut(params.as_mut_slice()).as_slice_of_cells();
        let g = Cell::from_mut(grads.as_mut_slice()).as_slice_of_cells();
        for it in 0..config.iterations {
            order.shuffle(&mut rng);
            let mut loss = 0.0f64;
            for &e in &order {
                loss += step(p, g, layout, &h, entries[e]).as_f64();
            }
            if !loss.is_finite() {
                return Err(EmbedError::Diverged { iteration: it + 1, loss });
            }
            log::debug!("iteration {} loss {loss:.6}", it + 1);
            losses.push(loss);
        }
    } else {
        let p: Vec<AtomicU64> = params.iter().map(|x| AtomicU64::new(x.to_bits64())).collect();
        let g: Vec<AtomicU64> = grads.iter().map(|x| AtomicU64::new(x.to_bits64())).collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| EmbedError::InvalidConfig(e.to_string()))?;
        let chunk = order.len().div_ceil(config.threads);
        for it in 0..config.iterations {
            order.shuffle(&mut rng);
            let loss: f64 = pool.install(|| {
                order
                    .par_chunks(chunk)
                    .map(|part| {
                        let (ps, gs) = (Atomics(&p), Atomics(&g));
                        part.iter().map(|&e| step::<T, _, _>(&ps, &gs, layout, &h, entries[e]).as_f64()).sum::<f64>()
                    })
                    .sum()
            });
            if !loss.is_finite() {
                return Err(EmbedError::Diverged { iteration: it + 1, loss });
            }
            log::debug!("iteration {} loss {loss:.6}", it + 1);
            losses.push(loss);
        }
        params = p.iter().map(|a| T::from_bits64(a.load(Ordering::Relaxed))).collect();
        grads.clear();
    }

    if let Some(bad) = params.iter().find(|x| !x.is_finite()) {
        return Err(EmbedError::Diverged { iteration: config.iterations, loss: bad.as_f64() });
    }
    let bc = params.split_off(layout.bc);
    let b = params.split_off(layout.b);
    let wc = params.split_off(layout.wc);
    let mut model = EmbeddingModel::from_parts(vocab.words().to_vec(), d, params, wc, b, bc)?;
    model.meta = TrainingMeta {
        iterations: config.iterations,
        losses,
        config: serde_json::to_value(config).unwrap_or_default(),
    };
    Ok(model)
}

/// Gradient of the objective with respect to every parameter, laid out like
/// the model (zero where the subset does not touch a parameter).
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    pub w: Vec<T>,
    pub wc: Vec<T>,
    pub b: Vec<T>,
    pub bc: Vec<T>,
}

/// Exact J = Σ f(X_ij)(w_i·w̃_j + b_i + b̃_j − ln X_ij)² over the entries at
/// `subset` (all entries when `None`), and its analytic gradient.
pub fn loss_and_gradient<T: Scalar>(
    model: &EmbeddingModel<T>,
    matrix: &CooccurrenceMatrix<T>,
    subset: Option<&[usize]>,
    x_max: f64,
    alpha: f64,
) -> (T, Gradients<T>) {
    let (n, d) = (model.len(), model.dim());
    let mut g = Gradients { w: vec![T::zero(); n * d], wc: vec![T::zero(); n * d], b: vec![T::zero(); n], bc: vec![T::zero(); n] };
    let (x_max, alpha) = (T::of(x_max), T::of(alpha));
    let all: Vec<usize>;
    let idx = match subset {
        Some(s) => s,
        None => {
            all = (0..matrix.len()).collect();
            &all
        }
    };
    let two = T::of(2.0);
    let mut loss = T::zero();
    for &e in idx {
        let (i, j, x) = matrix.entries()[e];
        let (i, j) = (i as usize, j as usize);
        let diff = model.predict(i, j) - x.ln();
        let f = weight_fn(x, x_max, alpha);
        loss += f * diff * diff;
        let c = two * f * diff;
        for k in 0..d {
            g.w[i * d + k] += c * model.context(j)[k];
            g.wc[j * d + k] += c * model.main(i)[k];
        }
        g.b[i] += c;
        g.bc[j] += c;
    }
    (loss, g)
}
