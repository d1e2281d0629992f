use std::io::{BufRead, Write};

use rand::Rng;

use super::{ClassifyError, FeatureScheme, LabeledExample};
use crate::seed::stream_rng;

pub const MODEL_MAGIC: &str = "cognate-classifier v1";

/// Attempts at halving the learning rate before training stops early.
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyper {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper { hidden: 16, epochs: 200, learning_rate: 0.05, seed: 0 }
    }
}

/// One hidden ReLU layer followed by a two-way softmax. Weight matrices are
/// row-major with one row per output unit. Output unit 1 is the positive class.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub input: usize,
    pub hidden: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

fn softmax2(z: [f64; 2]) -> [f64; 2] {
    let m = z[0].max(z[1]);
    let e = [(z[0] - m).exp(), (z[1] - m).exp()];
    let s = e[0] + e[1];
    [e[0] / s, e[1] / s]
}

impl Network {
    /// Uniform initialization in `[-r, r]` with `r = sqrt(6 / (fan_in + fan_out))`
    /// per layer; biases start at zero.
    pub fn init(input: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = stream_rng(seed, "init");
        let r1 = (6.0 / (input + hidden) as f64).sqrt();
        let r2 = (6.0 / (hidden + 2) as f64).sqrt();
        let w1 = (0..input * hidden).map(|_| rng.gen_range(-r1..=r1)).collect();
        let w2 = (0..2 * hidden).map(|_| rng.gen_range(-r2..=r2)).collect();
        Network { input, hidden, w1, b1: vec![0.0; hidden], w2, b2: vec![0.0; 2] }
    }

    pub fn param_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// Parameters flattened in the order w1, b1, w2, b2.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.param_count());
        p.extend(&self.w1);
        p.extend(&self.b1);
        p.extend(&self.w2);
        p.extend(&self.b2);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.param_count());
        let (w1, rest) = p.split_at(self.w1.len());
        let (b1, rest) = rest.split_at(self.b1.len());
        let (w2, b2) = rest.split_at(self.w2.len());
        self.w1.copy_from_slice(w1);
        self.b1.copy_from_slice(b1);
        self.w2.copy_from_slice(w2);
        self.b2.copy_from_slice(b2);
    }

    fn hidden_activations(&self, x: &[f64]) -> Vec<f64> {
        (0..self.hidden)
            .map(|j| {
                let row = &self.w1[j * self.input..(j + 1) * self.input];
                let a = self.b1[j] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
                a.max(0.0)
            })
            .collect()
    }

    fn logits(&self, h: &[f64]) -> [f64; 2] {
        let mut z = [0.0; 2];
        for (k, zk) in z.iter_mut().enumerate() {
            let row = &self.w2[k * self.hidden..(k + 1) * self.hidden];
            *zk = self.b2[k] + row.iter().zip(h).map(|(w, v)| w * v).sum::<f64>();
        }
        z
    }

    /// Class probabilities `[negative, positive]`.
    pub fn forward(&self, x: &[f64]) -> [f64; 2] {
        softmax2(self.logits(&self.hidden_activations(x)))
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        let p = self.forward(x);
        p[1] > p[0]
    }

    fn example_loss(&self, x: &[f64], positive: bool) -> f64 {
        let z = self.logits(&self.hidden_activations(x));
        let m = z[0].max(z[1]);
        let lse = m + ((z[0] - m).exp() + (z[1] - m).exp()).ln();
        lse - z[usize::from(positive)]
    }

    /// Mean cross-entropy over `examples`.
    pub fn loss(&self, examples: &[LabeledExample]) -> f64 {
        let total: f64 = examples.iter().map(|e| self.example_loss(&e.features, e.positive)).sum();
        total / examples.len() as f64
    }

    /// Mean loss and its gradient, flattened like [`Network::params`].
    pub fn loss_and_gradient(&self, examples: &[LabeledExample]) -> (f64, Vec<f64>) {
        let (ni, nh) = (self.input, self.hidden);
        let mut grad = vec![0.0; self.param_count()];
        let (g_w1, rest) = grad.split_at_mut(ni * nh);
        let (g_b1, rest) = rest.split_at_mut(nh);
        let (g_w2, g_b2) = rest.split_at_mut(2 * nh);
        let mut loss = 0.0;
        let mut dh = vec![0.0; nh];

        for e in examples {
            let x = &e.features;
            let h = self.hidden_activations(x);
            let z = self.logits(&h);
            let p = softmax2(z);
            let y = usize::from(e.positive);
            let m = z[0].max(z[1]);
            loss += m + ((z[0] - m).exp() + (z[1] - m).exp()).ln() - z[y];

            let dz = [p[0] - f64::from(u8::from(y == 0)), p[1] - f64::from(u8::from(y == 1))];
            dh.iter_mut().for_each(|v| *v = 0.0);
            for k in 0..2 {
                g_b2[k] += dz[k];
                for j in 0..nh {
                    g_w2[k * nh + j] += dz[k] * h[j];
                    dh[j] += dz[k] * self.w2[k * nh + j];
                }
            }
            for j in 0..nh {
                if h[j] <= 0.0 {
                    continue;
                }
                g_b1[j] += dh[j];
                for i in 0..ni {
                    g_w1[j * ni + i] += dh[j] * x[i];
                }
            }
        }
        let n = examples.len() as f64;
        grad.iter_mut().for_each(|g| *g /= n);
        (loss / n, grad)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    pub network: Network,
    pub scheme: FeatureScheme,
    pub hyper: Hyper,
    pub final_loss: f64,
}

impl ClassifierModel {
    pub fn predict(&self, features: &[f64]) -> bool {
        self.network.predict(features)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: ClassifierModel,
    /// Loss before training followed by the loss after each epoch.
    pub loss_history: Vec<f64>,
}

fn validate(examples: &[LabeledExample], dimension: usize) -> Result<(), ClassifyError> {
    if examples.len() < 2 {
        return Err(ClassifyError::TooFewExamples { needed: 2, got: examples.len() });
    }
    for e in examples {
        if e.features.len() != dimension {
            return Err(ClassifyError::Dimension { expected: dimension, got: e.features.len() });
        }
        if e.features.iter().any(|v| !v.is_finite()) {
            return Err(ClassifyError::NonFinite(e.pair_id.clone()));
        }
    }
    let positives = examples.iter().filter(|e| e.positive).count();
    if positives == 0 || positives == examples.len() {
        return Err(ClassifyError::SingleLabel);
    }
    Ok(())
}

/// Full-batch gradient descent on mean cross-entropy. A step that would raise
/// the loss is rejected and retried at half the learning rate, so the loss
/// history never increases.
pub fn train(examples: &[LabeledExample], scheme: FeatureScheme, hyper: Hyper) -> Result<TrainOutcome, ClassifyError> {
    validate(examples, scheme.dimension())?;
    let mut data = examples.to_vec();
    // Summation order is fixed by content, not by input order.
    data.sort_by(|a, b| {
        a.pair_id.cmp(&b.pair_id).then(a.positive.cmp(&b.positive)).then_with(|| {
            a.features
                .iter()
                .zip(&b.features)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });

    let mut network = Network::init(scheme.dimension(), hyper.hidden, hyper.seed);
    let mut lr = hyper.learning_rate;
    let (mut loss, mut grad) = network.loss_and_gradient(&data);
    let mut history = vec![loss];

    'epochs: for _ in 0..hyper.epochs {
        let params = network.params();
        let mut candidate = network.clone();
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let stepped: Vec<f64> = params.iter().zip(&grad).map(|(p, g)| p - lr * g).collect();
            candidate.set_params(&stepped);
            let (new_loss, new_grad) = candidate.loss_and_gradient(&data);
            if new_loss <= loss {
                network = candidate;
                loss = new_loss;
                grad = new_grad;
                accepted = true;
                break;
            }
            lr /= 2.0;
        }
        if !accepted {
            break 'epochs;
        }
        history.push(loss);
    }

    Ok(TrainOutcome { model: ClassifierModel { network, scheme, hyper, final_loss: loss }, loss_history: history })
}

fn write_row<W: Write>(out: &mut W, values: &[f64]) -> std::io::Result<()> {
    let cells: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
    writeln!(out, "{}", cells.join(" "))
}

/// Plain-text model file. Floats are written in shortest round-trip form, so
/// reading a model back yields bit-identical weights.
pub fn write_model<W: Write>(mut out: W, model: &ClassifierModel) -> Result<(), ClassifyError> {
    let net = &model.network;
    writeln!(out, "{MODEL_MAGIC}")?;
    writeln!(out, "scheme {}", model.scheme)?;
    writeln!(out, "input {}", net.input)?;
    writeln!(out, "hidden {}", net.hidden)?;
    writeln!(out, "seed {}", model.hyper.seed)?;
    writeln!(out, "epochs {}", model.hyper.epochs)?;
    writeln!(out, "learning_rate {:?}", model.hyper.learning_rate)?;
    writeln!(out, "final_loss {:?}", model.final_loss)?;
    writeln!(out, "w1")?;
    for row in net.w1.chunks(net.input.max(1)) {
        write_row(&mut out, row)?;
    }
    writeln!(out, "b1")?;
    write_row(&mut out, &net.b1)?;
    writeln!(out, "w2")?;
    for row in net.w2.chunks(net.hidden.max(1)) {
        write_row(&mut out, row)?;
    }
    writeln!(out, "b2")?;
    write_row(&mut out, &net.b2)?;
    out.flush()?;
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn err(&self, message: impl Into<String>) -> ClassifyError {
        ClassifyError::ModelFormat { line: self.line, message: message.into() }
    }

    fn next(&mut self) -> Result<String, ClassifyError> {
        self.line += 1;
        match self.inner.next() {
            Some(l) => Ok(l?),
            None => Err(self.err("unexpected end of file")),
        }
    }

    fn expect(&mut self, literal: &str) -> Result<(), ClassifyError> {
        let l = self.next()?;
        if l.trim_end() != literal {
            return Err(self.err(format!("expected `{literal}`, found `{l}`")));
        }
        Ok(())
    }

    fn field<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, ClassifyError> {
        let l = self.next()?;
        let value = l
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected `{key}`")))?;
        value.trim().parse().map_err(|_| self.err(format!("invalid value for `{key}`")))
    }

    fn row(&mut self, len: usize) -> Result<Vec<f64>, ClassifyError> {
        let l = self.next()?;
        let values = l
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| self.err(format!("invalid number `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != len {
            return Err(self.err(format!("expected {len} values, found {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(self.err("non-finite weight"));
        }
        Ok(values)
    }
}

pub fn read_model<R: BufRead>(input: R) -> Result<ClassifierModel, ClassifyError> {
    let mut lines = Lines { inner: input.lines(), line: 0 };
    lines.expect(MODEL_MAGIC)?;
    let scheme: FeatureScheme = lines.field("scheme")?;
    let input: usize = lines.field("input")?;
    if input != scheme.dimension() {
        return Err(lines.err(format!("input size {input} does not match scheme `{scheme}`")));
    }
    let hidden: usize = lines.field("hidden")?;
    if hidden == 0 {
        return Err(lines.err("hidden size must be positive"));
    }
    let seed: u64 = lines.field("seed")?;
    let epochs: usize = lines.field("epochs")?;
    let learning_rate: f64 = lines.field("learning_rate")?;
    let final_loss: f64 = lines.field("final_loss")?;

    lines.expect("w1")?;
    let mut w1 = Vec::with_capacity(input * hidden);
    for _ in 0..hidden {
        w1.extend(lines.row(input)?);
    }
    lines.expect("b1")?;
    let b1 = lines.row(hidden)?;
    lines.expect("w2")?;
    let mut w2 = Vec::with_capacity(2 * hidden);
    for _ in 0..2 {
        w2.extend(lines.row(hidden)?);
    }
    lines.expect("b2")?;
    let b2 = lines.row(2)?;

    Ok(ClassifierModel {
        network: Network { input, hidden, w1, b1, w2, b2 },
        scheme,
        hyper: Hyper { hidden, epochs, learning_rate, seed },
        final_loss,
    })
}
