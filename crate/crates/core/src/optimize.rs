//! Derivative-free Nelder-Mead simplex optimization with box bounds and
//! penalty constraints, plus the heating-model calibration that anchors the
//! noise model to a single measured point.

use crate::readout::HeatingModel;
use crate::units::to_angular;

/// A scalar objective over a box, with optional weighted penalty terms added
/// to the cost. The evaluator must be pure.
pub struct ObjectiveSpec<'a> {
    pub dimension: usize,
    evaluator: Box<dyn Fn(&[f64]) -> f64 + 'a>,
    bounds: Option<Vec<(f64, f64)>>,
    penalties: Vec<(Box<dyn Fn(&[f64]) -> f64 + 'a>, f64)>,
}

impl<'a> ObjectiveSpec<'a> {
    pub fn new(dimension: usize, evaluator: impl Fn(&[f64]) -> f64 + 'a) -> Self {
        Self {
            dimension,
            evaluator: Box::new(evaluator),
            bounds: None,
            penalties: Vec::new(),
        }
    }

    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Self {
        assert_eq!(bounds.len(), self.dimension);
        for &(lo, hi) in &bounds {
            assert!(lo < hi, "bounds must satisfy lo < hi");
        }
        self.bounds = Some(bounds);
        self
    }

    /// Add a penalty term: `weight * max(0, violation(x))` is added to the cost.
    pub fn with_penalty(mut self, violation: impl Fn(&[f64]) -> f64 + 'a, weight: f64) -> Self {
        self.penalties.push((Box::new(violation), weight));
        self
    }

    fn project(&self, x: &mut [f64]) {
        if let Some(bounds) = &self.bounds {
            for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
                *v = v.clamp(lo, hi);
            }
        }
    }

    fn cost(&self, x: &[f64]) -> f64 {
        let mut c = (self.evaluator)(x);
        for (violation, weight) in &self.penalties {
            c += weight * violation(x).max(0.0);
        }
        c
    }
}

/// One row of the evaluation trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    pub iter: usize,
    pub cost_best: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TracePoint>,
}

struct Simplex {
    vertices: Vec<Vec<f64>>,
    costs: Vec<f64>,
}

impl Simplex {
    fn initial(spec: &ObjectiveSpec, x0: &[f64]) -> Self {
        let d = spec.dimension;
        let mut vertices = vec![x0.to_vec()];
        for i in 0..d {
            let mut v = x0.to_vec();
            let step = match &spec.bounds {
                Some(b) => (0.05 * (b[i].1 - b[i].0)).max(1e-8),
                None => (0.05 * x0[i].abs()).max(1e-8),
            };
            // step inward when the vertex would leave the box
            if let Some(b) = &spec.bounds {
                if v[i] + step > b[i].1 {
                    v[i] -= step;
                } else {
                    v[i] += step;
                }
            } else {
                v[i] += step;
            }
            spec.project(&mut v);
            vertices.push(v);
        }
        let costs = vertices.iter().map(|v| spec.cost(v)).collect();
        Self { vertices, costs }
    }

    fn sort(&mut self) {
        let mut order: Vec<usize> = (0..self.costs.len()).collect();
        order.sort_by(|&a, &b| self.costs[a].partial_cmp(&self.costs[b]).unwrap());
        self.vertices = order.iter().map(|&i| self.vertices[i].clone()).collect();
        self.costs = order.iter().map(|&i| self.costs[i]).collect();
    }

    fn diameter(&self) -> f64 {
        let best = &self.vertices[0];
        self.vertices[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(best)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    fn centroid(&self) -> Vec<f64> {
        let d = self.vertices[0].len();
        let n = self.vertices.len() - 1;
        let mut c = vec![0.0; d];
        for v in &self.vertices[..n] {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi / n as f64;
            }
        }
        c
    }
}

const ALPHA: f64 = 1.0; // reflection
const GAMMA: f64 = 2.0; // expansion
const RHO: f64 = 0.5; // contraction
const SIGMA: f64 = 0.5; // shrink

fn run_simplex(
    spec: &ObjectiveSpec,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
    trace: &mut Vec<TracePoint>,
    iter_offset: usize,
) -> (Simplex, usize, bool, bool) {
    let mut simplex = Simplex::initial(spec, x0);
    simplex.sort();
    let mut last_shrink_gain = 0.0;
    let mut iter = 0;
    while iter < max_iter {
        let diam = simplex.diameter();
        trace.push(TracePoint {
            iter: iter_offset + iter,
            cost_best: simplex.costs[0],
            x: simplex.vertices[0].clone(),
        });
        if diam < tol {
            return (simplex, iter, true, last_shrink_gain > tol);
        }
        let n = simplex.vertices.len() - 1;
        let centroid = simplex.centroid();
        let worst = simplex.vertices[n].clone();
        let at = |coef: f64| -> Vec<f64> {
            let mut x: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + coef * (c - w))
                .collect();
            spec.project(&mut x);
            x
        };

        let reflected = at(ALPHA);
        let f_r = spec.cost(&reflected);
        if f_r < simplex.costs[0] {
            let expanded = at(GAMMA);
            let f_e = spec.cost(&expanded);
            if f_e < f_r {
                simplex.vertices[n] = expanded;
                simplex.costs[n] = f_e;
            } else {
                simplex.vertices[n] = reflected;
                simplex.costs[n] = f_r;
            }
        } else if f_r < simplex.costs[n - 1] {
            simplex.vertices[n] = reflected;
            simplex.costs[n] = f_r;
        } else {
            let contracted = if f_r < simplex.costs[n] {
                at(RHO)
            } else {
                at(-RHO)
            };
            let f_c = spec.cost(&contracted);
            if f_c < simplex.costs[n].min(f_r) {
                simplex.vertices[n] = contracted;
                simplex.costs[n] = f_c;
            } else {
                // shrink toward the best vertex
                let before = simplex.costs[0];
                let best = simplex.vertices[0].clone();
                for i in 1..=n {
                    let mut v: Vec<f64> = best
                        .iter()
                        .zip(&simplex.vertices[i])
                        .map(|(b, v)| b + SIGMA * (v - b))
                        .collect();
                    spec.project(&mut v);
                    simplex.costs[i] = spec.cost(&v);
                    simplex.vertices[i] = v;
                }
                simplex.sort();
                last_shrink_gain = before - simplex.costs[0];
            }
        }
        simplex.sort();
        iter += 1;
    }
    (simplex, iter, false, false)
}

/// Nelder-Mead with coefficients (1, 2, 0.5, 0.5), box projection, and one
/// automatic restart when the simplex collapsed while still making progress.
pub fn nelder_mead(
    spec: &ObjectiveSpec,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> NelderMeadResult {
    assert_eq!(x0.len(), spec.dimension);
    if let Some(bounds) = &spec.bounds {
        for (v, &(lo, hi)) in x0.iter().zip(bounds) {
            assert!(*v >= lo && *v <= hi, "x0 must lie within bounds");
        }
    }
    let mut trace = Vec::new();
    let (simplex, used, converged, restart) =
        run_simplex(spec, x0, tol, max_iter, &mut trace, 0);
    let (simplex, extra, converged) = if converged && restart && used < max_iter {
        let x_best = simplex.vertices[0].clone();
        let (s, e, c, _) =
            run_simplex(spec, &x_best, tol, max_iter - used, &mut trace, used);
        (s, e, c)
    } else {
        (simplex, 0, converged)
    };
    NelderMeadResult {
        x: simplex.vertices[0].clone(),
        cost: simplex.costs[0],
        iterations: used + extra,
        converged,
        trace,
    }
}

/// Which heating-model parameters calibration may adjust.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationFree {
    GammaRef,
    NHotRef,
    Both,
}

/// Anchor the heating model to a single (n_o, tau, n_added) data point.
/// The reference photon number is pinned to the anchor so the power laws
/// drop out at the calibration point.
pub fn calibrate_heating(
    anchor: (f64, f64, f64),
    free: CalibrationFree,
    base: &HeatingModel,
) -> Result<HeatingModel, String> {
    let (n_o, tau, target) = anchor;
    if !(target > 0.0) {
        return Err("anchor n_added must be > 0".to_string());
    }
    if !(n_o > 0.0 && tau > 0.0) {
        return Err("anchor n_o and tau must be > 0".to_string());
    }
    let mut model = HeatingModel {
        n_o_ref: n_o,
        ..base.clone()
    };
    match free {
        CalibrationFree::GammaRef => {
            if target >= model.n_hot_ref {
                return Err(format!(
                    "anchor n_added = {target} exceeds the saturation level {}",
                    model.n_hot_ref
                ));
            }
            model.gamma_h_ref = -(1.0 - target / model.n_hot_ref).ln() / to_angular(tau);
        }
        CalibrationFree::NHotRef => {
            let fill = -(-to_angular(model.gamma_h_ref) * tau).exp_m1();
            if !(fill > 0.0) {
                return Err("gamma_h_ref is zero; cannot calibrate n_hot_ref".to_string());
            }
            model.n_hot_ref = target / fill;
        }
        CalibrationFree::Both => {
            // underdetermined; solve the least-squares residual with the
            // simplex starting from the closed-form gamma solution
            let mut start = model.clone();
            if target < start.n_hot_ref {
                start.gamma_h_ref = -(1.0 - target / start.n_hot_ref).ln() / to_angular(tau);
            } else {
                start.n_hot_ref = 2.0 * target;
                start.gamma_h_ref = -(0.5f64.ln()) / to_angular(tau);
            }
            let template = model.clone();
            let residual = move |x: &[f64]| {
                let m = HeatingModel {
                    n_hot_ref: x[0].exp(),
                    gamma_h_ref: x[1].exp(),
                    ..template.clone()
                };
                let n = crate::readout::added_noise(&m, n_o, tau);
                (n - target) * (n - target)
            };
            let spec = ObjectiveSpec::new(2, residual);
            let x0 = [start.n_hot_ref.ln(), start.gamma_h_ref.ln()];
            let result = nelder_mead(&spec, &x0, 1e-14, 4000);
            model.n_hot_ref = result.x[0].exp();
            model.gamma_h_ref = result.x[1].exp();
        }
    }
    let achieved = crate::readout::added_noise(&model, n_o, tau);
    if (achieved - target).abs() > 1e-9 * target {
        return Err(format!(
            "calibration failed to reproduce the anchor: got {achieved}, want {target}"
        ));
    }
    Ok(model)
}
