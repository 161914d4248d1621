//! Fast evaluators used inside the local search.
//!
//! The search works in natural logarithms and converts to bits at the end.
//! Gradients are evaluated at `w + GRAD_SHIFT` so that zero cells get a large
//! finite slope instead of an infinite one; the objective itself is always
//! evaluated exactly at `w`.

use crate::info::JointDist;

const GRAD_SHIFT: f64 = 1e-12;

#[inline]
fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// `a * I(U;Q|V) + b * I(U;V|Q)` over Markov couplings `p(q|u)`.
///
/// Under `Q - U - V` this equals
/// `a [H(Q|V) - H(Q|U)] + b [H(V|Q) - H(V|U)]`, which only needs `p(q, v)`.
#[derive(Debug, Clone)]
pub(crate) struct MarkovObjective {
    nu: usize,
    nv: usize,
    nq: usize,
    puv: Vec<f64>,
    pu: Vec<f64>,
    weight_s2: f64,
    weight_s3: f64,
    /// `a * sum_v p(v) ln p(v) - b * H(V|U)` in nats.
    constant: f64,
}

impl MarkovObjective {
    pub fn new(j: &JointDist, nq: usize, weight_s2: f64, weight_s3: f64) -> Self {
        let (nu, nv) = (j.rows(), j.cols());
        let puv = j.as_slice().to_vec();
        let pu = j.row_sums();
        let pv = j.col_sums();
        let sum_pv_ln: f64 = pv.iter().map(|&p| xlnx(p)).sum();
        // -H(V|U) = sum p(u,v) ln (p(u,v) / p(u))
        let neg_h_v_given_u: f64 = (0..nu)
            .flat_map(|u| (0..nv).map(move |v| (u, v)))
            .map(|(u, v)| {
                let p = puv[u * nv + v];
                if p > 0.0 {
                    p * (p / pu[u]).ln()
                } else {
                    0.0
                }
            })
            .sum();
        Self {
            nu,
            nv,
            nq,
            puv,
            pu,
            weight_s2,
            weight_s3,
            constant: weight_s2 * sum_pv_ln + weight_s3 * neg_h_v_given_u,
        }
    }

    pub fn row_mass(&self) -> &[f64] {
        &self.pu
    }

    fn fill_qv(&self, w: &[f64], shift: f64, r: &mut [f64], rq: &mut [f64]) {
        r.iter_mut().for_each(|x| *x = 0.0);
        rq.iter_mut().for_each(|x| *x = 0.0);
        let (nv, nq) = (self.nv, self.nq);
        for u in 0..self.nu {
            let row = &w[u * nq..(u + 1) * nq];
            for v in 0..nv {
                let p = self.puv[u * nv + v];
                if p == 0.0 {
                    continue;
                }
                let out = &mut r[v * nq..(v + 1) * nq];
                for (acc, &x) in out.iter_mut().zip(row) {
                    *acc += p * (x + shift);
                }
            }
            let pu = self.pu[u];
            for (acc, &x) in rq.iter_mut().zip(row) {
                *acc += pu * (x + shift);
            }
        }
    }

    /// Objective in nats.
    pub fn value_nats(&self, w: &[f64], scratch: &mut Scratch) -> f64 {
        let Scratch { r, rq } = scratch;
        self.fill_qv(w, 0.0, r, rq);
        let sum_r: f64 = r.iter().map(|&x| xlnx(x)).sum();
        let sum_rq: f64 = rq.iter().map(|&x| xlnx(x)).sum();
        let mut sum_w = 0.0;
        for u in 0..self.nu {
            let row: f64 = w[u * self.nq..(u + 1) * self.nq]
                .iter()
                .map(|&x| xlnx(x))
                .sum();
            sum_w += self.pu[u] * row;
        }
        let (a, b) = (self.weight_s2, self.weight_s3);
        -(a + b) * sum_r + a * sum_w + b * sum_rq + self.constant
    }

    /// Gradient in nats with respect to each `w[u][q]`.
    pub fn gradient_nats(&self, w: &[f64], scratch: &mut Scratch, grad: &mut [f64]) {
        let Scratch { r, rq } = scratch;
        self.fill_qv(w, GRAD_SHIFT, r, rq);
        let (a, b) = (self.weight_s2, self.weight_s3);
        let (nv, nq) = (self.nv, self.nq);
        for u in 0..self.nu {
            let pu = self.pu[u];
            let g = &mut grad[u * nq..(u + 1) * nq];
            if pu == 0.0 {
                g.iter_mut().for_each(|x| *x = 0.0);
                continue;
            }
            for q in 0..nq {
                let mut acc = a * pu * (w[u * nq + q] + GRAD_SHIFT).ln() + b * pu * rq[q].ln();
                for v in 0..nv {
                    let p = self.puv[u * nv + v];
                    if p > 0.0 {
                        acc -= (a + b) * p * r[v * nq + q].ln();
                    }
                }
                g[q] = acc;
            }
        }
    }

    pub fn scratch(&self) -> Scratch {
        Scratch {
            r: vec![0.0; self.nv * self.nq],
            rq: vec![0.0; self.nq],
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Scratch {
    r: Vec<f64>,
    rq: Vec<f64>,
}

/// `I(U;Q|V) + I(U;V|Q)` and the leak `I(Q;V|U)` over general couplings
/// `p(q|u,v)`, rows indexed by the cell `u * |V| + v`.
#[derive(Debug, Clone)]
pub(crate) struct GeneralObjective {
    nu: usize,
    nv: usize,
    nq: usize,
    puv: Vec<f64>,
    /// `h(uv) - h(v)` for the objective and `h(uv) - h(u)` for the leak, nats.
    objective_constant: f64,
    leak_constant: f64,
}

/// Marginals of `P(u, v, q) = p(u, v) w(q|u, v)`.
struct Marginals {
    vq: Vec<f64>,
    uq: Vec<f64>,
    q: Vec<f64>,
}

impl GeneralObjective {
    pub fn new(j: &JointDist, nq: usize) -> Self {
        let (nu, nv) = (j.rows(), j.cols());
        let h = |xs: &[f64]| -xs.iter().map(|&x| xlnx(x)).sum::<f64>();
        let h_uv = h(j.as_slice());
        Self {
            nu,
            nv,
            nq,
            puv: j.as_slice().to_vec(),
            objective_constant: h_uv - h(&j.col_sums()),
            leak_constant: h_uv - h(&j.row_sums()),
        }
    }

    pub fn cell_mass(&self) -> &[f64] {
        &self.puv
    }

    pub fn qcard(&self) -> usize {
        self.nq
    }

    fn marginals(&self, w: &[f64], shift: f64) -> Marginals {
        let (nu, nv, nq) = (self.nu, self.nv, self.nq);
        let mut m = Marginals {
            vq: vec![0.0; nv * nq],
            uq: vec![0.0; nu * nq],
            q: vec![0.0; nq],
        };
        for u in 0..nu {
            for v in 0..nv {
                let p = self.puv[u * nv + v];
                if p == 0.0 {
                    continue;
                }
                let row = &w[(u * nv + v) * nq..(u * nv + v + 1) * nq];
                for (q, &x) in row.iter().enumerate() {
                    let mass = p * (x + shift);
                    m.vq[v * nq + q] += mass;
                    m.uq[u * nq + q] += mass;
                    m.q[q] += mass;
                }
            }
        }
        m
    }

    fn h_uvq(&self, w: &[f64]) -> f64 {
        let mut h = 0.0;
        for (cell, &p) in self.puv.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for &x in &w[cell * self.nq..(cell + 1) * self.nq] {
                h -= xlnx(p * x);
            }
        }
        h
    }

    /// `(objective, leak)` in nats.
    pub fn evaluate_nats(&self, w: &[f64]) -> (f64, f64) {
        let m = self.marginals(w, 0.0);
        let h = |xs: &[f64]| -xs.iter().map(|&x| xlnx(x)).sum::<f64>();
        let (h_vq, h_uq, h_q) = (h(&m.vq), h(&m.uq), h(&m.q));
        let h_uvq = self.h_uvq(w);
        // I(U;Q|V) + I(U;V|Q) = h(uv) + 2h(vq) + h(uq) - 2h(uvq) - h(v) - h(q)
        let objective = self.objective_constant + 2.0 * h_vq + h_uq - 2.0 * h_uvq - h_q;
        // I(Q;V|U) = h(uq) + h(uv) - h(uvq) - h(u)
        let leak = self.leak_constant + h_uq - h_uvq;
        (objective, leak)
    }

    /// Gradients of objective and leak in nats.
    pub fn gradients_nats(&self, w: &[f64], grad_obj: &mut [f64], grad_leak: &mut [f64]) {
        let m = self.marginals(w, GRAD_SHIFT);
        let (nv, nq) = (self.nv, self.nq);
        for u in 0..self.nu {
            for v in 0..nv {
                let cell = u * nv + v;
                let p = self.puv[cell];
                for q in 0..nq {
                    let i = cell * nq + q;
                    if p == 0.0 {
                        grad_obj[i] = 0.0;
                        grad_leak[i] = 0.0;
                        continue;
                    }
                    let ln_uvq = (p * (w[i] + GRAD_SHIFT)).ln();
                    let ln_uq = m.uq[u * nq + q].ln();
                    grad_obj[i] =
                        p * (2.0 * ln_uvq - 2.0 * m.vq[v * nq + q].ln() - ln_uq + m.q[q].ln());
                    grad_leak[i] = p * (ln_uvq - ln_uq);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{conditional_mutual_information, extend_with_coupling, Cmi, JointDist3};
    use crate::rng::{dirichlet_ones, task_rng};
    use crate::tension::Coupling;
    use std::f64::consts::LN_2;

    fn random_joint(nu: usize, nv: usize, seed: u64) -> JointDist {
        let mut rng = task_rng(seed, 0);
        let mut d = vec![0.0; nu * nv];
        dirichlet_ones(&mut rng, &mut d);
        JointDist::new(nu, nv, d).unwrap()
    }

    #[test]
    fn markov_value_matches_cmi_route() {
        for seed in 0..10 {
            let j = random_joint(3, 2, seed);
            let mut rng = task_rng(seed, 5);
            let c = Coupling::random(3, 4, &mut rng);
            let t = extend_with_coupling(&j, &c).unwrap();
            let s2 = conditional_mutual_information(&t, Cmi::UqGivenV);
            let s3 = conditional_mutual_information(&t, Cmi::UvGivenQ);
            for (a, b) in [(1.0, 1.0), (0.3, 0.7), (1.0, 0.0), (0.0, 1.0)] {
                let f = MarkovObjective::new(&j, 4, a, b);
                let got = f.value_nats(c.as_slice(), &mut f.scratch()) / LN_2;
                assert!((got - (a * s2 + b * s3)).abs() < 1e-12, "{got}");
            }
        }
    }

    #[test]
    fn markov_gradient_matches_finite_differences() {
        let j = random_joint(2, 3, 4);
        let mut rng = task_rng(4, 1);
        let c = Coupling::random(2, 3, &mut rng);
        let f = MarkovObjective::new(&j, 3, 0.6, 1.0);
        let mut s = f.scratch();
        let mut g = vec![0.0; 6];
        f.gradient_nats(c.as_slice(), &mut s, &mut g);
        let h = 1e-6;
        for i in 0..6 {
            let mut up = c.as_slice().to_vec();
            let mut dn = up.clone();
            up[i] += h;
            dn[i] -= h;
            let fd = (f.value_nats(&up, &mut s) - f.value_nats(&dn, &mut s)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-5, "{i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn general_value_and_gradient() {
        let j = random_joint(2, 2, 8);
        let mut rng = task_rng(8, 2);
        let mut w = vec![0.0; 4 * 3];
        for row in w.chunks_mut(3) {
            dirichlet_ones(&mut rng, row);
        }
        let f = GeneralObjective::new(&j, 3);
        let (obj, leak) = f.evaluate_nats(&w);
        let mass = j.as_slice();
        let cells: Vec<f64> = (0..4)
            .flat_map(|c| w[c * 3..c * 3 + 3].iter().map(move |&x| x * mass[c]))
            .collect();
        let t = JointDist3::new(2, 2, 3, cells).unwrap();
        let want = conditional_mutual_information(&t, Cmi::UqGivenV)
            + conditional_mutual_information(&t, Cmi::UvGivenQ);
        assert!((obj / LN_2 - want).abs() < 1e-12);
        assert!((leak / LN_2 - conditional_mutual_information(&t, Cmi::VqGivenU)).abs() < 1e-12);

        let mut go = vec![0.0; 12];
        let mut gl = vec![0.0; 12];
        f.gradients_nats(&w, &mut go, &mut gl);
        let h = 1e-6;
        for i in 0..12 {
            let mut up = w.clone();
            let mut dn = w.clone();
            up[i] += h;
            dn[i] -= h;
            let (ou, lu) = f.evaluate_nats(&up);
            let (od, ld) = f.evaluate_nats(&dn);
            assert!(((ou - od) / (2.0 * h) - go[i]).abs() < 1e-5);
            assert!(((lu - ld) / (2.0 * h) - gl[i]).abs() < 1e-5);
        }
    }
}
