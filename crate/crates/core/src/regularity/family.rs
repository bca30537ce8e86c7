use crate::poly::{jet, residuals, MapGerm, PolyError, Polynomial};

use super::RegularityError;

/// `F(x, t) = f(x) + t (g(x) - f(x))` on `R^n x J`, with `J = (-0.1, 1.1)`.
#[derive(Debug, Clone)]
pub struct DeformationFamily {
    f: MapGerm,
    g: MapGerm,
    z: MapGerm,
    q: MapGerm,
    rres: MapGerm,
    r: u32,
    interval: (f64, f64),
    /// Components of `F` in `n + 1` variables, `t` last.
    big: Vec<Polynomial>,
    big_grad: Vec<Vec<Polynomial>>,
    grad_f: Vec<Vec<Polynomial>>,
    grad_g: Vec<Vec<Polynomial>>,
    grad_z: Vec<Vec<Polynomial>>,
}

/// Checks `j^r g(0) = j^r f(0)` and builds the family.
pub fn build_family(
    f: &MapGerm,
    g: &MapGerm,
    r: u32,
) -> Result<DeformationFamily, RegularityError> {
    if r < 1 {
        return Err(RegularityError::Config("r must be at least 1".into()));
    }
    let (q, rres) = residuals(f, g, r)?;
    let n = f.nvars();
    let t = Polynomial::variable(n, n + 1);
    let big: Vec<Polynomial> = f
        .components()
        .iter()
        .zip(g.components())
        .map(|(fj, gj)| {
            let fe = fj.extend_vars(n + 1);
            let de = (gj - fj).extend_vars(n + 1);
            &fe + &(&t * &de)
        })
        .collect();
    let big_grad = big.iter().map(Polynomial::gradient).collect();
    let z = jet(f, r);
    Ok(DeformationFamily {
        grad_f: f.gradients(),
        grad_g: g.gradients(),
        grad_z: z.gradients(),
        f: f.clone(),
        g: g.clone(),
        z,
        q,
        rres,
        r,
        interval: (-0.1, 1.1),
        big,
        big_grad,
    })
}

impl DeformationFamily {
    pub fn f(&self) -> &MapGerm {
        &self.f
    }

    pub fn g(&self) -> &MapGerm {
        &self.g
    }

    /// The r-jet of `f` as a polynomial of degree `<= r`.
    pub fn z(&self) -> &MapGerm {
        &self.z
    }

    /// `f - z`
    pub fn q(&self) -> &MapGerm {
        &self.q
    }

    /// `g - z`
    pub fn rres(&self) -> &MapGerm {
        &self.rres
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn nvars(&self) -> usize {
        self.f.nvars()
    }

    pub fn ncomps(&self) -> usize {
        self.f.ncomps()
    }

    /// Components of `F` as polynomials in `(x1..xn, t)`.
    pub fn big_components(&self) -> &[Polynomial] {
        &self.big
    }

    /// `f_t = F(., t)` as a germ in `x`.
    pub fn f_t(&self, t: f64) -> Result<MapGerm, PolyError> {
        let comps = self
            .f
            .components()
            .iter()
            .zip(self.g.components())
            .map(|(fj, gj)| fj + &(gj - fj).scale(t))
            .collect();
        MapGerm::new(comps)
    }

    fn joined(x: &[f64], t: f64) -> Vec<f64> {
        let mut y = x.to_vec();
        y.push(t);
        y
    }

    pub fn eval(&self, x: &[f64], t: f64) -> Vec<f64> {
        let y = Self::joined(x, t);
        self.big.iter().map(|c| c.eval_unchecked(&y)).collect()
    }

    /// Rows `grad F_j(x, t)` in `R^{n+1}`.
    pub fn grad(&self, x: &[f64], t: f64) -> Vec<Vec<f64>> {
        let y = Self::joined(x, t);
        self.big_grad
            .iter()
            .map(|row| row.iter().map(|p| p.eval_unchecked(&y)).collect())
            .collect()
    }

    /// Gradients of `f`, `g` and `z` at `x`, from which every `t`-dependent
    /// quantity is assembled without re-evaluating polynomials.
    pub fn point_gradients(&self, x: &[f64]) -> PointGradients {
        let eval = |rows: &[Vec<Polynomial>]| -> Vec<Vec<f64>> {
            rows.iter()
                .map(|row| row.iter().map(|p| p.eval_unchecked(x)).collect())
                .collect()
        };
        let fx = self.f.eval_unchecked(x);
        let gx = self.g.eval_unchecked(x);
        PointGradients {
            x: x.to_vec(),
            grad_f: eval(&self.grad_f),
            grad_g: eval(&self.grad_g),
            grad_z: eval(&self.grad_z),
            dt: gx.iter().zip(&fx).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Gradients at a fixed `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointGradients {
    pub x: Vec<f64>,
    pub grad_f: Vec<Vec<f64>>,
    pub grad_g: Vec<Vec<f64>>,
    pub grad_z: Vec<Vec<f64>>,
    /// `dF_j/dt = g_j(x) - f_j(x)`
    pub dt: Vec<f64>,
}

impl PointGradients {
    /// Rows `grad f_{t,j}(x)` in `R^n`.
    pub fn grad_ft(&self, t: f64) -> Vec<Vec<f64>> {
        self.grad_f
            .iter()
            .zip(&self.grad_g)
            .map(|(a, b)| a.iter().zip(b).map(|(u, v)| u + t * (v - u)).collect())
            .collect()
    }

    /// Rows `(grad f_{t,j}(x), 0)` in `R^{n+1}`.
    pub fn grad_ft_padded(&self, t: f64) -> Vec<Vec<f64>> {
        self.grad_ft(t)
            .into_iter()
            .map(|mut row| {
                row.push(0.0);
                row
            })
            .collect()
    }

    /// Rows `grad F_j(x, t) = (grad f_{t,j}(x), g_j(x) - f_j(x))`.
    pub fn grad_big(&self, t: f64) -> Vec<Vec<f64>> {
        self.grad_ft(t)
            .into_iter()
            .zip(&self.dt)
            .map(|(mut row, &d)| {
                row.push(d);
                row
            })
            .collect()
    }
}

/// `rho(x, t) = |x|^2` and its gradient `(2x, 0)`.
pub fn control_function(x: &[f64], _t: f64) -> (f64, Vec<f64>) {
    let value = x.iter().map(|v| v * v).sum();
    let mut grad: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
    grad.push(0.0);
    (value, grad)
}
