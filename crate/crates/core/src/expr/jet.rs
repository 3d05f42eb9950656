use num_complex::Complex64 as C64;

use super::{CoeffExpr, ExprError, VarId};

/// First-order Wirtinger jet: a value together with its partials with
/// respect to every variable id (`2n` entries for `n` coordinates).
#[derive(Clone, Debug, PartialEq)]
pub struct Jet1 {
    pub val: C64,
    pub grad: Vec<C64>,
}

impl Jet1 {
    pub fn constant(val: C64, nvars: usize) -> Self {
        Jet1 { val, grad: vec![C64::new(0.0, 0.0); nvars] }
    }

    /// Value and exact first partials of `e` at `point` (`point.len()` coordinates).
    pub fn of_expr(e: &CoeffExpr, point: &[C64]) -> Result<Self, ExprError> {
        let nv = 2 * point.len();
        let mut grad = Vec::with_capacity(nv);
        for k in 0..nv {
            grad.push(e.diff(VarId(k as u16)).eval(point)?);
        }
        Ok(Jet1 { val: e.eval(point)?, grad })
    }

    pub fn d(&self, v: VarId) -> C64 {
        self.grad[v.0 as usize]
    }

    fn zip(&self, o: &Jet1, f: impl Fn(C64, C64) -> C64) -> Vec<C64> {
        self.grad.iter().zip(&o.grad).map(|(a, b)| f(*a, *b)).collect()
    }

    pub fn add(&self, o: &Jet1) -> Jet1 {
        Jet1 { val: self.val + o.val, grad: self.zip(o, |a, b| a + b) }
    }

    pub fn sub(&self, o: &Jet1) -> Jet1 {
        Jet1 { val: self.val - o.val, grad: self.zip(o, |a, b| a - b) }
    }

    pub fn mul(&self, o: &Jet1) -> Jet1 {
        let (u, v) = (self.val, o.val);
        Jet1 { val: u * v, grad: self.zip(o, |a, b| a * v + u * b) }
    }

    pub fn div(&self, o: &Jet1) -> Jet1 {
        let (u, v) = (self.val, o.val);
        Jet1 { val: u / v, grad: self.zip(o, |a, b| (a * v - u * b) / (v * v)) }
    }

    pub fn scale(&self, s: C64) -> Jet1 {
        Jet1 { val: self.val * s, grad: self.grad.iter().map(|g| g * s).collect() }
    }

    pub fn add_const(&self, c: C64) -> Jet1 {
        Jet1 { val: self.val + c, grad: self.grad.clone() }
    }

    /// Conjugate function: `∂_v conj(f) = conj(∂_{v̄} f)`.
    pub fn conj(&self) -> Jet1 {
        let grad = (0..self.grad.len()).map(|k| self.grad[k ^ 1].conj()).collect();
        Jet1 { val: self.val.conj(), grad }
    }

    /// Square root of a real positive function (imaginary part of the value is ignored).
    pub fn sqrt_real(&self) -> Jet1 {
        let k = self.val.re.sqrt();
        Jet1 { val: C64::new(k, 0.0), grad: self.grad.iter().map(|g| g / (2.0 * k)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, VarTable};

    #[test]
    fn product_and_conj_rules_match_symbolic() {
        let vt = VarTable::new(&["z", "w"]).unwrap();
        let f = parse("z*w_ + i*w^2", &vt).unwrap();
        let g = parse("exp(2*z_) + w", &vt).unwrap();
        let p = [C64::new(0.3, -0.2), C64::new(-0.1, 0.4)];
        let jf = Jet1::of_expr(&f, &p).unwrap();
        let jg = Jet1::of_expr(&g, &p).unwrap();
        let prod = Jet1::of_expr(&f.mul(&g), &p).unwrap();
        let via = jf.mul(&jg);
        for k in 0..4 {
            assert!((prod.grad[k] - via.grad[k]).norm() < 1e-12);
        }
        let cj = Jet1::of_expr(&f.conj(), &p).unwrap();
        let via = jf.conj();
        for k in 0..4 {
            assert!((cj.grad[k] - via.grad[k]).norm() < 1e-12);
        }
    }
}
