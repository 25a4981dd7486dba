//! Connections and curvature in a frame.
//!
//! `∇_{e_i} e_j = Γ^k_{ij} e_k`; `R(e_i,e_j)e_k = R^l_{kij} e_l` with
//! `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_{[X,Y]}`; `Ric(X,Y) = tr(Z ↦ R(Z,X)Y)`.

use crate::frame::{Form, FrameError, FrameManifold, Tensor, Vector};
use crate::scalar::{rat, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    /// `gamma[i][j][k] = Γ^k_{ij}`.
    gamma: Vec<Vec<Vec<Scalar>>>,
    torsion: Option<Form>,
}

impl Connection {
    pub fn from_coefficients(gamma: Vec<Vec<Vec<Scalar>>>) -> Connection {
        Connection { gamma, torsion: None }
    }

    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.gamma[i][j][k]
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// Skew torsion 3-form, if the connection was built with one.
    pub fn torsion_form(&self) -> Option<&Form> {
        self.torsion.as_ref()
    }

    /// `∇_X Y`.
    pub fn covariant(&self, m: &FrameManifold, x: &Vector, y: &Vector) -> Vector {
        let n = self.dim();
        let mut out: Vec<Scalar> = (0..n).map(|k| m.directional(x, &y.get(k))).collect();
        for i in 0..n {
            let xi = x.get(i);
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                let yj = y.get(j);
                if yj.is_zero() {
                    continue;
                }
                let c = &xi * &yj;
                for (k, g) in self.gamma[i][j].iter().enumerate() {
                    if !g.is_zero() {
                        out[k] += &(&c * g);
                    }
                }
            }
        }
        Vector::new(out)
    }

    /// `(∇_{e_m} T)` for every frame direction, as a tensor with one extra
    /// covariant slot appended last.
    pub fn covariant_tensor(&self, m: &FrameManifold, t: &Tensor) -> Tensor {
        let n = self.dim();
        let mut out = Tensor::zeros(n, t.contra(), t.cov() + 1);
        for idx in out.indices() {
            let (base, dir) = idx.split_at(t.rank());
            let d = dir[0];
            let mut v = m.derive(d, t.get_ref(base));
            let mut j = base.to_vec();
            for slot in 0..t.rank() {
                for p in 0..n {
                    j[slot] = p;
                    let tv = t.get_ref(&j);
                    if tv.is_zero() {
                        continue;
                    }
                    if slot < t.contra() {
                        let g = &self.gamma[d][p][base[slot]];
                        if !g.is_zero() {
                            v += &(g * tv);
                        }
                    } else {
                        let g = &self.gamma[d][base[slot]][p];
                        if !g.is_zero() {
                            v -= &(g * tv);
                        }
                    }
                }
                j[slot] = base[slot];
            }
            out.set(&idx, v);
        }
        out
    }

    /// `(∇_{e_i} g)(e_j, e_k)` as a tensor `[j, k, i]`; zero for metric connections.
    pub fn metricity_residual(&self, m: &FrameManifold) -> Tensor {
        self.covariant_tensor(m, &m.metric_tensor())
    }

    /// `T^k_{ij}` of `T(X,Y) = ∇_XY − ∇_YX − [X,Y]`, indexed `[k, i, j]`.
    pub fn torsion_tensor(&self, m: &FrameManifold) -> Tensor {
        let n = self.dim();
        let mut t = Tensor::zeros(n, 1, 2);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = &(&self.gamma[i][j][k] - &self.gamma[j][i][k]) - m.structure(i, j, k);
                    t.set(&[k, i, j], v);
                }
            }
        }
        t
    }

    /// Torsion lowered in its vector slot: `g(T(e_i,e_j), e_k)`, indexed `[i, j, k]`.
    pub fn lowered_torsion(&self, m: &FrameManifold) -> Tensor {
        let n = self.dim();
        let t = self.torsion_tensor(m);
        let mut out = Tensor::zeros(n, 0, 3);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v: Scalar = (0..n).map(|l| t.get_ref(&[l, i, j]) * &m.metric()[l][k]).sum();
                    out.set(&[i, j, k], v);
                }
            }
        }
        out
    }
}

/// Levi-Civita connection from the Koszul formula.
pub fn levi_civita(m: &FrameManifold) -> Connection {
    let n = m.dim();
    let g = m.metric();
    let c = |i: usize, j: usize, l: usize| m.structure(i, j, l);
    // lowered[k][i][j] = 2 g(∇_{e_i} e_j, e_k)
    let mut gamma = vec![vec![vec![Scalar::zero(); n]; n]; n];
    let mut lowered = vec![vec![vec![Scalar::zero(); n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut v = &(&m.derive(i, &g[j][k]) + &m.derive(j, &g[i][k])) - &m.derive(k, &g[i][j]);
                for l in 0..n {
                    v += &(c(i, j, l) * &g[l][k]);
                    v -= &(c(i, k, l) * &g[l][j]);
                    v -= &(c(j, k, l) * &g[l][i]);
                }
                lowered[k][i][j] = v;
            }
        }
    }
    let inv = m.metric_inverse();
    let half = rat(1, 2);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v: Scalar = (0..n)
                    .filter(|&l| !inv[k][l].is_zero())
                    .map(|l| &inv[k][l] * &lowered[l][i][j])
                    .sum();
                gamma[i][j][k] = v.scale(&half);
            }
        }
    }
    Connection { gamma, torsion: None }
}

/// Metric connection `g(∇^H_X Y, Z) = g(∇_X Y, Z) + ½ H(X,Y,Z)`, whose
/// lowered torsion equals `H`.
pub fn with_skew_torsion(m: &FrameManifold, h: &Form) -> Result<Connection, FrameError> {
    if h.degree() != 3 {
        return Err(FrameError::NotAForm);
    }
    if h.dim() != m.dim() {
        return Err(FrameError::DimensionMismatch(h.dim(), m.dim()));
    }
    let n = m.dim();
    let mut lc = levi_civita(m);
    let inv = m.metric_inverse();
    let half = rat(1, 2);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                let v: Scalar = (0..n)
                    .filter(|&l| !inv[k][l].is_zero())
                    .map(|l| &inv[k][l] * &h.get(&[i, j, l]))
                    .sum();
                if !v.is_zero() {
                    lc.gamma[i][j][k] += &v.scale(&half);
                }
            }
        }
    }
    lc.torsion = Some(h.clone());
    Ok(lc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curvature {
    /// `R^l_{kij}`, indexed `[l, k, i, j]`.
    pub riemann: Tensor,
    /// `Ric_{jk}`, possibly nonsymmetric for connections with torsion.
    pub ricci: Tensor,
    pub scalar: Scalar,
}

impl Curvature {
    pub fn ricci_symmetric(&self) -> Tensor {
        self.ricci.add(&self.ricci.transpose()).scale_rational(&rat(1, 2))
    }

    pub fn ricci_antisymmetric(&self) -> Tensor {
        self.ricci.sub(&self.ricci.transpose()).scale_rational(&rat(1, 2))
    }

    /// `R^l_{kij} + R^l_{ijk} + R^l_{jki}` indexed `[l, k, i, j]`.
    pub fn first_bianchi_residual(&self) -> Tensor {
        let n = self.riemann.dim();
        let r = &self.riemann;
        let mut out = Tensor::zeros(n, 1, 3);
        for idx in out.indices() {
            let (l, k, i, j) = (idx[0], idx[1], idx[2], idx[3]);
            let v = &(r.get_ref(&[l, k, i, j]) + r.get_ref(&[l, i, j, k])) + r.get_ref(&[l, j, k, i]);
            out.set(&idx, v);
        }
        out
    }

    /// Cyclic sum `(∇_m R)^l_{kij}` over `(m, i, j)`, indexed `[l, k, i, j, m]`.
    pub fn second_bianchi_residual(&self, m: &FrameManifold, c: &Connection) -> Tensor {
        let d = c.covariant_tensor(m, &self.riemann);
        let n = m.dim();
        let mut out = Tensor::zeros(n, 1, 4);
        for idx in out.indices() {
            let (l, k, i, j, p) = (idx[0], idx[1], idx[2], idx[3], idx[4]);
            let v = &(d.get_ref(&[l, k, i, j, p]) + d.get_ref(&[l, k, j, p, i])) + d.get_ref(&[l, k, p, i, j]);
            out.set(&idx, v);
        }
        out
    }

    /// `R(e_i,e_j)` antisymmetry residual `R^l_{kij} + R^l_{kji}`.
    pub fn antisymmetry_residual(&self) -> Tensor {
        let n = self.riemann.dim();
        let mut out = Tensor::zeros(n, 1, 3);
        for idx in out.indices() {
            let (l, k, i, j) = (idx[0], idx[1], idx[2], idx[3]);
            out.set(&idx, self.riemann.get_ref(&[l, k, i, j]) + self.riemann.get_ref(&[l, k, j, i]));
        }
        out
    }
}

/// Riemann, Ricci and scalar curvature of `c`.
pub fn riemann(m: &FrameManifold, c: &Connection) -> Curvature {
    let n = m.dim();
    let gm = |i: usize, j: usize, k: usize| &c.gamma[i][j][k];
    let mut r = Tensor::zeros(n, 1, 3);
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    let mut v = &m.derive(i, gm(j, k, l)) - &m.derive(j, gm(i, k, l));
                    for p in 0..n {
                        let a = gm(j, k, p);
                        if !a.is_zero() {
                            v += &(a * gm(i, p, l));
                        }
                        let b = gm(i, k, p);
                        if !b.is_zero() {
                            v -= &(b * gm(j, p, l));
                        }
                        let s = m.structure(i, j, p);
                        if !s.is_zero() {
                            v -= &(s * gm(p, k, l));
                        }
                    }
                    r.set(&[l, k, j, i], -&v);
                    r.set(&[l, k, i, j], v);
                }
            }
        }
    }
    let mut ricci = Tensor::zeros(n, 0, 2);
    for j in 0..n {
        for k in 0..n {
            let v: Scalar = (0..n).map(|i| r.get(&[i, k, i, j])).sum();
            ricci.set(&[j, k], v);
        }
    }
    let inv = m.metric_inverse();
    let mut scalar = Scalar::zero();
    for j in 0..n {
        for k in 0..n {
            if !inv[j][k].is_zero() {
                scalar += &(&inv[j][k] * ricci.get_ref(&[j, k]));
            }
        }
    }
    Curvature { riemann: r, ricci, scalar }
}

/// Curvature of an arbitrary connection; Ricci is returned unsymmetrized.
pub fn ricci_of(m: &FrameManifold, c: &Connection) -> Curvature {
    riemann(m, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assume::Assumptions;
    use crate::frame::combinations;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn lam2() -> Scalar {
        Scalar::param("lambda").pow(2).unwrap()
    }

    fn su2() -> FrameManifold {
        let mut a = Assumptions::new();
        a.assume("lambda != 0").unwrap();
        FrameManifold::builder(&["e1", "e2", "e3"])
            .bracket(1, 2, vec![s(1), s(0), s(0)])
            .bracket(2, 0, vec![s(0), lam2(), s(0)])
            .bracket(0, 1, vec![s(0), s(0), lam2()])
            .assumptions(a)
            .build()
            .unwrap()
    }

    fn sl2_para() -> FrameManifold {
        let mut a = Assumptions::new();
        a.assume("lambda^2 >= 1").unwrap();
        FrameManifold::builder(&["e0", "e1", "e2"])
            .bracket(1, 2, vec![-&lam2(), s(0), s(0)])
            .bracket(1, 0, vec![s(0), s(0), -&lam2()])
            .bracket(2, 0, vec![s(0), s(1), s(0)])
            .diagonal_metric(&[-1, 1, 1])
            .assumptions(a)
            .build()
            .unwrap()
    }

    fn alpha_alpha(n: usize, i: usize) -> Tensor {
        let a = Form::basis(n, &[i]).to_tensor();
        a.outer(&a)
    }

    #[test]
    fn flat_abelian() {
        let m = FrameManifold::builder(&["a", "b", "c"]).build().unwrap();
        let c = levi_civita(&m);
        assert!((0..3).all(|i| (0..3).all(|j| (0..3).all(|k| c.gamma(i, j, k).is_zero()))));
        assert!(riemann(&m, &c).ricci.is_zero());
    }

    #[test]
    fn su2_ricci() {
        let m = su2();
        let curv = riemann(&m, &levi_civita(&m));
        // ½(2λ²−1) h + (1−λ²) e¹⊗e¹
        let a = (&lam2().scale(&rat(2, 1)) - &s(1)).scale(&rat(1, 2));
        let expected = m.metric_tensor().scale(&a).add(&alpha_alpha(3, 0).scale(&(&s(1) - &lam2())));
        assert_eq!(curv.ricci, expected);
    }

    #[test]
    fn para_defining_residuals() {
        let m = sl2_para();
        let c = levi_civita(&m);
        assert!(c.metricity_residual(&m).is_zero());
        assert!(c.torsion_tensor(&m).is_zero());
        let curv = riemann(&m, &c);
        assert!(curv.first_bianchi_residual().is_zero());
        assert!(curv.second_bianchi_residual(&m, &c).is_zero());
        assert!(curv.ricci_antisymmetric().is_zero());
        let expected_scalar: Scalar = (0..3)
            .map(|j| (0..3).map(|k| &m.metric_inverse()[j][k] * curv.ricci.get_ref(&[j, k])).sum::<Scalar>())
            .sum();
        assert_eq!(curv.scalar, expected_scalar);
    }

    #[test]
    fn skew_torsion_defining_property() {
        let m = su2();
        let h = Form::basis(3, &[0, 1, 2]).scale(&Scalar::param("lambda"));
        let c = with_skew_torsion(&m, &h).unwrap();
        assert!(c.metricity_residual(&m).is_zero());
        assert_eq!(c.lowered_torsion(&m), h.to_tensor());
        let zero = with_skew_torsion(&m, &Form::zero(3, 3)).unwrap();
        assert_eq!(riemann(&m, &zero).ricci, riemann(&m, &levi_civita(&m)).ricci);
        assert!(with_skew_torsion(&m, &Form::basis(3, &[0, 1])).is_err());
    }

    #[test]
    fn torsion_connection_antisymmetry() {
        let m = sl2_para();
        for idx in combinations(3, 3) {
            let h = Form::basis(3, &idx).scale(&s(3));
            let c = with_skew_torsion(&m, &h).unwrap();
            assert!(riemann(&m, &c).antisymmetry_residual().is_zero());
        }
    }
}
