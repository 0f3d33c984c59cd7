//! Completely positive maps between concretely represented algebras.

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::numeric::{fro, identity, CMatrix, Tolerance};

#[derive(Debug, Clone)]
pub struct CPMap {
    source: Algebra,
    target: Algebra,
    /// Images of the source basis.
    images: Vec<CMatrix>,
    kraus: Option<Vec<CMatrix>>,
    min_eigenvalue: f64,
}

impl CPMap {
    /// `T(a) = Σ K a K*` with each `K` of shape `dim G_target × dim G_source`.
    pub fn from_kraus(
        source: &Algebra,
        target: &Algebra,
        kraus: Vec<CMatrix>,
        tol: &Tolerance,
    ) -> Result<CPMap> {
        let shape = (target.rep_dim(), source.rep_dim());
        if let Some(k) = kraus.iter().find(|k| k.shape() != shape) {
            return Err(Error::Shape(format!(
                "Kraus operator is {}x{}, expected {}x{}",
                k.nrows(),
                k.ncols(),
                shape.0,
                shape.1
            )));
        }
        let images = source.span().map(|a| {
            let mut out = CMatrix::zeros(shape.0, shape.0);
            for k in &kraus {
                out += k * a * k.adjoint();
            }
            out
        });
        let mut map = CPMap::from_images(source, target, images, tol)?;
        map.kraus = Some(kraus);
        Ok(map)
    }

    /// Map given by its images on the source basis; complete positivity is
    /// certified through the GNS Gram kernel.
    pub fn from_action(
        source: &Algebra,
        target: &Algebra,
        images: Vec<CMatrix>,
        tol: &Tolerance,
    ) -> Result<CPMap> {
        if images.len() != source.dim() {
            return Err(Error::Shape(format!(
                "{} images for a source of dimension {}",
                images.len(),
                source.dim()
            )));
        }
        CPMap::from_images(source, target, images, tol)
    }

    fn from_images(
        source: &Algebra,
        target: &Algebra,
        images: Vec<CMatrix>,
        tol: &Tolerance,
    ) -> Result<CPMap> {
        let d = target.rep_dim();
        let mut worst = 0.0f64;
        for img in &images {
            if img.shape() != (d, d) {
                return Err(Error::Shape(format!(
                    "image is {}x{}, target acts on dimension {d}",
                    img.nrows(),
                    img.ncols()
                )));
            }
            worst = worst.max(target.span().residual(img));
        }
        if !tol.accepts(worst, 1.0) {
            return Err(Error::Invalid(format!(
                "map leaves the target algebra (residual {worst:.3e})"
            )));
        }
        let mut map = CPMap {
            source: source.clone(),
            target: target.clone(),
            images,
            kraus: None,
            min_eigenvalue: 0.0,
        };
        let gram = map.gram_kernel();
        let q = crate::numeric::gram_quotient(&gram, tol).map_err(|e| match e {
            Error::NegativeEigenvalue { value } => Error::NotCompletelyPositive {
                min_eigenvalue: value,
            },
            other => other,
        })?;
        map.min_eigenvalue = q.min_eigenvalue;
        Ok(map)
    }

    pub fn identity(algebra: &Algebra) -> CPMap {
        CPMap {
            source: algebra.clone(),
            target: algebra.clone(),
            images: algebra.basis(),
            kraus: Some(vec![identity(algebra.rep_dim())]),
            min_eigenvalue: 0.0,
        }
    }

    pub fn source(&self) -> &Algebra {
        &self.source
    }

    pub fn target(&self) -> &Algebra {
        &self.target
    }

    pub fn images(&self) -> &[CMatrix] {
        &self.images
    }

    pub fn kraus(&self) -> Option<&[CMatrix]> {
        self.kraus.as_deref()
    }

    /// Most negative eigenvalue of the Gram kernel seen during certification.
    pub fn min_gram_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn apply(&self, a: &CMatrix) -> CMatrix {
        if let Some(kraus) = &self.kraus {
            let mut out = CMatrix::zeros(self.target.rep_dim(), self.target.rep_dim());
            for k in kraus {
                out += k * a * k.adjoint();
            }
            return out;
        }
        let c = self.source.span().coefficients(a);
        let mut out = CMatrix::zeros(self.target.rep_dim(), self.target.rep_dim());
        for (ci, img) in c.iter().zip(&self.images) {
            if ci.norm() > 0.0 {
                out += img * *ci;
            }
        }
        out
    }

    /// Gram kernel `K[(i,g),(j,h)] = ⟨e_g, T(a_i* a_j) e_h⟩` on the source
    /// basis tensored with the target space; it is PSD iff `T` is CP.
    pub fn gram_kernel(&self) -> CMatrix {
        let basis = self.source.basis();
        let gb = self.target.rep_dim();
        let n = basis.len();
        let mut gram = CMatrix::zeros(n * gb, n * gb);
        for i in 0..n {
            for j in i..n {
                let t = self.apply(&(basis[i].adjoint() * &basis[j]));
                gram.view_mut((i * gb, j * gb), (gb, gb)).copy_from(&t);
                if i != j {
                    gram.view_mut((j * gb, i * gb), (gb, gb))
                        .copy_from(&t.adjoint());
                }
            }
        }
        gram
    }

    pub fn unital_residual(&self) -> f64 {
        fro(&(self.apply(&self.source.unit()) - self.target.unit()))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &CPMap, tol: &Tolerance) -> Result<CPMap> {
        self.target
            .ensure_same(&next.source, tol, "composed maps do not share an algebra")?;
        let images = self.images.iter().map(|m| next.apply(m)).collect();
        let kraus = match (&self.kraus, &next.kraus) {
            (Some(a), Some(b)) => Some(
                b.iter()
                    .flat_map(|kb| a.iter().map(move |ka| kb * ka))
                    .collect(),
            ),
            _ => None,
        };
        Ok(CPMap {
            source: self.source.clone(),
            target: next.target.clone(),
            images,
            kraus,
            min_eigenvalue: self.min_eigenvalue.min(next.min_eigenvalue),
        })
    }

    /// `n`-fold composite of an endomap; `n = 0` is the identity.
    pub fn power(&self, n: usize, tol: &Tolerance) -> Result<CPMap> {
        let mut out = CPMap::identity(&self.source);
        for _ in 0..n {
            out = out.then(self, tol)?;
        }
        Ok(out)
    }

    /// Largest `‖T(a) − S(a)‖_F` over the source basis.
    pub fn distance(&self, other: &CPMap) -> f64 {
        self.source
            .basis()
            .iter()
            .map(|a| fro(&(self.apply(a) - other.apply(a))))
            .fold(0.0, f64::max)
    }
}

/// `b ↦ (1 − p) b + p tr(b)/n · 1` on `M_n`.
pub fn depolarizing(n: usize, p: f64, tol: &Tolerance) -> Result<CPMap> {
    let m = Algebra::full(n)?;
    let images = m.span().map(|b| {
        b * crate::numeric::real(1.0 - p)
            + identity(n) * (b.trace() * crate::numeric::real(p / n as f64))
    });
    CPMap::from_action(&m, &m, images, tol)
}
