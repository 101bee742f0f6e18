//! Boundary divisors on a surface: multiplicities, intersection matrix, and
//! the intersection numbers derived from them.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DisplayFromStr};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("syntax error in instance document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("intersection matrix is not symmetric at ({i}, {j}): {a} vs {b}")]
    AsymmetricMatrix { i: usize, j: usize, a: i64, b: i64 },
    #[error("multiplicity p[{index}] = {value} is not positive")]
    NonPositiveMultiplicity { index: usize, value: i64 },
}

/// On-disk form of an instance. Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub p: Vec<i64>,
    pub matrix: Vec<Vec<i64>>,
    #[serde(default)]
    pub assert_no_triple_points: bool,
    #[serde(default)]
    pub assert_ample: bool,
}

/// Divisors `D_1..D_r` at infinity with multiplicities `p_i` and the
/// symmetric matrix `M[i][j] = (D_i . D_j)`.
///
/// No three divisors meeting in a point, and ampleness of `D = sum p_i D_i`,
/// cannot be read off the matrix; they are carried as user assertions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceInstance {
    labels: Vec<String>,
    p: Vec<i64>,
    matrix: Vec<Vec<i64>>,
    assert_no_triple_points: bool,
    assert_ample: bool,
    warnings: Vec<String>,
}

impl SurfaceInstance {
    /// Validates and builds an instance. Default labels are `D1..Dr`.
    pub fn new(
        labels: Option<Vec<String>>,
        p: Vec<i64>,
        matrix: Vec<Vec<i64>>,
        assert_no_triple_points: bool,
        assert_ample: bool,
    ) -> Result<Self, SurfaceError> {
        let r = p.len();
        if r < 2 {
            return Err(SurfaceError::Shape(format!("need at least 2 divisors, got {r}")));
        }
        if matrix.len() != r || matrix.iter().any(|row| row.len() != r) {
            return Err(SurfaceError::Shape(format!("matrix must be {r}x{r} to match p")));
        }
        let labels = match labels {
            Some(l) if l.len() != r => {
                return Err(SurfaceError::Shape(format!("{} labels for {r} divisors", l.len())))
            }
            Some(l) => l,
            None => (1..=r).map(|i| format!("D{i}")).collect(),
        };
        if let Some((index, &value)) = p.iter().enumerate().find(|(_, &v)| v < 1) {
            return Err(SurfaceError::NonPositiveMultiplicity { index, value });
        }
        let mut warnings = Vec::new();
        for i in 0..r {
            for j in 0..r {
                if matrix[i][j] != matrix[j][i] {
                    return Err(SurfaceError::AsymmetricMatrix {
                        i,
                        j,
                        a: matrix[i][j],
                        b: matrix[j][i],
                    });
                }
                if i < j && matrix[i][j] < 0 {
                    warnings.push(format!(
                        "negative intersection ({}.{}) = {} between distinct divisors",
                        labels[i], labels[j], matrix[i][j]
                    ));
                }
            }
        }
        Ok(SurfaceInstance {
            labels,
            p,
            matrix,
            assert_no_triple_points,
            assert_ample,
            warnings,
        })
    }

    /// Instance with `p = 1` everywhere and both assertions set.
    pub fn asserted(labels: Vec<String>, matrix: Vec<Vec<i64>>) -> Result<Self, SurfaceError> {
        let r = matrix.len();
        Self::new(Some(labels), vec![1; r], matrix, true, true)
    }

    pub fn from_document(doc: InstanceDocument) -> Result<Self, SurfaceError> {
        Self::new(
            doc.labels,
            doc.p,
            doc.matrix,
            doc.assert_no_triple_points,
            doc.assert_ample,
        )
    }

    pub fn to_document(&self) -> InstanceDocument {
        InstanceDocument {
            labels: Some(self.labels.clone()),
            p: self.p.clone(),
            matrix: self.matrix.clone(),
            assert_no_triple_points: self.assert_no_triple_points,
            assert_ample: self.assert_ample,
        }
    }

    pub fn r(&self) -> usize {
        self.p.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn p(&self) -> &[i64] {
        &self.p
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.matrix[i][j]
    }

    pub fn assert_no_triple_points(&self) -> bool {
        self.assert_no_triple_points
    }

    pub fn assert_ample(&self) -> bool {
        self.assert_ample
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Same divisors with new multiplicities.
    pub fn with_p(&self, p: Vec<i64>) -> Result<Self, SurfaceError> {
        Self::new(
            Some(self.labels.clone()),
            p,
            self.matrix.clone(),
            self.assert_no_triple_points,
            self.assert_ample,
        )
    }

    /// Renumbers divisors so that new index `k` is old index `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let r = self.r();
        assert_eq!(perm.len(), r);
        let matrix = (0..r)
            .map(|i| (0..r).map(|j| self.matrix[perm[i]][perm[j]]).collect())
            .collect();
        Self::new(
            Some(perm.iter().map(|&k| self.labels[k].clone()).collect()),
            perm.iter().map(|&k| self.p[k]).collect(),
            matrix,
            self.assert_no_triple_points,
            self.assert_ample,
        )
        .expect("permutation preserves validity")
    }

    /// Equality up to labels and assertion flags.
    pub fn same_data(&self, other: &Self) -> bool {
        self.p == other.p && self.matrix == other.matrix
    }
}

/// Parses a JSON instance document.
pub fn parse_instance(text: &str) -> Result<SurfaceInstance, SurfaceError> {
    let doc: InstanceDocument = serde_json::from_str(text)?;
    SurfaceInstance::from_document(doc)
}

/// `(D.D_i)`, `D^2` and `D_i^2` for `D = sum p_i D_i`.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedIntersections {
    #[serde_as(as = "Vec<DisplayFromStr>")]
    pub d_dot: Vec<BigInt>,
    #[serde_as(as = "DisplayFromStr")]
    pub d_sq: BigInt,
    #[serde_as(as = "Vec<DisplayFromStr>")]
    pub self_int: Vec<BigInt>,
}

pub fn derive(instance: &SurfaceInstance) -> DerivedIntersections {
    let r = instance.r();
    let p: Vec<BigInt> = instance.p.iter().map(|&x| BigInt::from(x)).collect();
    let d_dot: Vec<BigInt> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| &p[j] * instance.matrix[i][j])
                .fold(BigInt::zero(), |acc, t| acc + t)
        })
        .collect();
    let d_sq = (0..r)
        .flat_map(|i| (0..r).map(move |j| (i, j)))
        .map(|(i, j)| &p[i] * &p[j] * instance.matrix[i][j])
        .fold(BigInt::zero(), |acc, t| acc + t);
    let self_int = (0..r).map(|i| BigInt::from(instance.matrix[i][i])).collect();
    DerivedIntersections {
        d_dot,
        d_sq,
        self_int,
    }
}

/// One row of the Hodge-index screen `D^2 D_i^2 <= (D.D_i)^2`.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeVerdict {
    pub index: usize,
    #[serde_as(as = "DisplayFromStr")]
    pub lhs: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub rhs: BigInt,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeReport {
    pub verdicts: Vec<HodgeVerdict>,
    /// False when some divisor violates the inequality; such data cannot
    /// come from an ample `D` on a smooth surface.
    pub consistent: bool,
}

impl HodgeReport {
    pub fn first_violation(&self) -> Option<&HodgeVerdict> {
        self.verdicts.iter().find(|v| !v.ok)
    }
}

pub fn hodge_check(instance: &SurfaceInstance, derived: &DerivedIntersections) -> HodgeReport {
    let verdicts: Vec<HodgeVerdict> = (0..instance.r())
        .map(|i| {
            let lhs = &derived.d_sq * &derived.self_int[i];
            let rhs = &derived.d_dot[i] * &derived.d_dot[i];
            let ok = lhs <= rhs;
            HodgeVerdict { index: i, lhs, rhs, ok }
        })
        .collect();
    let consistent = verdicts.iter().all(|v| v.ok);
    HodgeReport {
        verdicts,
        consistent,
    }
}
