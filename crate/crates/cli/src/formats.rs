//! JSON wire formats: characteristic-function trees, channel specs (full
//! form and presets), dilation files, and Fock-operator dumps. Matrices are
//! row-major nested arrays of doubles.

use bosonic_core::channels::{self, LinearBosonicChannel};
use bosonic_core::char_fn::{CharFn, Sampler};
use bosonic_core::dilation::{GaussianDilation, Provenance};
use bosonic_core::fock::FockOperator;
use bosonic_core::linalg::RMat;
use bosonic_core::phase_space::SymplecticCompletion;
use bosonic_core::Tolerances;
use serde::{Deserialize, Serialize};

pub type Matrix = Vec<Vec<f64>>;

pub fn matrix_to_rmat(m: &Matrix) -> Result<RMat, String> {
    let rows = m.len();
    if rows == 0 {
        return Ok(RMat::zeros(0, 0));
    }
    let cols = m[0].len();
    if m.iter().any(|r| r.len() != cols) {
        return Err("ragged matrix rows".into());
    }
    let mut out = RMat::zeros(rows, cols);
    for (i, row) in m.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

pub fn rmat_to_matrix(m: &RMat) -> Matrix {
    (0..m.rows)
        .map(|i| (0..m.cols).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Characteristic-function tree encoding.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CharFnJson {
    One,
    GaussianKernel {
        #[serde(rename = "M")]
        m: Matrix,
        b: Vec<f64>,
    },
    Cosine {
        s: Vec<f64>,
    },
    Mixture {
        weights: Vec<f64>,
        points: Vec<Vec<f64>>,
    },
    Product {
        factors: Vec<CharFnJson>,
    },
    Pullback {
        inner: Box<CharFnJson>,
        #[serde(rename = "L")]
        l: Matrix,
    },
}

impl CharFnJson {
    pub fn to_core(&self) -> Result<CharFn, String> {
        match self {
            CharFnJson::One => Ok(CharFn::One),
            CharFnJson::GaussianKernel { m, b } => {
                CharFn::gaussian(matrix_to_rmat(m)?, b.clone()).map_err(|e| e.to_string())
            }
            CharFnJson::Cosine { s } => CharFn::cosine(s.clone()).map_err(|e| e.to_string()),
            CharFnJson::Mixture { weights, points } => {
                CharFn::mixture(weights.clone(), points.clone()).map_err(|e| e.to_string())
            }
            CharFnJson::Product { factors } => {
                let children: Result<Vec<_>, _> = factors.iter().map(|f| f.to_core()).collect();
                Ok(CharFn::product(children?))
            }
            CharFnJson::Pullback { inner, l } => {
                Ok(CharFn::pullback(inner.to_core()?, matrix_to_rmat(l)?))
            }
        }
    }

    pub fn from_core(f: &CharFn) -> CharFnJson {
        match f {
            CharFn::One => CharFnJson::One,
            CharFn::GaussianKernel { m, b } => CharFnJson::GaussianKernel {
                m: rmat_to_matrix(m),
                b: b.clone(),
            },
            CharFn::Cosine { s } => CharFnJson::Cosine { s: s.clone() },
            CharFn::DisplacementMixture { weights, points } => CharFnJson::Mixture {
                weights: weights.clone(),
                points: points.clone(),
            },
            CharFn::Product(children) => CharFnJson::Product {
                factors: children.iter().map(CharFnJson::from_core).collect(),
            },
            CharFn::PullBack { inner, l } => CharFnJson::Pullback {
                inner: Box::new(CharFnJson::from_core(inner)),
                l: rmat_to_matrix(l),
            },
        }
    }
}

/// Channel specification: either a preset shorthand or the full (n, X, f)
/// form.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpecJson {
    Preset(PresetJson),
    Full {
        n: usize,
        #[serde(rename = "X")]
        x: Matrix,
        f: CharFnJson,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum PresetJson {
    Identity {
        #[serde(default = "one_mode")]
        n: usize,
    },
    BinaryDisplacement {
        s: Vec<f64>,
    },
    Amplifier {
        gain: f64,
    },
    Attenuator {
        theta: f64,
    },
    Bk {
        sigma: f64,
        #[serde(default = "one_mode")]
        n: usize,
    },
    Mixture {
        weights: Vec<f64>,
        points: Vec<Vec<f64>>,
    },
    Gaussian {
        #[serde(rename = "X")]
        x: Matrix,
        #[serde(rename = "N")]
        noise: Matrix,
        #[serde(default)]
        d: Vec<f64>,
    },
}

fn one_mode() -> usize {
    1
}

impl ChannelSpecJson {
    pub fn build(
        &self,
        sampler: &Sampler,
        tols: &Tolerances,
    ) -> Result<LinearBosonicChannel, String> {
        match self {
            ChannelSpecJson::Full { n, x, f } => {
                let x = matrix_to_rmat(x)?;
                if x.rows != 2 * n {
                    return Err(format!(
                        "X is {}x{} but n = {n} requires {}x{}",
                        x.rows,
                        x.cols,
                        2 * n,
                        2 * n
                    ));
                }
                let f = f.to_core()?;
                channels::make_channel(x, f, sampler, tols).map_err(|e| e.to_string())
            }
            ChannelSpecJson::Preset(preset) => match preset {
                PresetJson::Identity { n } => channels::make_channel(
                    RMat::identity(2 * n),
                    CharFn::One,
                    sampler,
                    tols,
                )
                .map_err(|e| e.to_string()),
                PresetJson::BinaryDisplacement { s } => {
                    channels::binary_displacement(s, sampler, tols).map_err(|e| e.to_string())
                }
                PresetJson::Amplifier { gain } => {
                    channels::amplifier(*gain, tols).map_err(|e| e.to_string())
                }
                PresetJson::Attenuator { theta } => {
                    channels::attenuator(*theta, tols).map_err(|e| e.to_string())
                }
                PresetJson::Bk { sigma, n } => {
                    channels::bk_noise_channel(*sigma, *n, tols).map_err(|e| e.to_string())
                }
                PresetJson::Mixture { weights, points } => {
                    channels::displacement_mixture_channel(
                        weights.clone(),
                        points.clone(),
                        sampler,
                        tols,
                    )
                    .map_err(|e| e.to_string())
                }
                PresetJson::Gaussian { x, noise, d } => {
                    let x = matrix_to_rmat(x)?;
                    let noise = matrix_to_rmat(noise)?;
                    let d = if d.is_empty() {
                        vec![0.0; x.rows]
                    } else {
                        d.clone()
                    };
                    channels::gaussian_channel(x, noise, d, tols).map_err(|e| e.to_string())
                }
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProvenanceJson {
    Exact,
    VarUnitary { epsilon: f64 },
    FixedUnitary { epsilon: f64 },
}

impl ProvenanceJson {
    pub fn from_core(p: &Provenance) -> Self {
        match p {
            Provenance::Exact => ProvenanceJson::Exact,
            Provenance::VarUnitary { epsilon } => ProvenanceJson::VarUnitary { epsilon: *epsilon },
            Provenance::FixedUnitary { epsilon } => {
                ProvenanceJson::FixedUnitary { epsilon: *epsilon }
            }
        }
    }

    pub fn to_core(&self) -> Provenance {
        match self {
            ProvenanceJson::Exact => Provenance::Exact,
            ProvenanceJson::VarUnitary { epsilon } => Provenance::VarUnitary { epsilon: *epsilon },
            ProvenanceJson::FixedUnitary { epsilon } => {
                Provenance::FixedUnitary { epsilon: *epsilon }
            }
        }
    }
}

/// Dilation file: unitary data plus the ancilla characteristic function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DilationJson {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "X")]
    pub x: Matrix,
    #[serde(rename = "Y")]
    pub y: Matrix,
    pub s: Vec<f64>,
    #[serde(rename = "S")]
    pub full_symplectic: Matrix,
    pub ancilla: CharFnJson,
    pub provenance: ProvenanceJson,
}

impl DilationJson {
    pub fn from_core(d: &GaussianDilation) -> Self {
        DilationJson {
            n: d.n,
            m: d.m,
            x: rmat_to_matrix(&d.x),
            y: rmat_to_matrix(&d.y),
            s: d.s.clone(),
            full_symplectic: rmat_to_matrix(&d.completion.s),
            ancilla: CharFnJson::from_core(&d.ancilla),
            provenance: ProvenanceJson::from_core(&d.provenance),
        }
    }

    pub fn to_core(&self) -> Result<GaussianDilation, String> {
        let x = matrix_to_rmat(&self.x)?;
        let y = matrix_to_rmat(&self.y)?;
        let s_mat = matrix_to_rmat(&self.full_symplectic)?;
        if x.rows != 2 * self.n || y.rows != 2 * self.m || y.cols != 2 * self.n {
            return Err("dilation block dimensions are inconsistent".into());
        }
        if s_mat.rows != 2 * (self.n + self.m) {
            return Err("S has the wrong dimension".into());
        }
        let mut first = RMat::zeros(2 * (self.n + self.m), 2 * self.n);
        for c in 0..2 * self.n {
            for r in 0..2 * self.n {
                first[(r, c)] = x[(r, c)];
            }
            for r in 0..2 * self.m {
                first[(2 * self.n + r, c)] = y[(r, c)];
            }
        }
        Ok(GaussianDilation {
            n: self.n,
            m: self.m,
            x,
            y,
            s: self.s.clone(),
            ancilla: self.ancilla.to_core()?,
            completion: SymplecticCompletion {
                s: s_mat,
                first_columns: first,
            },
            provenance: self.provenance.to_core(),
            fixed_data: None,
        })
    }
}

/// Fock operator dump used by `simulate --dump-state`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FockJson {
    pub n: usize,
    pub cutoff: usize,
    pub re: Matrix,
    pub im: Matrix,
}

impl FockJson {
    pub fn from_core(op: &FockOperator) -> Self {
        let dim = op.dim();
        let re = (0..dim)
            .map(|i| (0..dim).map(|j| op.matrix[(i, j)].re).collect())
            .collect();
        let im = (0..dim)
            .map(|i| (0..dim).map(|j| op.matrix[(i, j)].im).collect())
            .collect();
        FockJson {
            n: op.n,
            cutoff: op.cutoff,
            re,
            im,
        }
    }
}

/// Either input accepted by `simulate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SimulateInputJson {
    Dilation(DilationJson),
    Channel(ChannelSpecJson),
}
