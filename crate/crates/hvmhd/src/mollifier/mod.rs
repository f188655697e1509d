//! Spatial mollification `v ↦ v ∗ θ^ε` as a Fourier multiplier, velocity
//! jitter for initial data, and norms of the scaled bump.
//!
//! `θ^ε(x) = ε⁻³θ₀(x/ε)` with `θ₀` supported in the ball of radius 1/2, so the
//! periodized kernel has Fourier multiplier `θ̂^ε(k) = Θ(ε|k|)`, where `Θ` is the
//! radial transform of `θ₀`. The value `ε = 0` means no mollification.

pub mod bump;
mod prepare;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

pub use prepare::{prepare_initial_f, PreparedEnsemble};

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::spectral::{Grid, ScalarField, VectorField};

type Table = Arc<Vec<f64>>;

/// Mollification parameter plus a per-grid cache of multiplier values.
#[derive(Clone, Debug)]
pub struct MollifierSpec {
    epsilon: f64,
    cache: Arc<Mutex<HashMap<usize, Table>>>,
}

impl PartialEq for MollifierSpec {
    fn eq(&self, other: &Self) -> bool {
        self.epsilon == other.epsilon
    }
}

impl MollifierSpec {
    /// `ε = 0` disables mollification; otherwise `0 < ε < 2π` keeps the
    /// kernel support inside one period.
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::param("epsilon", "must be nonnegative"));
        }
        if epsilon >= 2.0 * PI {
            return Err(Error::param("epsilon", "must be below 2π"));
        }
        Ok(MollifierSpec {
            epsilon,
            cache: Arc::new(Mutex::new(HashMap::new())),
        })
    }

    pub fn identity() -> Self {
        Self::new(0.0).expect("zero is valid")
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn is_identity(&self) -> bool {
        self.epsilon == 0.0
    }

    /// Velocity cutoff `1/ε` for initial data (infinite when `ε = 0`).
    pub fn velocity_cutoff(&self) -> f64 {
        if self.is_identity() {
            f64::INFINITY
        } else {
            1.0 / self.epsilon
        }
    }

    /// `θ̂^ε(k)` for any wavevector.
    pub fn multiplier(&self, k: [i64; 3]) -> f64 {
        if self.is_identity() {
            return 1.0;
        }
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        bump::transform(self.epsilon * k2.sqrt())
    }

    /// Multiplier values on `grid`, indexed by `|k|²`.
    fn table(&self, grid: Grid) -> Table {
        let n = grid.n();
        let mut cache = self.cache.lock().expect("mollifier cache poisoned");
        cache
            .entry(n)
            .or_insert_with(|| {
                let h = (n / 2) as f64;
                let max_k2 = (3.0 * h * h) as usize;
                let mut present = vec![false; max_k2 + 1];
                let hn = n as i64 / 2;
                for a in 0..=hn {
                    for b in a..=hn {
                        for c in b..=hn {
                            present[(a * a + b * b + c * c) as usize] = true;
                        }
                    }
                }
                let eps = self.epsilon;
                Arc::new(
                    present
                        .iter()
                        .enumerate()
                        .map(|(k2, &p)| if p { bump::transform(eps * (k2 as f64).sqrt()) } else { 0.0 })
                        .collect(),
                )
            })
            .clone()
    }

    pub fn mollify_scalar(&self, f: &ScalarField) -> ScalarField {
        let mut out = f.clone();
        if self.is_identity() {
            return out;
        }
        let table = self.table(f.grid());
        out.apply_multiplier(|k| {
            let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as usize;
            num_complex::Complex64::new(table[k2], 0.0)
        });
        out
    }

    /// `v^⟨ε⟩`; the divergence-free flag is kept.
    pub fn mollify(&self, v: &VectorField) -> VectorField {
        let mut out = v.clone();
        if self.is_identity() {
            return out;
        }
        let table = self.table(v.grid());
        out.apply_scalar_multiplier(|k| table[(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as usize]);
        out
    }
}

/// Vector field mollification.
pub fn mollify_x(v: &VectorField, spec: &MollifierSpec) -> VectorField {
    spec.mollify(v)
}

/// `C_θ = ∫|x|²θ₀ dx`.
pub fn theta_second_moment() -> f64 {
    bump::second_moment()
}

/// `‖D^m θ^ε‖_{L^{r'}}` with `1/r + 1/r' = 1`, `r ∈ [1, ∞]`.
///
/// The derivative tensor is measured in the Frobenius norm. For `ε = 0` the
/// kernel is a delta, so only `(r, m) = (∞, 0)` is finite.
///
/// # Panics
/// If `r < 1` or `r` is NaN.
pub fn mollifier_norm_constant(spec: &MollifierSpec, r: f64, m: usize) -> f64 {
    assert!(r >= 1.0, "exponent r must lie in [1, ∞]");
    let eps = spec.epsilon();
    let dual = if r.is_infinite() {
        1.0
    } else if r == 1.0 {
        f64::INFINITY
    } else {
        r / (r - 1.0)
    };
    if eps == 0.0 {
        return if m == 0 && dual == 1.0 { 1.0 } else { f64::INFINITY };
    }
    let g = |rho: f64| bump::derivative_norm(m, rho);
    if dual.is_infinite() {
        let s = sup_on_support(&g);
        s * eps.powi(-3 - m as i32)
    } else {
        let base = 4.0 * PI * integrate(|rho| rho * rho * g(rho).powf(dual), 0.0, bump::SUPPORT, 1e-16);
        base.powf(1.0 / dual) * eps.powf(-3.0 - m as f64 + 3.0 / dual)
    }
}

/// Maximum of a continuous function on `[0, 1/2]` by scan then golden-section refinement.
fn sup_on_support(g: &dyn Fn(f64) -> f64) -> f64 {
    const SCAN: usize = 2000;
    let h = bump::SUPPORT / SCAN as f64;
    let (mut best_i, mut best) = (0, g(0.0));
    for i in 1..=SCAN {
        let val = g(i as f64 * h);
        if val > best {
            best = val;
            best_i = i;
        }
    }
    let (mut a, mut b) = ((best_i as f64 - 1.0).max(0.0) * h, (best_i as f64 + 1.0).min(SCAN as f64) * h);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if g(c) >= g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    best.max(g(0.5 * (a + b)))
}
