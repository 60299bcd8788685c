//! Linear maps between operator spaces in Choi form: Hermiticity/positivity
//! checks, Kraus extraction, Jordan splitting, and statistical decompositions
//! of Hermiticity-preserving (HP) maps into quantum instruments.
//!
//! Convention: the Choi matrix of `L` is `sum_ij L(|i><j|) (x) |i><j|`, output
//! factor first, so its side is `dim_out * dim_in`. Partial traces over the
//! output factor therefore use [`Subsystem::First`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, Subsystem};

/// Linear map `L(H_in) -> L(H_out)` stored as its Choi matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    dim_in: usize,
    dim_out: usize,
    choi: ComplexMatrix,
}

impl LinearMap {
    pub fn new(dim_in: usize, dim_out: usize, choi: ComplexMatrix) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidInput("map dimensions must be >= 1".into()));
        }
        let side = dim_out * dim_in;
        if choi.rows() != side || choi.cols() != side {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix is {}x{}, expected side {}",
                choi.rows(),
                choi.cols(),
                side
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            choi,
        })
    }

    /// The identity channel on a `dim`-dimensional system.
    pub fn identity(dim: usize) -> Self {
        Self::from_kraus(dim, dim, &[ComplexMatrix::identity(dim)]).expect("identity Kraus")
    }

    pub fn zero(dim_in: usize, dim_out: usize) -> Self {
        Self::new(
            dim_in,
            dim_out,
            ComplexMatrix::zeros(dim_out * dim_in, dim_out * dim_in),
        )
        .expect("zero Choi")
    }

    /// Assembles the map from Kraus operators: `choi = sum_k vec(K_k) vec(K_k)^dag`.
    pub fn from_kraus(dim_in: usize, dim_out: usize, operators: &[ComplexMatrix]) -> Result<Self> {
        let side = dim_out * dim_in;
        let mut choi = ComplexMatrix::zeros(side, side);
        for k in operators {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.rows(),
                    k.cols(),
                    dim_out,
                    dim_in
                )));
            }
            let v = k.entries();
            for p in 0..side {
                for q in 0..side {
                    let cur = choi.get(p, q);
                    choi.set(p, q, cur + v[p] * v[q].conj());
                }
            }
        }
        Self::new(dim_in, dim_out, choi)
    }

    /// Assembles the map from its images on the matrix units, ordered as
    /// `images[i * dim_in + j] = L(|i><j|)`.
    pub fn from_action(dim_in: usize, dim_out: usize, images: &[ComplexMatrix]) -> Result<Self> {
        if images.len() != dim_in * dim_in {
            return Err(Error::DimensionMismatch(format!(
                "expected {} basis images, got {}",
                dim_in * dim_in,
                images.len()
            )));
        }
        let side = dim_out * dim_in;
        let mut choi = ComplexMatrix::zeros(side, side);
        for i in 0..dim_in {
            for j in 0..dim_in {
                let img = &images[i * dim_in + j];
                if img.rows() != dim_out || img.cols() != dim_out {
                    return Err(Error::DimensionMismatch(format!(
                        "basis image is {}x{}, expected {}x{}",
                        img.rows(),
                        img.cols(),
                        dim_out,
                        dim_out
                    )));
                }
                for a in 0..dim_out {
                    for b in 0..dim_out {
                        choi.set(a * dim_in + i, b * dim_in + j, img.get(a, b));
                    }
                }
            }
        }
        Self::new(dim_in, dim_out, choi)
    }

    #[inline]
    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    #[inline]
    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// Applies the map: `L(X) = Tr_in[choi * (1_out (x) X^T)]`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim_in || x.cols() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "input is {}x{}, expected {0}x{0} with side {}",
                x.rows(),
                x.cols(),
                self.dim_in
            )));
        }
        let lifted = ComplexMatrix::identity(self.dim_out).kron(&x.transpose());
        (&self.choi * &lifted).partial_trace((self.dim_out, self.dim_in), Subsystem::Second)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.choi.hermiticity_residual()
    }

    /// Hermiticity-preserving iff the Choi matrix is Hermitian.
    pub fn is_hp(&self) -> bool {
        self.choi.is_hermitian(1e-9)
    }

    /// Operator `D` with `Tr[L(rho)] = Tr[D rho]`: the transposed partial
    /// trace of the Choi matrix over the output factor.
    pub fn trace_effect(&self) -> ComplexMatrix {
        self.choi
            .partial_trace((self.dim_out, self.dim_in), Subsystem::First)
            .expect("Choi side is dim_out * dim_in")
            .transpose()
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_effect()
            .max_diff(&ComplexMatrix::identity(self.dim_in))
            <= tol
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            choi: self.choi.scale(Complex64::new(factor, 0.0)),
        }
    }

    /// Smallest Choi eigenvalue; requires an HP map.
    pub fn min_choi_eigenvalue(&self) -> Result<f64> {
        let eig = eig_hermitian(&self.choi)?;
        Ok(eig.values[0])
    }

    /// Kraus operators from the Choi spectral decomposition,
    /// `K_k = sqrt(mu_k) unvec(v_k)`, dropping eigenvalues below
    /// `1e-12 * mu_max`. Requires a positive semidefinite Choi matrix.
    pub fn kraus(&self) -> Result<KrausSet> {
        if self.choi.hermiticity_residual() > 1e-9 * self.choi.norm_max().max(1.0) {
            return Err(Error::InvalidInput("Choi matrix is not Hermitian".into()));
        }
        let eig = eig_hermitian(&self.choi.hermitian_part())?;
        let max = eig.values.last().copied().unwrap_or(0.0).max(0.0);
        if eig.values[0] < -1e-10 * max.max(1.0) {
            return Err(Error::InvalidInput(format!(
                "Choi matrix is not positive semidefinite: min eigenvalue {:.3e}",
                eig.values[0]
            )));
        }
        let cutoff = 1e-12 * max;
        let mut operators = Vec::new();
        for (k, &mu) in eig.values.iter().enumerate() {
            if mu <= cutoff {
                continue;
            }
            let v = eig.vectors.column(k);
            let scaled: Vec<Complex64> = v.iter().map(|z| z * mu.sqrt()).collect();
            operators.push(ComplexMatrix::from_vec(self.dim_out, self.dim_in, scaled)?);
        }
        KrausSet::new(self.dim_in, self.dim_out, operators)
    }

    /// Splits an HP map into completely positive parts with orthogonal Choi
    /// supports, `choi(L) = choi(plus) - choi(minus)`. Eigenvalues within
    /// `1e-12 * |mu|_max` of zero belong to neither part.
    pub fn jordan_parts(&self) -> Result<(LinearMap, LinearMap)> {
        if !self.is_hp() {
            return Err(Error::InvalidInput(format!(
                "map is not Hermiticity-preserving: residual {:.3e}",
                self.hermiticity_residual()
            )));
        }
        let eig = eig_hermitian(&self.choi.hermitian_part())?;
        Ok(jordan_parts_from_eig(&eig, self.dim_in, self.dim_out))
    }

    /// Statistical decomposition `L = sum_i lambda_i E_i` with CP parts whose
    /// sum is trace-preserving.
    ///
    /// CP trace-preserving inputs come back as the single-part decomposition
    /// `{(1, L)}` with cost exactly 1. Otherwise the Jordan parts are scaled
    /// by `gamma = lambda_max(D_plus + D_minus)` (the `D`s being the parts'
    /// trace effects) and carry coefficients `+gamma` / `-gamma`; any trace
    /// deficit is absorbed by a zero-coefficient completion part that maps
    /// into the maximally mixed state. Zero maps yield an empty decomposition.
    pub fn statistical_decomposition(&self) -> Result<StatisticalDecomposition> {
        if !self.is_hp() {
            return Err(Error::InvalidInput(format!(
                "map is not Hermiticity-preserving: residual {:.3e}",
                self.hermiticity_residual()
            )));
        }
        let eig = eig_hermitian(&self.choi.hermitian_part())?;
        let max_abs = eig.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        if max_abs <= 1e-300 {
            return StatisticalDecomposition::new(Vec::new(), Vec::new());
        }
        let cutoff = 1e-12 * max_abs;
        let has_negative = eig.values[0] < -cutoff;
        if !has_negative && self.is_trace_preserving(1e-9) {
            return StatisticalDecomposition::new(vec![1.0], vec![self.clone()]);
        }

        let (plus, minus) = jordan_parts_from_eig(&eig, self.dim_in, self.dim_out);
        let effect_sum =
            &plus.trace_effect().hermitian_part() + &minus.trace_effect().hermitian_part();
        let effect_eig = eig_hermitian(&effect_sum)?;
        let gamma = effect_eig.values.last().copied().unwrap_or(0.0);
        if gamma <= 1e-12 {
            return StatisticalDecomposition::new(Vec::new(), Vec::new());
        }

        let mut coefficients = Vec::new();
        let mut parts = Vec::new();
        if plus.choi.norm_max() > cutoff {
            coefficients.push(gamma);
            parts.push(plus.scale(1.0 / gamma));
        }
        if minus.choi.norm_max() > cutoff {
            coefficients.push(-gamma);
            parts.push(minus.scale(1.0 / gamma));
        }

        // completion part: deficit map rho -> Tr[rho (1 - D/gamma)] * (1/d_out)
        let deficit = clip_to_psd(
            &(&ComplexMatrix::identity(self.dim_in)
                - &effect_sum.scale(Complex64::new(1.0 / gamma, 0.0))),
        )?;
        if deficit.norm_max() > 1e-12 {
            let mixed = ComplexMatrix::identity(self.dim_out)
                .scale(Complex64::new(1.0 / self.dim_out as f64, 0.0));
            let choi0 = mixed.kron(&deficit.transpose());
            coefficients.push(0.0);
            parts.push(LinearMap::new(self.dim_in, self.dim_out, choi0)?);
        }
        StatisticalDecomposition::new(coefficients, parts)
    }
}

fn jordan_parts_from_eig(
    eig: &crate::linalg::HermitianEigen,
    dim_in: usize,
    dim_out: usize,
) -> (LinearMap, LinearMap) {
    let max_abs = eig.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let cutoff = 1e-12 * max_abs;
    let pos: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k] > cutoff)
        .collect();
    let neg: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k] < -cutoff)
        .collect();
    let plus = eig.reconstruct_from(&pos);
    let minus = eig.reconstruct_from(&neg).scale(Complex64::new(-1.0, 0.0));
    (
        LinearMap::new(dim_in, dim_out, plus).expect("Choi side preserved"),
        LinearMap::new(dim_in, dim_out, minus).expect("Choi side preserved"),
    )
}

/// Zeroes out negative eigenvalues at noise level; errors below -1e-10 relative.
fn clip_to_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    let max = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    if eig.values[0] < -1e-10 * max.max(1.0) {
        return Err(Error::NumericalFailure(format!(
            "matrix expected PSD has eigenvalue {:.3e}",
            eig.values[0]
        )));
    }
    let keep: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k] > 0.0)
        .collect();
    Ok(eig.reconstruct_from(&keep))
}

/// Kraus operators of a completely positive map.
#[derive(Clone, Debug)]
pub struct KrausSet {
    dim_in: usize,
    dim_out: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(dim_in: usize, dim_out: usize, operators: Vec<ComplexMatrix>) -> Result<Self> {
        for k in &operators {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.rows(),
                    k.cols(),
                    dim_out,
                    dim_in
                )));
            }
        }
        Ok(Self {
            dim_in,
            dim_out,
            operators,
        })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Direct Kraus action `sum_k K_k X K_k^dag`; the independent route used
    /// to cross-check Choi-based application.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim_in || x.cols() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "input is {}x{}, expected side {}",
                x.rows(),
                x.cols(),
                self.dim_in
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.operators {
            out = &out + &(&(k * x) * &k.adjoint());
        }
        Ok(out)
    }
}

/// Weighted instrument `{(lambda_i, E_i)}` representing an HP map as
/// `sum_i lambda_i E_i` with CP parts and a trace-preserving part sum.
#[derive(Clone, Debug)]
pub struct StatisticalDecomposition {
    coefficients: Vec<f64>,
    parts: Vec<LinearMap>,
    l1_cost: f64,
}

impl StatisticalDecomposition {
    pub fn new(coefficients: Vec<f64>, parts: Vec<LinearMap>) -> Result<Self> {
        if coefficients.len() != parts.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} parts",
                coefficients.len(),
                parts.len()
            )));
        }
        if let Some(first) = parts.first() {
            for p in &parts {
                if p.dim_in() != first.dim_in() || p.dim_out() != first.dim_out() {
                    return Err(Error::DimensionMismatch(
                        "decomposition parts have mixed dimensions".into(),
                    ));
                }
            }
        }
        let l1_cost = coefficients.iter().map(|c| c.abs()).sum();
        Ok(Self {
            coefficients,
            parts,
            l1_cost,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn parts(&self) -> &[LinearMap] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Sampling-overhead proxy `sum_i |lambda_i|`.
    pub fn l1_cost(&self) -> f64 {
        self.l1_cost
    }

    pub fn max_coefficient(&self) -> f64 {
        self.coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn dim_in(&self) -> Option<usize> {
        self.parts.first().map(LinearMap::dim_in)
    }

    pub fn dim_out(&self) -> Option<usize> {
        self.parts.first().map(LinearMap::dim_out)
    }

    /// `sum_i lambda_i E_i`; the round-trip oracle for the decomposition.
    pub fn reconstruct(&self) -> Result<LinearMap> {
        let first = self
            .parts
            .first()
            .ok_or_else(|| Error::InvalidInput("empty decomposition".into()))?;
        let side = first.dim_out() * first.dim_in();
        let mut choi = ComplexMatrix::zeros(side, side);
        for (coeff, part) in self.coefficients.iter().zip(&self.parts) {
            choi = &choi + &part.choi().scale(Complex64::new(*coeff, 0.0));
        }
        LinearMap::new(first.dim_in(), first.dim_out(), choi)
    }

    /// Unweighted part sum `sum_i E_i`; trace-preserving for a valid instrument.
    pub fn part_sum(&self) -> Result<LinearMap> {
        let first = self
            .parts
            .first()
            .ok_or_else(|| Error::InvalidInput("empty decomposition".into()))?;
        let side = first.dim_out() * first.dim_in();
        let mut choi = ComplexMatrix::zeros(side, side);
        for part in &self.parts {
            choi = &choi + part.choi();
        }
        LinearMap::new(first.dim_in(), first.dim_out(), choi)
    }

    /// Residuals against the decomposition contract and the original map.
    pub fn residuals(&self, original: &LinearMap) -> Result<DecompositionResiduals> {
        let reconstruction_error = self.reconstruct()?.choi().max_diff(original.choi());
        let tp_error = self
            .part_sum()?
            .trace_effect()
            .max_diff(&ComplexMatrix::identity(original.dim_in()));
        let mut cp_min_eigenvalues = Vec::with_capacity(self.parts.len());
        for part in &self.parts {
            cp_min_eigenvalues.push(part.min_choi_eigenvalue()?);
        }
        Ok(DecompositionResiduals {
            reconstruction_error,
            tp_error,
            cp_min_eigenvalues,
        })
    }
}

/// Verification numbers for a [`StatisticalDecomposition`].
#[derive(Clone, Debug, serde::Serialize)]
pub struct DecompositionResiduals {
    pub reconstruction_error: f64,
    pub tp_error: f64,
    pub cp_min_eigenvalues: Vec<f64>,
}

/// Checks that `rho` is a density matrix: Hermitian, unit trace, PSD.
pub fn validate_state(rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::InvalidInput("state must be square".into()));
    }
    if !rho.is_hermitian(1e-9) {
        return Err(Error::InvalidInput(format!(
            "state is not Hermitian: residual {:.3e}",
            rho.hermiticity_residual()
        )));
    }
    let tr = rho.trace();
    if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "state trace is {tr}, expected 1"
        )));
    }
    let eig = eig_hermitian(&rho.hermitian_part())?;
    let max = eig.values.last().copied().unwrap_or(0.0).max(1.0);
    if eig.values[0] < -1e-10 * max {
        return Err(Error::InvalidInput(format!(
            "state is not positive semidefinite: min eigenvalue {:.3e}",
            eig.values[0]
        )));
    }
    Ok(())
}

/// Checks that `o` is a valid observable (square Hermitian).
pub fn validate_observable(o: &ComplexMatrix) -> Result<()> {
    if !o.is_square() {
        return Err(Error::InvalidInput("observable must be square".into()));
    }
    if !o.is_hermitian(1e-9) {
        return Err(Error::InvalidInput(format!(
            "observable is not Hermitian: residual {:.3e}",
            o.hermiticity_residual()
        )));
    }
    Ok(())
}

/// Transpose map (Choi matrix: SWAP); HP but not CP. Handy test subject.
pub fn transpose_map(dim: usize) -> LinearMap {
    let units: Vec<ComplexMatrix> = (0..dim * dim)
        .map(|idx| ComplexMatrix::matrix_unit(dim, idx % dim, idx / dim))
        .collect();
    LinearMap::from_action(dim, dim, &units).expect("transpose images")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_x, trace_product};
    use crate::random::{random_complex_matrix, random_hermitian, random_hp_map, random_state};
    use crate::rng::CounterRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell_choi(dim: usize) -> ComplexMatrix {
        // |Omega><Omega| with |Omega> = sum_i |ii>, in (out, in) composite order
        let id = ComplexMatrix::identity(dim);
        let omega = ComplexMatrix::from_vec(dim * dim, 1, id.entries().to_vec()).unwrap();
        &omega * &omega.adjoint()
    }

    #[test]
    fn identity_map_applies_as_identity() {
        let id = LinearMap::identity(3);
        let mut rng = CounterRng::new(31);
        let rho = random_state(3, &mut rng);
        assert!(id.apply(&rho).unwrap().max_diff(&rho) < 1e-12);
        assert!(id.choi().max_diff(&bell_choi(3)) < 1e-12);
    }

    #[test]
    fn bell_choi_map_reproduces_pauli_x() {
        let map = LinearMap::new(2, 2, bell_choi(2)).unwrap();
        assert!(map.apply(&pauli_x()).unwrap().max_diff(&pauli_x()) < 1e-12);
    }

    #[test]
    fn transpose_map_transposes() {
        let t = transpose_map(2);
        let mut rng = CounterRng::new(32);
        for _ in 0..10 {
            let rho = random_state(2, &mut rng);
            // oracle: direct transposition
            assert!(t.apply(&rho).unwrap().max_diff(&rho.transpose()) < 1e-12);
        }
        // Choi matrix of the transpose map is the SWAP operator
        let swap = ComplexMatrix::from_fn(4, 4, |r, q| {
            let (a, i) = (r / 2, r % 2);
            let (b, j) = (q / 2, q % 2);
            if a == j && b == i {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert!(t.choi().max_diff(&swap) == 0.0);
    }

    #[test]
    fn from_action_identity_gives_bell_choi() {
        let images: Vec<ComplexMatrix> = (0..4)
            .map(|idx| ComplexMatrix::matrix_unit(2, idx / 2, idx % 2))
            .collect();
        let map = LinearMap::from_action(2, 2, &images).unwrap();
        assert!(map.choi().max_diff(&bell_choi(2)) == 0.0);
    }

    #[test]
    fn from_action_trace_map_gives_scaled_identity_choi() {
        // rho -> Tr[rho] * 1/d
        let d = 2usize;
        let images: Vec<ComplexMatrix> = (0..d * d)
            .map(|idx| {
                let (i, j) = (idx / d, idx % d);
                if i == j {
                    ComplexMatrix::identity(d).scale(c(1.0 / d as f64, 0.0))
                } else {
                    ComplexMatrix::zeros(d, d)
                }
            })
            .collect();
        let map = LinearMap::from_action(d, d, &images).unwrap();
        let expected = ComplexMatrix::identity(4).scale(c(0.5, 0.0));
        assert!(map.choi().max_diff(&expected) == 0.0);
    }

    #[test]
    fn choi_application_matches_direct_kraus_action() {
        let mut rng = CounterRng::new(33);
        let ops: Vec<ComplexMatrix> = (0..3)
            .map(|_| random_complex_matrix(3, 2, &mut rng))
            .collect();
        let map = LinearMap::from_kraus(2, 3, &ops).unwrap();
        let kraus = KrausSet::new(2, 3, ops).unwrap();
        for _ in 0..10 {
            let x = random_complex_matrix(2, 2, &mut rng);
            let via_choi = map.apply(&x).unwrap();
            let via_kraus = kraus.apply(&x).unwrap();
            assert!(via_choi.max_diff(&via_kraus) < 1e-10);
        }
    }

    #[test]
    fn hp_detection() {
        assert!(LinearMap::identity(2).is_hp());
        assert!(transpose_map(2).is_hp());
        let mut skewed = bell_choi(2);
        skewed.set(0, 3, c(0.0, 0.7));
        let non_hp = LinearMap::new(2, 2, skewed).unwrap();
        assert!(!non_hp.is_hp());
        assert!(matches!(non_hp.jordan_parts(), Err(Error::InvalidInput(_))));
        assert!(matches!(
            non_hp.statistical_decomposition(),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn kraus_of_identity_channel_is_identity_operator() {
        let kraus = LinearMap::identity(2).kraus().unwrap();
        assert_eq!(kraus.len(), 1);
        assert!(kraus.operators()[0].max_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn kraus_of_depolarizing_channel() {
        // rho -> Tr[rho] 1/2: Choi = 1/2 * identity(4), rank 4
        let map = LinearMap::new(2, 2, ComplexMatrix::identity(4).scale(c(0.5, 0.0))).unwrap();
        let kraus = map.kraus().unwrap();
        assert_eq!(kraus.len(), 4);
        for k in kraus.operators() {
            assert!((k.norm_fro().powi(2) - 0.5).abs() < 1e-12);
        }
        // action-reconstruction oracle
        let mut rng = CounterRng::new(34);
        let rho = random_state(2, &mut rng);
        let expected = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        assert!(kraus.apply(&rho).unwrap().max_diff(&expected) < 1e-10);
    }

    #[test]
    fn kraus_count_equals_choi_rank() {
        let mut rng = CounterRng::new(35);
        let ops: Vec<ComplexMatrix> = (0..2)
            .map(|_| random_complex_matrix(2, 2, &mut rng))
            .collect();
        let map = LinearMap::from_kraus(2, 2, &ops).unwrap();
        // two generic Kraus operators span a rank-2 Choi matrix
        assert_eq!(map.kraus().unwrap().len(), 2);
    }

    #[test]
    fn kraus_rejects_non_psd_choi() {
        let t = transpose_map(2); // SWAP has eigenvalue -1
        assert!(matches!(t.kraus(), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn kraus_action_matches_on_matrix_units() {
        let mut rng = CounterRng::new(36);
        let map = crate::random::random_cptp(2, 2, 3, &mut rng);
        let kraus = map.kraus().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let unit = ComplexMatrix::matrix_unit(2, i, j);
                let a = map.apply(&unit).unwrap();
                let b = kraus.apply(&unit).unwrap();
                assert!(a.max_diff(&b) < 1e-9);
            }
        }
    }

    #[test]
    fn jordan_parts_of_cp_map_have_zero_minus() {
        let mut rng = CounterRng::new(37);
        let map = crate::random::random_cptp(2, 2, 2, &mut rng);
        let (plus, minus) = map.jordan_parts().unwrap();
        assert!(minus.choi().norm_max() < 1e-10);
        assert!(plus.choi().max_diff(map.choi()) < 1e-10);
    }

    #[test]
    fn jordan_parts_of_transpose_map_are_swap_projectors() {
        let (plus, minus) = transpose_map(2).jordan_parts().unwrap();
        // oracle: symmetric/antisymmetric projectors built from explicit bases
        let basis_sym = [
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![
                c(0.0, 0.0),
                c(1.0 / 2f64.sqrt(), 0.0),
                c(1.0 / 2f64.sqrt(), 0.0),
                c(0.0, 0.0),
            ],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ];
        let basis_anti = [vec![
            c(0.0, 0.0),
            c(1.0 / 2f64.sqrt(), 0.0),
            c(-1.0 / 2f64.sqrt(), 0.0),
            c(0.0, 0.0),
        ]];
        let mut p_sym = ComplexMatrix::zeros(4, 4);
        for v in &basis_sym {
            let col = ComplexMatrix::from_vec(4, 1, v.clone()).unwrap();
            p_sym = &p_sym + &(&col * &col.adjoint());
        }
        let mut p_anti = ComplexMatrix::zeros(4, 4);
        for v in &basis_anti {
            let col = ComplexMatrix::from_vec(4, 1, v.clone()).unwrap();
            p_anti = &p_anti + &(&col * &col.adjoint());
        }
        assert!(plus.choi().max_diff(&p_sym) < 1e-10);
        assert!(minus.choi().max_diff(&p_anti) < 1e-10);
        // orthogonal supports
        let overlap = trace_product(plus.choi(), minus.choi()).norm();
        assert!(overlap < 1e-12);
    }

    #[test]
    fn jordan_split_is_exact_on_random_hp_maps() {
        let mut rng = CounterRng::new(38);
        for _ in 0..20 {
            let map = random_hp_map(2, 2, &mut rng);
            let (plus, minus) = map.jordan_parts().unwrap();
            let rebuilt = &plus.choi().clone() - minus.choi();
            assert!(rebuilt.max_diff(map.choi()) < 1e-10);
        }
    }

    #[test]
    fn decomposition_of_cptp_map_is_single_part_with_unit_cost() {
        let mut rng = CounterRng::new(39);
        let map = crate::random::random_cptp(3, 3, 2, &mut rng);
        let dec = map.statistical_decomposition().unwrap();
        assert_eq!(dec.len(), 1);
        assert_eq!(dec.coefficients(), &[1.0]);
        assert_eq!(dec.l1_cost(), 1.0);
        assert!(dec.parts()[0].choi().max_diff(map.choi()) == 0.0);
    }

    #[test]
    fn decomposition_of_transpose_map() {
        let dec = transpose_map(2).statistical_decomposition().unwrap();
        assert_eq!(dec.len(), 2, "no completion part expected");
        assert!((dec.coefficients()[0] - 2.0).abs() < 1e-12);
        assert!((dec.coefficients()[1] + 2.0).abs() < 1e-12);
        assert!((dec.l1_cost() - 4.0).abs() < 1e-12);
        let (plus, minus) = transpose_map(2).jordan_parts().unwrap();
        assert!(dec.parts()[0].choi().max_diff(plus.scale(0.5).choi()) < 1e-12);
        assert!(dec.parts()[1].choi().max_diff(minus.scale(0.5).choi()) < 1e-12);
    }

    #[test]
    fn decomposition_of_zero_map_is_empty() {
        let dec = LinearMap::zero(2, 2).statistical_decomposition().unwrap();
        assert!(dec.is_empty());
        assert_eq!(dec.l1_cost(), 0.0);
    }

    #[test]
    fn decomposition_adds_completion_part_for_trace_deficient_maps() {
        // CP non-TP map K = diag(1, 1/2): gamma = 1, deficit diag(0, 3/4)
        let k = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.5, 0.0)]);
        let map = LinearMap::from_kraus(2, 2, &[k]).unwrap();
        let dec = map.statistical_decomposition().unwrap();
        assert_eq!(dec.len(), 2);
        assert!((dec.coefficients()[0] - 1.0).abs() < 1e-12);
        assert_eq!(dec.coefficients()[1], 0.0);
        let res = dec.residuals(&map).unwrap();
        assert!(res.reconstruction_error < 1e-12);
        assert!(res.tp_error < 1e-12);
        for &min in &res.cp_min_eigenvalues {
            assert!(min > -1e-12);
        }
    }

    #[test]
    fn decomposition_round_trips_on_random_hp_maps() {
        let mut rng = CounterRng::new(40);
        for dim in [2usize, 3] {
            for _ in 0..10 {
                let map = random_hp_map(dim, dim, &mut rng);
                let dec = map.statistical_decomposition().unwrap();
                let res = dec.residuals(&map).unwrap();
                assert!(res.reconstruction_error < 1e-9);
                assert!(res.tp_error < 1e-9);
                let floor = -1e-10 * map.choi().norm_max().max(1.0);
                for &min in &res.cp_min_eigenvalues {
                    assert!(min > floor, "part not CP: {min}");
                }
            }
        }
    }

    #[test]
    fn decomposition_of_purely_negative_map() {
        // -identity channel: only the minus Jordan part survives
        let map = LinearMap::identity(2).scale(-1.0);
        let dec = map.statistical_decomposition().unwrap();
        let res = dec.residuals(&map).unwrap();
        assert!(res.reconstruction_error < 1e-12);
        assert!(res.tp_error < 1e-12);
        assert!(dec.coefficients()[0] < 0.0);
    }

    #[test]
    fn decomposition_scales_linearly() {
        let doubled = transpose_map(2).scale(2.0);
        let dec = doubled.statistical_decomposition().unwrap();
        let rebuilt = dec.reconstruct().unwrap();
        assert!(rebuilt.choi().max_diff(doubled.choi()) < 1e-9);
        assert!((dec.l1_cost() - 8.0).abs() < 1e-9);
    }

    #[test]
    fn reconstruct_of_single_part_decomposition_is_the_map() {
        let map = LinearMap::identity(2);
        let dec = map.statistical_decomposition().unwrap();
        assert!(dec.reconstruct().unwrap().choi().max_diff(map.choi()) == 0.0);
        let empty = StatisticalDecomposition::new(Vec::new(), Vec::new()).unwrap();
        assert!(empty.reconstruct().is_err());
    }

    #[test]
    fn weighted_expectations_match_map_expectations() {
        // sum_i lambda_i Tr[E_i(rho) A] = Tr[L(rho) A] on random instances
        let mut rng = CounterRng::new(41);
        let mut checked = 0;
        for dim in [2usize, 3] {
            for _ in 0..50 {
                let map = random_hp_map(dim, dim, &mut rng);
                let dec = map.statistical_decomposition().unwrap();
                let rho = random_state(dim, &mut rng);
                let a = random_hermitian(dim, &mut rng);
                let direct = trace_product(&map.apply(&rho).unwrap(), &a).re;
                let mut recombined = 0.0;
                for (coeff, part) in dec.coefficients().iter().zip(dec.parts()) {
                    recombined += coeff * trace_product(&part.apply(&rho).unwrap(), &a).re;
                }
                assert!(
                    (direct - recombined).abs() < 1e-8,
                    "recombination mismatch at dim {dim}: {direct} vs {recombined}"
                );
                checked += 1;
            }
        }
        assert!(checked >= 100);
    }

    #[test]
    fn outcome_probabilities_form_a_distribution() {
        let mut rng = CounterRng::new(42);
        for _ in 0..20 {
            let map = random_hp_map(2, 2, &mut rng);
            let dec = map.statistical_decomposition().unwrap();
            let rho = random_state(2, &mut rng);
            let mut total = 0.0;
            for part in dec.parts() {
                let p = part.apply(&rho).unwrap().trace().re;
                assert!(p >= -1e-10, "negative outcome probability {p}");
                total += p;
            }
            assert!((total - 1.0).abs() < 1e-9, "probabilities sum to {total}");
        }
    }

    #[test]
    fn state_validation() {
        let mut rng = CounterRng::new(43);
        assert!(validate_state(&random_state(3, &mut rng)).is_ok());
        assert!(validate_state(&ComplexMatrix::identity(2)).is_err()); // trace 2
        assert!(validate_state(&pauli_x()).is_err()); // trace 0, not PSD
        let half = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        assert!(validate_state(&half).is_ok());
        // Hermitian, trace one, but indefinite
        let indefinite = ComplexMatrix::diagonal(&[c(1.5, 0.0), c(-0.5, 0.0)]);
        assert!(validate_state(&indefinite).is_err());
    }
}
