//! Discord `D_p^A(ρ_AB) = min_U F(ρ_AB, Φ^{p,U}_A)`: the least sensitivity
//! of a bipartite state to dephasing on A over all local bases.
//!
//! The minimum is searched with Nelder–Mead over the chart
//! `U(θ) = U₀ exp(i Σ_k θ_k G_k)`, where `G_k` runs over a Hermitian
//! (generalized Gell-Mann) basis, from the identity and from Haar-random
//! `U₀`. For a qubit on A the basis is fixed by a Bloch axis, and a
//! brute-force half-sphere grid gives an independent estimate.

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;

use crate::channels::{self, DephasingChannel, KrausChannel};
use crate::coherence::{self, DEFAULT_RANK_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, c, real, CMatrix, C64};
use crate::qstate::{self, random_unitary_with, seeded_rng, tensor, BipartiteState, DensityMatrix, Unitary};

/// Largest supported dimension of the dephased side.
pub const MAX_DIM_A: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// Haar-random starts in addition to the identity start.
    pub num_starts: usize,
    /// Iteration cap per Nelder–Mead run.
    pub max_iters: u64,
    /// Termination threshold on the spread of simplex costs.
    pub f_tol: f64,
    pub seed: u64,
    /// Grid oracle run alongside the optimizer when `d_A = 2`.
    pub qubit_grid: Option<GridConfig>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { num_starts: 16, max_iters: 2000, f_tol: 1e-9, seed: 0, qubit_grid: Some(GridConfig::default()) }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_starts(mut self, num_starts: usize) -> Self {
        self.num_starts = num_starts;
        self
    }

    pub fn without_grid(mut self) -> Self {
        self.qubit_grid = None;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridConfig {
    /// Polar samples on `[0, π/2]`.
    pub n_theta: usize,
    /// Azimuthal samples on `[0, 2π)`.
    pub n_phi: usize,
    /// 3×3 pattern-search rounds after the grid, halving the step each round.
    pub refine_rounds: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n_theta: 61, n_phi: 121, refine_rounds: 30 }
    }
}

#[derive(Clone, Debug)]
pub struct DiscordResult {
    pub value: f64,
    pub argmin_basis: Unitary,
    /// Number of entries in `per_start_values`.
    pub starts: usize,
    /// Whether the winning run met its tolerance before the iteration cap.
    pub converged: bool,
    /// Identity start first, then the random starts, then the grid oracle
    /// (qubit A only).
    pub per_start_values: Vec<f64>,
    pub best_start: usize,
}

/// `F(ρ_AB, Φ^{p,U}_A)` for a fixed basis.
pub fn discord_objective(rho: &BipartiteState, p: f64, u: &Unitary) -> Result<f64> {
    let ch = DephasingChannel::new(p, u.clone())?;
    Ok(coherence::qfi_local_dephasing(rho, &ch)?.value)
}

/// Orthonormal (Frobenius) Hermitian basis of `d × d` matrices.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = real(s);
            sym[(k, j)] = real(s);
            basis.push(sym);
            let mut anti = CMatrix::zeros(d, d);
            anti[(j, k)] = c(0.0, -s);
            anti[(k, j)] = c(0.0, s);
            basis.push(anti);
        }
    }
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut diag = CMatrix::zeros(d, d);
        for m in 0..l {
            diag[(m, m)] = real(1.0 / norm);
        }
        diag[(l, l)] = real(-(l as f64) / norm);
        basis.push(diag);
    }
    basis.push(linalg::identity(d).unscale((d as f64).sqrt()));
    basis
}

/// `exp(i Σ_k θ_k G_k)`.
pub fn unitary_from_generator(params: &[f64], basis: &[CMatrix]) -> Unitary {
    let d = basis[0].nrows();
    let mut h = CMatrix::zeros(d, d);
    for (t, g) in params.iter().zip(basis) {
        h += g.scale(*t);
    }
    Unitary::from_trusted(linalg::hermitian_function(&h, |x| C64::from_polar(1.0, x)))
}

struct LocalObjective<'a> {
    rho: &'a CMatrix,
    dims: (usize, usize),
    p: f64,
    origin: CMatrix,
    generators: &'a [CMatrix],
}

impl LocalObjective<'_> {
    fn basis(&self, params: &[f64]) -> CMatrix {
        &self.origin * unitary_from_generator(params, self.generators).matrix()
    }

    fn evaluate_basis(&self, u: &CMatrix) -> f64 {
        evaluate(self.rho, self.dims, self.p, u)
    }
}

fn evaluate(rho: &CMatrix, dims: (usize, usize), p: f64, u: &CMatrix) -> f64 {
    let full = linalg::kron(u, &linalg::identity(dims.1));
    let local = full.adjoint() * rho * &full;
    let deriv = channels::dephase_a_matrix(&local, dims) - &local;
    let state = &local + deriv.scale(p);
    coherence::spectral_qfi(&state, &deriv, DEFAULT_RANK_TOL).value
}

impl CostFunction for LocalObjective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, params: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let v = self.evaluate_basis(&self.basis(params));
        Ok(if v.is_finite() { v } else { f64::MAX })
    }
}

struct RunOutcome {
    value: f64,
    basis: CMatrix,
    converged: bool,
}

fn nelder_mead(obj: &LocalObjective<'_>, start: Vec<f64>, step: f64, cfg: &OptimizerConfig) -> Result<(Vec<f64>, f64, bool)> {
    let mut simplex = vec![start.clone()];
    for k in 0..start.len() {
        let mut v = start.clone();
        v[k] += step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(cfg.f_tol)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let res = Executor::new(LocalObjective { origin: obj.origin.clone(), ..*obj }, solver)
        .configure(|state| state.max_iters(cfg.max_iters))
        .run()
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let state = res.state();
    let converged = matches!(
        state.get_termination_status(),
        TerminationStatus::Terminated(TerminationReason::SolverConverged)
    );
    let best = state.get_best_param().cloned().unwrap_or(start);
    Ok((best, state.get_best_cost(), converged))
}

fn optimize_from(
    rho: &CMatrix,
    dims: (usize, usize),
    p: f64,
    origin: CMatrix,
    generators: &[CMatrix],
    cfg: &OptimizerConfig,
) -> Result<RunOutcome> {
    let obj = LocalObjective { rho, dims, p, origin, generators };
    let zero = vec![0.0; generators.len()];
    let initial = obj.evaluate_basis(&obj.origin);
    let (coarse, _, _) = nelder_mead(&obj, zero, 0.4, cfg)?;
    // Restart from the coarse optimum with a small simplex to escape
    // premature collapse.
    let (fine, _, converged) = nelder_mead(&obj, coarse, 1e-3, cfg)?;
    let basis = obj.basis(&fine);
    let value = obj.evaluate_basis(&basis);
    if initial <= value {
        return Ok(RunOutcome { value: initial, basis: obj.origin, converged });
    }
    Ok(RunOutcome { value, basis, converged })
}

fn check_discord_args(rho: &BipartiteState, p: f64) -> Result<()> {
    if p == 0.0 {
        return Err(Error::param("p=0 unsupported: discord is only defined here for p in (0, 1]"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(format!("p = {p} outside (0, 1]")));
    }
    if rho.dim_a() > MAX_DIM_A {
        return Err(Error::param(format!("d_A = {} exceeds {MAX_DIM_A}", rho.dim_a())));
    }
    Ok(())
}

/// Multi-start minimization of the local dephasing QFI over bases on A.
///
/// The result is an upper bound on the true minimum.
pub fn discord(rho: &BipartiteState, p: f64, cfg: &OptimizerConfig) -> Result<DiscordResult> {
    check_discord_args(rho, p)?;
    if cfg.num_starts == 0 {
        return Err(Error::param("num_starts must be at least 1"));
    }
    let da = rho.dim_a();
    let dims = rho.dims();
    let generators = hermitian_basis(da);
    let mut rng = seeded_rng(cfg.seed);
    let mut origins = vec![linalg::identity(da)];
    for _ in 0..cfg.num_starts {
        origins.push(random_unitary_with(da, &mut rng)?.matrix().clone());
    }

    let mut values = Vec::with_capacity(origins.len() + 1);
    let mut best: Option<(usize, CMatrix, bool)> = None;
    let mut best_value = f64::INFINITY;
    for (k, origin) in origins.into_iter().enumerate() {
        let run = optimize_from(rho.matrix(), dims, p, origin, &generators, cfg)?;
        values.push(run.value);
        if run.value < best_value || best.is_none() {
            best_value = run.value;
            best = Some((k, run.basis, run.converged));
        }
    }
    let (mut best_start, mut basis, converged) = best.expect("at least one start");

    if da == 2 {
        if let Some(grid) = cfg.qubit_grid {
            let g = discord_qubit_a_grid_with(rho, p, &grid)?;
            values.push(g.value);
            if g.value < best_value {
                best_value = g.value;
                best_start = values.len() - 1;
                basis = g.basis.matrix().clone();
            }
        }
    }

    Ok(DiscordResult {
        value: best_value,
        argmin_basis: Unitary::from_trusted(basis),
        starts: values.len(),
        converged,
        per_start_values: values,
        best_start,
    })
}

/// Minimum of the qubit-A objective over Bloch axes.
#[derive(Clone, Debug)]
pub struct GridResult {
    pub value: f64,
    /// Unit Bloch axis `n`; the dephasing basis is the eigenbasis of `n·σ`.
    pub axis: [f64; 3],
    pub basis: Unitary,
    /// `max − min` of the objective over the coarse grid.
    pub spread: f64,
}

/// Columns `|n+⟩, |n−⟩` for the axis at polar angle `theta`, azimuth `phi`.
pub fn qubit_basis_from_axis(theta: f64, phi: f64) -> Unitary {
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            real(ct),
            -C64::from_polar(st, -phi),
            C64::from_polar(st, phi),
            real(ct),
        ],
    );
    Unitary::from_trusted(m)
}

pub fn discord_qubit_a_grid(rho: &BipartiteState, p: f64) -> Result<GridResult> {
    discord_qubit_a_grid_with(rho, p, &GridConfig::default())
}

pub fn discord_qubit_a_grid_with(rho: &BipartiteState, p: f64, grid: &GridConfig) -> Result<GridResult> {
    check_discord_args(rho, p)?;
    if rho.dim_a() != 2 {
        return Err(Error::DimensionMismatch(rho.dim_a(), 2));
    }
    if grid.n_theta < 2 || grid.n_phi < 1 {
        return Err(Error::param("grid needs n_theta ≥ 2 and n_phi ≥ 1"));
    }
    let dims = rho.dims();
    let f = |theta: f64, phi: f64| evaluate(rho.matrix(), dims, p, qubit_basis_from_axis(theta, phi).matrix());

    let d_theta = std::f64::consts::FRAC_PI_2 / (grid.n_theta - 1) as f64;
    let d_phi = 2.0 * std::f64::consts::PI / grid.n_phi as f64;
    let (mut best, mut worst) = ((f64::INFINITY, 0.0, 0.0), f64::NEG_INFINITY);
    for i in 0..grid.n_theta {
        let theta = i as f64 * d_theta;
        for j in 0..grid.n_phi {
            let phi = j as f64 * d_phi;
            let v = f(theta, phi);
            worst = worst.max(v);
            if v < best.0 {
                best = (v, theta, phi);
            }
        }
    }
    let spread = worst - best.0;

    let (mut h_theta, mut h_phi) = (d_theta, d_phi);
    for _ in 0..grid.refine_rounds {
        let (_, t0, p0) = best;
        for a in -1..=1 {
            for b in -1..=1 {
                if a == 0 && b == 0 {
                    continue;
                }
                let (t, ph) = (t0 + a as f64 * h_theta, p0 + b as f64 * h_phi);
                let v = f(t, ph);
                if v < best.0 {
                    best = (v, t, ph);
                }
            }
        }
        h_theta /= 2.0;
        h_phi /= 2.0;
    }

    let (value, theta, phi) = best;
    Ok(GridResult {
        value,
        axis: [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()],
        basis: qubit_basis_from_axis(theta, phi),
        spread,
    })
}

/// Outcome of converting local coherence into discord.
#[derive(Clone, Debug)]
pub struct ConversionReport {
    /// `C_p(ρ_A)` in the computational basis.
    pub c_in: f64,
    /// `D_p^A(E(ρ_A ⊗ σ_B))`.
    pub d_out: f64,
    /// `c_in − d_out`; nonnegative up to optimizer tolerance.
    pub slack: f64,
    pub discord: DiscordResult,
}

/// Applies a bipartite channel commuting with `Φ^p_A` to `ρ_A ⊗ σ_B` and
/// compares the discord produced with the input coherence.
pub fn conversion_check(
    rho_a: &DensityMatrix,
    sigma_b: &DensityMatrix,
    e: &KrausChannel,
    p: f64,
    cfg: &OptimizerConfig,
) -> Result<ConversionReport> {
    let off_diag = linalg::frobenius(&(sigma_b.matrix() - channels::dephase_matrix(sigma_b.matrix())));
    if off_diag > qstate::HERMITIAN_TOL {
        return Err(Error::param(format!("σ_B is not incoherent (off-diagonal norm {off_diag:e})")));
    }
    let dims = (rho_a.dim(), sigma_b.dim());
    if e.dim_in() != dims.0 * dims.1 || e.dim_out() != e.dim_in() {
        return Err(Error::DimensionMismatch(e.dim_in(), dims.0 * dims.1));
    }
    let residual = channels::local_dephasing_commutator(e, dims, p)?;
    if residual > 1e-10 {
        return Err(Error::param(format!("channel does not commute with dephasing on A (residual {residual:e})")));
    }
    let c_in = coherence::qfi_dephasing(rho_a, &DephasingChannel::computational(dims.0, p)?)?.value;
    let out = channels::apply_kraus(tensor(rho_a, sigma_b).state(), e)?;
    let discord = discord(&BipartiteState::new(out, dims)?, p, cfg)?;
    Ok(ConversionReport { c_in, d_out: discord.value, slack: c_in - discord.value, discord })
}
