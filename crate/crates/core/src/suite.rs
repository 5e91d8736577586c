//! The acceptance suite: exact symbolic golden checks and numerical verification of
//! the closed-form solutions, one [`VerificationReport`] per criterion.

use std::path::Path;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diffalg::euler::is_total_derivative;
use crate::diffalg::{d_x_inverse, ratio, BivectorPoly, Graded, ScalarPoly, VectorPoly};
use crate::error::{Error, Result};
use crate::hierarchy::{lax_u, recursion_apply, FlowTable, LaxCoeff, LaxMatrix};
use crate::numerics::{
    convergence_study, flow_residual, matrix_identity_check, Grid, Relation, ResidualConfig, ScalarBreather,
    TimeMethod,
};
use crate::report::VerificationReport;
use crate::solutions::*;

/// Reference data for the symbolic criteria.
#[derive(Clone, Debug, PartialEq)]
pub struct Golden {
    pub flow_t3: String,
    pub flow_t5: String,
    pub lax_v3: String,
}

impl Golden {
    pub const FILES: [&'static str; 3] = ["flow_t3.txt", "flow_t5.txt", "lax_v3.json"];

    /// The copies compiled into the library.
    pub fn embedded() -> Self {
        Golden {
            flow_t3: include_str!("../golden/flow_t3.txt").to_string(),
            flow_t5: include_str!("../golden/flow_t5.txt").to_string(),
            lax_v3: include_str!("../golden/lax_v3.json").to_string(),
        }
    }

    pub fn from_dir(dir: &Path) -> std::io::Result<Self> {
        let read = |f: &str| std::fs::read_to_string(dir.join(f));
        Ok(Golden { flow_t3: read(Self::FILES[0])?, flow_t5: read(Self::FILES[1])?, lax_v3: read(Self::FILES[2])? })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Skip the n = 3 symbolic checks.
    pub quick: bool,
    pub seed: u64,
    pub golden: Golden,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { quick: false, seed: 2024, golden: Golden::embedded() }
    }
}

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    check: fn(&SuiteConfig, &mut ChaCha8Rng) -> Result<VerificationReport>,
}

impl Criterion {
    /// Runs the check; an error becomes a failing report carrying the message.
    pub fn run(&self, config: &SuiteConfig) -> VerificationReport {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(self.id as u64));
        let start = Instant::now();
        let report = match (self.check)(config, &mut rng) {
            Ok(r) => r,
            Err(e) => VerificationReport::new("", f64::INFINITY, 0.0).with("error", e.to_string()),
        };
        VerificationReport { name: format!("[{:>2}] {}", self.id, self.name), ..report }
            .with("elapsed_s", start.elapsed().as_secs_f64())
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "golden flow t3", check: golden_t3 },
        Criterion { id: 2, name: "golden flow t5", check: golden_t5 },
        Criterion { id: 3, name: "golden Lax V3", check: golden_v3 },
        Criterion { id: 4, name: "exact zero curvature", check: zero_curvature },
        Criterion { id: 5, name: "commuting flows", check: commuting_flows },
        Criterion { id: 6, name: "D_x^-1 round trip", check: antiderivatives },
        Criterion { id: 7, name: "soliton flow residual", check: soliton_residual },
        Criterion { id: 8, name: "dressing path identity", check: dressing_path },
        Criterion { id: 9, name: "Darboux identities", check: darboux_identities },
        Criterion { id: 10, name: "breather consistency", check: breather_consistency },
        Criterion { id: 11, name: "Backlund transformation", check: backlund },
        Criterion { id: 12, name: "symmetries", check: symmetries },
    ]
}

pub fn run_suite(config: &SuiteConfig) -> Vec<VerificationReport> {
    criteria().iter().map(|c| c.run(config)).collect()
}

/// A symbolic comparison: the residual counts mismatches and must be zero.
fn exact(name: &str, mismatches: usize) -> VerificationReport {
    VerificationReport::new(name, mismatches as f64, 0.0)
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64()))
}

fn text_check(name: &str, got: &VectorPoly, want: &str) -> VerificationReport {
    let got = got.to_string();
    exact(name, (got != want.trim()) as usize).with("derived", &got).with("expected", want.trim())
}

fn golden_t3(config: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let (t3, secs) = timed(|| recursion_apply(&VectorPoly::u(1)))?;
    Ok(VerificationReport::aggregate(
        "",
        &[text_check("canonical text", &t3, &config.golden.flow_t3), VerificationReport::new("runtime s", secs, 1.0)],
    ))
}

fn golden_t5(config: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let (t5, secs) = timed(|| recursion_apply(&recursion_apply(&VectorPoly::u(1))?))?;
    Ok(VerificationReport::aggregate(
        "",
        &[
            text_check("canonical text", &t5, &config.golden.flow_t5).with("terms", t5.term_count()),
            VerificationReport::new("runtime s", secs, 5.0),
        ],
    ))
}

fn block_mismatches(a: &LaxMatrix, b: &LaxMatrix) -> usize {
    let top = a.degree().max(b.degree()).unwrap_or(0);
    (0..=top)
        .map(|d| {
            let (x, y) = (a.coeff(d), b.coeff(d));
            [x.a != y.a, x.v1 != y.v1, x.v2 != y.v2, x.w != y.w].iter().filter(|m| **m).count()
        })
        .sum()
}

/// `V3 = λ²U - λ([J,U_x] + ‖u‖²J/2) - U_xx - ‖u‖²U/2 + [U_x,U]`, assembled directly from blocks.
fn v3_from_blocks() -> LaxMatrix {
    let (j, u) = (LaxCoeff::j(), LaxCoeff::u());
    let ux = u.d_x();
    let half_norm = ScalarPoly::pairing(0, 0).scale(&ratio(1, 2));
    lax_u().shift(2).add(&LaxMatrix::from_coeffs([
        (1, j.commutator(&ux).add(&j.times(&half_norm)).neg()),
        (0, ux.d_x().neg().sub(&u.times(&half_norm)).add(&ux.commutator(&u))),
    ]))
}

fn golden_v3(config: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let json: serde_json::Value = serde_json::from_str(&config.golden.lax_v3)
        .map_err(|e| Error::Parse { pos: e.column(), msg: format!("golden Lax V3: {e}") })?;
    let want = LaxMatrix::from_json(&json)?;
    let (v3, secs) = timed(|| FlowTable::new().lax_v(1))?;
    Ok(VerificationReport::aggregate(
        "",
        &[
            exact("golden blocks", block_mismatches(&v3, &want)),
            exact("block formula", block_mismatches(&v3, &v3_from_blocks())),
            VerificationReport::new("runtime s", secs, 5.0),
        ],
    ))
}

fn zero_curvature(config: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let table = FlowTable::new();
    let top = if config.quick { 2 } else { 3 };
    let parts = (1..=top)
        .map(|n| {
            let (r, secs) = timed(|| table.zero_curvature_residual(n))?;
            let nonzero = r.coeffs().filter(|(_, c)| !c.is_zero()).count();
            Ok(exact(&format!("n={n}"), nonzero).with("elapsed_s", secs))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::aggregate("", &parts).with("quick", config.quick))
}

fn commuting_flows(_: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let table = FlowTable::new();
    let (f1, f2) = (table.flow(1)?, table.flow(2)?);
    let diff = &f1.evolutionary_derivative(&f2) - &f2.evolutionary_derivative(&f1);
    Ok(exact("", diff.term_count()))
}

fn random_graded<T: Graded>(rng: &mut ChaCha8Rng, weight: u32, degree: u32) -> Option<T> {
    let terms: std::collections::BTreeMap<_, _> = T::basis(weight, degree)
        .into_iter()
        .filter_map(|k| {
            let c = rng.random_range(-4i64..=4);
            (c != 0).then(|| (k, ratio(c, rng.random_range(1..=3))))
        })
        .collect();
    (!terms.is_empty()).then(|| T::unflatten(terms))
}

/// Draws a nonzero homogeneous `p` of weight at most `max_weight - 1` and reports whether
/// `D_x D_x^{-1}(D_x p) = D_x p`.
fn round_trip<T: Graded + PartialEq>(
    rng: &mut ChaCha8Rng,
    degrees: &[u32],
    max_weight: u32,
    d_x: fn(&T) -> T,
) -> Option<Result<bool>> {
    let weight = rng.random_range(1..max_weight);
    let degree = degrees[rng.random_range(0..degrees.len())];
    let p: T = random_graded(rng, weight, degree)?;
    let q = d_x(&p);
    Some(d_x_inverse(&q).map(|i| d_x(&i) == q))
}

fn antiderivatives(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<VerificationReport> {
    const MAX_WEIGHT: u32 = 10;
    let (mut exact_inputs, mut failures) = (0, 0);
    while exact_inputs < 200 {
        let outcome = match exact_inputs % 3 {
            0 => round_trip::<ScalarPoly>(rng, &[2, 4], MAX_WEIGHT, ScalarPoly::d_x),
            1 => round_trip::<VectorPoly>(rng, &[1, 3, 5], MAX_WEIGHT, VectorPoly::d_x),
            _ => round_trip::<BivectorPoly>(rng, &[2, 4], MAX_WEIGHT, BivectorPoly::d_x),
        };
        if let Some(ok) = outcome {
            exact_inputs += 1;
            failures += !ok? as usize;
        }
    }
    let (mut non_exact, mut accepted) = (0, 0);
    while non_exact < 20 {
        let weight = rng.random_range(2..=MAX_WEIGHT);
        let degree = if rng.random_bool(0.5) { 2 } else { 4 };
        let Some(p) = random_graded::<ScalarPoly>(rng, weight, degree) else { continue };
        if is_total_derivative(&p) {
            continue;
        }
        non_exact += 1;
        accepted += !matches!(p.d_x_inverse(), Err(Error::NotExact { .. })) as usize;
    }
    Ok(VerificationReport::aggregate(
        "",
        &[
            exact("exact inputs round trip", failures).with("inputs", exact_inputs),
            exact("non-exact inputs rejected", accepted).with("inputs", non_exact),
        ],
    ))
}

fn soliton_times(n: u32) -> TimeVector {
    let t = TimeVector::new(0.0).with(1, 0.3);
    if n >= 2 {
        t.with(2, 0.1)
    } else {
        t
    }
}

fn soliton_residual(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let table = FlowTable::new();
    let flows = [(1, table.flow(1)?, 1e-6), (2, table.flow(2)?, 1e-5)];
    let mut parts = Vec::new();
    for mu in [0.5, 1.0, 2.0] {
        for dim in 1..=3 {
            let p = SolitonParams::random(rng, mu, dim);
            for (n, flow, tol) in &flows {
                let config = ResidualConfig { tolerance: *tol, ..Default::default() };
                let r = flow_residual(&p, flow, *n, &soliton_times(*n), &config)?;
                parts.push(VerificationReport { name: format!("mu={mu} N={dim} n={n}"), ..r });
            }
        }
        let p = SolitonParams::random(rng, mu, 2);
        for (n, flow, _) in &flows {
            let study = convergence_study(
                |h| {
                    let config = ResidualConfig { grid: Grid::with_spacing(-15.0, 15.0, h)?, ..Default::default() };
                    flow_residual(&p, flow, *n, &soliton_times(*n), &config).map(|r| r.max_residual)
                },
                &[0.4 / mu, 0.2 / mu, 0.1 / mu],
            )?;
            parts.push(VerificationReport::at_least(format!("slope mu={mu} n={n}"), study.slope, 3.5).with("rows", &study.rows));
        }
    }
    Ok(VerificationReport::aggregate("", &parts))
}

fn dressing_path(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let dim = rng.random_range(1..=3);
        let mu = rng.random_range(0.5..2.0);
        let p = SolitonParams::random(rng, mu, dim);
        let t = TimeVector::new(rng.random_range(-10.0..10.0)).with(1, rng.random_range(-1.0..1.0));
        let dressed = dressing_apply(&soliton_q(&p, &t), p.mu, &DVector::zeros(dim))?;
        worst = worst.max((dressed - one_soliton(&p, &t)).amax());
    }
    Ok(VerificationReport::new("", worst, 1e-12).with("points", 1000))
}

const GENERIC_LAMBDAS: [Complex64; 5] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(2.0, 1.0),
    Complex64::new(-0.7, 0.3),
    Complex64::new(0.4, 2.2),
    Complex64::new(-1.3, -0.8),
];

fn random_times(rng: &mut ChaCha8Rng) -> TimeVector {
    TimeVector::new(rng.random_range(-2.0..2.0)).with(1, rng.random_range(-0.5..0.5))
}

fn darboux_identities(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let mut parts = Vec::new();
    for k in 0..20 {
        let dim = rng.random_range(1..=4);
        let mu = rng.random_range(0.5..2.0);
        let p = SolitonParams::random(rng, mu, dim);
        let t = random_times(rng);
        let name = format!("soliton #{k}");
        parts.push(matrix_identity_check(&name, |l| soliton_darboux(&p, &t, l), &Relation::ALL, &GENERIC_LAMBDAS, 1e-10)?);
    }
    for k in 0..20 {
        let dim = rng.random_range(1..=5);
        let s = rng.random_range(1..=(dim + 1) / 2);
        let p = BreatherParams::new(random_pole(rng), random_isotropic(rng, dim, s))?;
        let t = random_times(rng);
        let name = format!("breather #{k} N={dim} s={s}");
        parts.push(matrix_identity_check(&name, |l| breather_darboux(&p, &t, l), &Relation::ALL, &GENERIC_LAMBDAS, 1e-10)?);
    }
    Ok(VerificationReport::aggregate("", &parts))
}

fn breather_consistency(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let mut rank_one = 0.0f64;
    for dim in 1..=3 {
        let p = BreatherParams::new(random_pole(rng), random_isotropic(rng, dim, 1))?;
        for k in 0..100 {
            let t = TimeVector::new(-5.0 + 0.1 * k as f64).with(1, 0.2);
            rank_one = rank_one.max((breather_dress(&p, &t)? - rank1_breather(&p, &t)?).amax());
        }
    }
    let mut delta = 0.0f64;
    for _ in 0..200 {
        let (r, theta) = (rng.random_range(0.3..2.0), rng.random_range(0.2..1.37));
        let p = BreatherParams::unit_example(Complex64::from_polar(r, theta), 1, 0)?;
        let t = TimeVector::new(rng.random_range(-3.0..3.0)).with(1, rng.random_range(-0.5..0.5));
        let x = p.xi(&t);
        let want = delta_closed_form(r, theta, x.re, x.im);
        delta = delta.max((breather_delta(&p, &t)? - want).norm() / want.abs().max(1.0));
    }
    let flow = FlowTable::new().flow(1)?;
    let t = TimeVector::new(0.0).with(1, 0.3);
    let mut parts = vec![
        VerificationReport::new("rank-s vs rank-1", rank_one, 1e-10),
        VerificationReport::new("determinant vs closed form", delta, 1e-12),
    ];
    for k in 0..3 {
        let mu = Complex64::from_polar(rng.random_range(0.5..1.5), rng.random_range(0.3..1.27));
        let r = flow_residual(&ScalarBreather { mu }, &flow, 1, &t, &ResidualConfig::default())?;
        parts.push(VerificationReport { name: format!("scalar mKdV residual #{k}"), ..r });
        let dressed = BreatherParams::unit_example(mu, 1, 0)?;
        let config = ResidualConfig { method: TimeMethod::Fd { delta: 1e-3 }, ..Default::default() };
        let r = flow_residual(&dressed, &flow, 1, &t, &config)?;
        parts.push(VerificationReport { name: format!("dressed N=1 residual #{k}"), ..r });
    }
    Ok(VerificationReport::aggregate("", &parts))
}

fn backlund(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let (mut worst, mut weakest_detection) = (0.0f64, f64::INFINITY);
    for _ in 0..10 {
        let dim = rng.random_range(1..=3);
        let mu = rng.random_range(0.5..2.0);
        let p = SolitonParams::random(rng, mu, dim);
        let xs: Vec<f64> = (0..201).map(|k| -10.0 + 0.1 * k as f64).collect();
        let t = |x: f64| TimeVector::new(x).with(1, 0.2);
        let values = DMatrix::from_fn(xs.len(), dim, |i, j| one_soliton(&p, &t(xs[i]))[j]);
        let dx = DMatrix::from_fn(xs.len(), dim, |i, j| p.mu * one_soliton_dxi(&p, &t(xs[i]))[j]);
        let zero = FieldSamples { values: DMatrix::zeros(xs.len(), dim), dx: DMatrix::zeros(xs.len(), dim) };
        let sol = FieldSamples { values, dx };
        let r = backlund_residual(&zero, &sol, p.mu, &Branch::Best)?;
        worst = worst.max(r.residual).max(r.constraint);

        let perturbed = FieldSamples { values: &sol.values * 1.01, dx: &sol.dx * 1.01 };
        let detected = match backlund_residual(&zero, &perturbed, p.mu, &Branch::Best) {
            Err(Error::ConstraintViolation { excess }) => excess,
            Ok(r) => r.residual.max(r.constraint),
            Err(e) => return Err(e),
        };
        weakest_detection = weakest_detection.min(detected);
    }
    Ok(VerificationReport::aggregate(
        "",
        &[
            VerificationReport::new("vacuum to soliton", worst, 1e-10),
            VerificationReport::at_least("perturbed pair rejected by", weakest_detection, 1e-3),
        ],
    ))
}

fn symmetries(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let xs: Vec<f64> = (0..101).map(|k| -6.0 + 0.12 * k as f64).collect();
    let (mut rotation, mut scaling, mut translation) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10 {
        let dim = rng.random_range(1..=3);
        let mu = rng.random_range(0.5..2.0);
        let p = SolitonParams::random(rng, mu, dim);
        let t3 = rng.random_range(-0.5..0.5);

        let a = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0)).qr().q();
        let rotated = SolitonParams::new(p.mu, p.c0, (&a * DVector::from_column_slice(&p.c)).as_slice().to_vec())?;

        let eps: f64 = rng.random_range(-0.5..0.5);
        let scaled = SolitonParams { mu: (-eps).exp() * p.mu, ..p.clone() };

        // x -> x + a moves ξ by s = μa; the same profile comes from rescaled constants
        let shift = rng.random_range(-2.0..2.0);
        let s: f64 = p.mu * shift;
        let k = s.cosh() + p.c0 * s.sinh();
        let moved = SolitonParams::new(p.mu, (s.sinh() + p.c0 * s.cosh()) / k, p.c.iter().map(|c| c / k).collect())?;

        for &x in &xs {
            let t = TimeVector::new(x).with(1, t3);
            let u = one_soliton(&p, &t);
            rotation = rotation.max((one_soliton(&rotated, &t) - &a * &u).amax());
            let v = one_soliton(&scaled, &TimeVector::new(eps.exp() * x).with(1, (3.0 * eps).exp() * t3));
            scaling = scaling.max((v - &u * (-eps).exp()).amax());
            let w = one_soliton(&p, &TimeVector::new(x + shift).with(1, t3));
            translation = translation.max((w - one_soliton(&moved, &t)).amax());
        }
    }
    Ok(VerificationReport::aggregate(
        "",
        &[
            VerificationReport::new("O(N) equivariance", rotation, 1e-12),
            VerificationReport::new("scaling", scaling, 1e-12),
            VerificationReport::new("translation", translation, 1e-12),
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrupted_golden_fails_only_its_criterion() {
        let mut config = SuiteConfig { quick: true, ..Default::default() };
        config.golden.flow_t3 = "-u3 - 1/2*<u0,u0>*u1".into();
        let c = criteria();
        assert!(!c[0].run(&config).pass);
        assert!(c[1].run(&config).pass);
        config.golden.lax_v3 = "{\"0\": {\"a\": \"oops(\"}}".into();
        let r = c[2].run(&config);
        assert!(!r.pass && r.metadata.contains_key("error"), "{r:?}");
    }

    #[test]
    fn embedded_golden_matches_files_on_disk() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("golden");
        assert_eq!(Golden::from_dir(&dir).unwrap(), Golden::embedded());
    }
}
