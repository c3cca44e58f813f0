use std::f64::consts::PI;
use std::sync::Arc;

use clap::ValueEnum;
use opcone::finite::{self, HSElement};
use opcone::function::{self, CompactSpace, L2Element, Measure};
use opcone::hilbert::{StatePoint, UnitalSpace};
use opcone::linalg::{self, c, CMat};
use opcone::matrix::{self, HMatrix};
use opcone::pietsch;
use opcone::states;
use opcone::supports::{self, MapK};
use rand::Rng;
use serde_json::json;

use crate::report::RunReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Demo {
    Exm11,
    ChiHalf,
    SinSupport,
    Hs3,
    Swap,
    L22Minmax,
    MassBound,
    PietschBound,
}

pub fn run(demo: Demo, report: &mut RunReport, budget: usize) -> opcone::Result<()> {
    match demo {
        Demo::Exm11 => exm11(report),
        Demo::ChiHalf => chi_half(report),
        Demo::SinSupport => sin_support(report),
        Demo::Hs3 => hs3(report),
        Demo::Swap => swap(report),
        Demo::L22Minmax => l22_minmax(report, budget),
        Demo::MassBound => mass_bound(report),
        Demo::PietschBound => pietsch_bound(report),
    }?;
    report.settle_checks();
    Ok(())
}

fn exm11(rep: &mut RunReport) -> opcone::Result<()> {
    for n in [4usize, 9, 16] {
        let eta = function::signed_step_example(n, 2048)?;
        let mu = eta.measure().clone();
        let (eta0, r) = eta.decompose()?;
        let sq: Vec<_> = eta0.values().iter().map(|v| v * v.conj()).collect();
        rep.close(&format!("n={n}: ∫η₀ dμ = 0"), function::integrate(eta0.values(), &mu)?.norm(), 0.0, 1e-12);
        rep.close(&format!("n={n}: ∫η₀² dμ = 1"), function::integrate(&sq, &mu)?.re, 1.0, 1e-12);
        rep.close(&format!("n={n}: (η, u) = 1"), r.re, 1.0, 1e-12);
        rep.holds(&format!("n={n}: η in the L² cone"), function::in_l2_cone(&eta)?);
        rep.close(&format!("n={n}: min η = 1 − √n"), eta.min_value(), 1.0 - (n as f64).sqrt(), 1e-12);
    }
    Ok(())
}

fn chi_half(rep: &mut RunReport) -> opcone::Result<()> {
    let sp = CompactSpace::atoms(3);
    let cases = [(0.5 + 1e-9, true), (0.5, true), (0.5 - 1e-9, false), (0.2, false), (0.9, true)];
    let mut rows = Vec::new();
    for (p, inside) in cases {
        let mu = Arc::new(Measure::atomic(&sp, vec![p / 2.0, p / 2.0, 1.0 - p])?);
        let set = [0, 1];
        let pa = mu.mass_of(&set);
        let chi = L2Element::indicator(&mu, &set);
        let (chi0, _) = chi.decompose()?;
        rep.close(&format!("μ(A)={pa}: ‖χ_A − μ(A)u‖₂² = (1−μ(A))μ(A)"), chi0.norm().powi(2), (1.0 - pa) * pa, 1e-15);
        let got = function::in_l2_cone_tol(&chi, 1e-12)?;
        rep.holds(&format!("μ(A)={pa}: χ_A in cone is {inside}"), got == inside);
        rows.push(json!({"mu_a": pa, "in_cone": got, "margin": function::l2_cone_margin(&chi)?}));
    }
    rep.details = json!({ "cases": rows });
    Ok(())
}

fn sin_support(rep: &mut RunReport) -> opcone::Result<()> {
    let n = 64;
    let k = supports::sine_support(n, 4096)?;
    let m = supports::is_maximal(&k);
    let tail = PI * PI / 6.0 - 1.0;
    rep.at_most("pointwise Σ_{n≥2} n⁻² sin²(nπt) ≤ π²/6 − 1", m.worst_sum, tail);
    rep.at_least("maximality margin ≥ 1 − (π²/6 − 1)", m.margin, 1.0 - tail);
    let sep = supports::separate(&k)?;
    rep.holds("separate succeeds with q₀ = 0", sep.q0.is_empty() && sep.is_valid(1e-12));
    let hs = k.hs_norm_sq();
    let series: f64 = (1..=n).map(|j| 1.0 / (j as f64).powi(2)).sum();
    let half_weighted = 1.0 + 0.5 * (series - 1.0);
    rep.close("‖T_k‖₂² = 1 + ½Σ_{2≤n≤N} n⁻² under dt/2", hs, half_weighted, 1e-9);
    rep.at_most("‖T_k‖₂² ≤ π²/6", hs, PI * PI / 6.0);
    rep.at_least("‖T_k‖₂² ≥ Σ_{n≤N} n⁻² (unweighted series)", hs, series);
    rep.details = json!({ "worst_sum": m.worst_sum, "hs_norm_sq": hs, "series": series, "terms": sep.term_count() });
    Ok(())
}

fn hs3(rep: &mut RunReport) -> opcone::Result<()> {
    let x0 = finite::hs3_example();
    let ev = linalg::eigvalsh(&x0);
    let r = 1.5f64.sqrt();
    for (i, want) in [-r, 0.0, r].into_iter().enumerate() {
        rep.close(&format!("eigenvalue {i} of x₀"), ev[i], want, 1e-9);
    }
    let x = HSElement::new(&x0 + CMat::identity(3, 3))?;
    rep.holds("x₀ + I is in the HS₃ cone", finite::in_hs_cone(&x, 1e-9));
    rep.close("λ_min(x₀ + I) = 1 − √(3/2)", linalg::lambda_min(&x.matrix), 1.0 - r, 1e-9);
    rep.holds("x₀ + I is not PSD", linalg::lambda_min(&x.matrix) < 0.0);
    rep.close("‖x₀‖₂ = 1 under normalized trace", HSElement::new(x0)?.norm2(), 1.0, 1e-12);
    Ok(())
}

fn swap(rep: &mut RunReport) -> opcone::Result<()> {
    let mut rows = Vec::new();
    for d in 2..=8 {
        let t = finite::swap_unitary(&UnitalSpace::standard(d), d - 1, 0)?;
        let s = finite::cone_swap_check(&t, 1000, d as u64);
        rep.at_most(&format!("dim {d}: T² = I"), s.involution_defect, 1e-12);
        rep.at_most(&format!("dim {d}: T*T = I"), s.unitary_defect, 1e-12);
        rep.holds(&format!("dim {d}: 𝔠ᵤ samples land in 𝔠ₑ"), s.cone_failures == 0);
        rep.holds(&format!("dim {d}: max certificates transport"), s.max_failures == 0);
        rows.push(json!({"dim": d, "samples": s.samples, "margin_drift": s.margin_drift}));
    }
    rep.details = json!({ "dims": rows });
    Ok(())
}

fn l22_minmax(rep: &mut RunReport, budget: usize) -> opcone::Result<()> {
    let k = UnitalSpace::standard(2);
    let mut r = linalg::rng(rep.seed);
    let (mut conclusive, mut certified, mut refuted) = (0, 0, 0);
    for i in 0..200u64 {
        let n = r.gen_range(1..=3);
        let z1 = linalg::random_hermitian(&mut r, n) + CMat::identity(n, n) * c(r.gen_range(0.0..3.0));
        let z2 = linalg::random_hermitian(&mut r, n);
        let zeta = HMatrix::from_coefficients(&k, vec![z1, z2])?;
        let v = matrix::in_min(&zeta, budget, linalg::sub_seed(rep.seed, i))?;
        if v.is_refuted() {
            refuted += 1;
            continue;
        }
        if !(v.is_member() && v.margin >= 1e-6) {
            continue;
        }
        conclusive += 1;
        let d = r.gen_range(2..=5);
        let h = UnitalSpace::standard(d);
        let mut m = CMat::zeros(d, 2);
        m[(0, 0)] = c(1.0);
        let w: Vec<f64> = (1..d).map(|_| linalg::gauss(&mut r)).collect();
        let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let rad: f64 = r.gen();
        for (f, x) in w.iter().enumerate() {
            m[(f + 1, 1)] = c(x * rad / wn);
        }
        let t = MapK::new(&k, &h, m)?;
        if let Ok((image, cert)) = finite::kappa_certificate(&t, &zeta) {
            certified += cert.verify(&image, 1e-9) as usize;
        }
    }
    rep.holds("some elements are conclusively in min", conclusive > 0);
    rep.close("every conclusive min element is certified in max", certified as f64, conclusive as f64, 0.0);
    rep.details = json!({ "conclusive": conclusive, "certified": certified, "refuted": refuted });
    Ok(())
}

fn mass_bound(rep: &mut RunReport) -> opcone::Result<()> {
    let sp = UnitalSpace::standard(4);
    let s = StatePoint::from_real(&sp, &[0.0, 0.6, 0.0, 0.8], 1e-12)?;
    let m = states::mu_s(&s)?;
    let chain = states::mass_bounds(&m, 0)?;
    rep.close("μ_s(s) = 1/2", chain.mass, 0.5, 1e-15);
    rep.close("(1 + ‖s₀‖²)⁻¹ = 1/2 at ‖s₀‖ = 1", chain.mass_bound, 0.5, 1e-15);
    rep.holds("mass chain holds for μ_s", chain.holds(1e-12));
    let mut r = linalg::rng(rep.seed);
    let mut worst: f64 = f64::INFINITY;
    let mut atoms = 0;
    for _ in 0..50 {
        let d = r.gen_range(2..=6);
        let mu = states::random_unital_measure(&UnitalSpace::standard(d), r.gen_range(1..=6), &mut r);
        for a in 0..mu.len() {
            let ch = states::mass_bounds(&mu, a)?;
            atoms += 1;
            worst = worst.min(ch.mass_bound - ch.mass);
            rep.holds(&format!("chain at atom {a} of a {}-atom measure", mu.len()), ch.holds(1e-9));
        }
    }
    rep.at_least("μ(s) ≤ (1 + ‖s₀‖²)⁻¹ on every atom", worst, -1e-12);
    rep.details = json!({ "atoms": atoms, "smallest_slack": worst, "chain": chain.links() });
    Ok(())
}

fn pietsch_bound(rep: &mut RunReport) -> opcone::Result<()> {
    let bound = 2.0 * 2f64.sqrt();
    let mut r = linalg::rng(rep.seed);
    let (mut ratio, mut upper, mut recon): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..50u64 {
        let h = UnitalSpace::standard(r.gen_range(2..=5));
        let t = supports::random_unital_positive_map(&h, r.gen_range(3..=7), &mut r);
        let k = supports::extract_support(&t)?;
        ratio = ratio.max(pietsch::domination_ratio(&t, k.measure(), 1000, i));
        upper = upper.max(pietsch::summing_norm_lp(&t, 64, i)?.upper);
        recon = recon.max(pietsch::factorize(&t)?.reconstruct().distance(&t));
    }
    rep.at_most("‖Tv‖ ≤ 2√2 ∫|v| dμ", ratio, bound);
    rep.at_most("π(T) LP upper bound ≤ 2√2", upper, bound + 1e-6);
    rep.at_most("T₂ ι T₁ = T", recon, 1e-9);
    let t = linalg::random_cmat(&mut r, 4, 3);
    let hb = pietsch::hilbert_summing(&t, 2000, rep.seed);
    rep.at_most("Hilbert case: ‖T‖₂ ≤ π(T) upper", hb.lower, hb.upper + 1e-12);
    rep.at_most("Hilbert case: π(T) ≤ √3 ‖T‖₂", hb.upper, 3f64.sqrt() * hb.hs + 1e-12);
    rep.details = json!({ "max_ratio": ratio, "max_lp_upper": upper, "hilbert": {"hs": hb.hs, "upper": hb.upper, "monte_carlo": hb.monte_carlo} });
    Ok(())
}
