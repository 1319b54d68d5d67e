use super::{guarded_div, BetheConfig, ToroidalParams};
use crate::numkernel::{Polynomial, RationalFunction};
use crate::qoper::ScalarQOper;
use crate::{C64, Error, Result};

/// Oper built from Bethe roots with its Miura data and assembly diagnostics.
#[derive(Debug, Clone)]
pub struct VermaOper {
    pub oper: ScalarQOper,
    pub b1: RationalFunction,
    pub b2: RationalFunction,
    /// relative remainders of clearing a_1 and a_2 to polynomials
    pub clearing_residual_a1: f64,
    pub clearing_residual_a2: f64,
}

/// Miura factor b_1(x) = y_1(q2 x)/y_1(x).
fn miura_b1(cfg: &BetheConfig, params: &ToroidalParams) -> RationalFunction {
    let y1 = cfg.y1();
    RationalFunction {
        num: y1.scale_arg(params.q2()),
        den: y1,
    }
}

/// Miura factor b_2, written in the shifted frame
/// b_2(x) = p1^-1 q2^(l1-l0) Psi_1(q2 x) (y_1(x)/y_1(q2 x)) *
///          (y_0(q1^-1 q2 x) y_0(q3^-1 q2 x))/(y_0(q1 q2 x) y_0(q3 q2 x)).
fn miura_b2(cfg: &BetheConfig, params: &ToroidalParams) -> RationalFunction {
    let (q1, q2, q3) = (params.q1(), params.q2(), params.q3());
    let y0 = cfg.y0();
    let y1 = cfg.y1();
    let kb = params.q2().powi(cfg.l1() as i32 - cfg.l0() as i32) / params.p1;
    let psi1_shift = params.psi1().scale_arg(q2);
    let num = &(&y1 * &y0.scale_arg(q2 / q1)) * &y0.scale_arg(q2 / q3);
    let den = &(&y1.scale_arg(q2) * &y0.scale_arg(q1 * q2)) * &y0.scale_arg(q3 * q2);
    &psi1_shift.mul_scalar(kb) * &RationalFunction { num, den }
}

/// a_0(x) = p1 q2^(l0-l1+1) (x - qlam x1 / q2) prod_j (x - q1 s_j)(x - q3 s_j).
fn verma_a0(cfg: &BetheConfig, params: &ToroidalParams) -> Polynomial {
    let (q1, q2, q3) = (params.q1(), params.q2(), params.q3());
    let scalar = params.p1 * q2.powi(cfg.l0() as i32 - cfg.l1() as i32 + 1);
    let mut roots = vec![params.qlam() * params.x1() / q2];
    for &s in &cfg.s {
        roots.push(q1 * s);
        roots.push(q3 * s);
    }
    Polynomial::from_roots(&roots, scalar)
}

/// Build the second-order oper annihilating y_1 from Bethe data:
/// L = a_0 (sigma - b_2)(sigma - b_1), with a_1 = a_0 (b_1(q2 x) + b_2(x))
/// cleared to a polynomial (which requires the second Bethe family to hold)
/// and a_2 = a_0 b_1 b_2 (an exact rational identity).
pub fn oper_from_roots(cfg: &BetheConfig, params: &ToroidalParams) -> Result<VermaOper> {
    let q2 = params.q2();
    let a0 = verma_a0(cfg, params);
    let b1 = miura_b1(cfg, params);
    let b2 = miura_b2(cfg, params);

    let a0_rat = RationalFunction::from_poly(a0.clone());
    let sum = &b1.scale_arg(q2) + &b2;
    let (a1, res_a1) = (&a0_rat * &sum).clear_to_poly()?;
    if res_a1 > 1e-6 {
        return Err(Error::Degenerate(format!(
            "a_1 does not clear to a polynomial (relative remainder {res_a1:.3e}); \
             second Bethe family violated"
        )));
    }
    let (a2, res_a2) = (&(&a0_rat * &b1) * &b2).clear_to_poly()?;
    let a1 = a1.trim_eps(1e-12 * a1.norm_max());
    let a2 = a2.trim_eps(1e-12 * a2.norm_max());
    let oper = ScalarQOper::new(q2, vec![a0, a1, a2])?;
    Ok(VermaOper {
        oper,
        b1,
        b2,
        clearing_residual_a1: res_a1,
        clearing_residual_a2: res_a2,
    })
}

/// Closed-form endpoint coefficients of a_1 in the q2^-1 x frame, re-derived
/// from the factorized product at 0 and infinity (construction audit).
pub fn a1_endpoints_closed_form(cfg: &BetheConfig, params: &ToroidalParams) -> (C64, C64) {
    let q2 = params.q2();
    let (l0, l1) = (cfg.l0() as i32, cfg.l1() as i32);
    let lead = params.p1 * q2.powi(-l0) + q2.powi(-l1) * params.qlam();
    let prod_s2: C64 = cfg.s.iter().map(|&s| s * s).product();
    let constant =
        -(params.p1 * q2.powi(-l1) * params.qlam() + q2.powi(-l0)) * params.x1() * prod_s2;
    (lead, constant)
}

/// Residual data for the eliminated zeroth Bethe equation in its four
/// equivalent displayed forms, per root s_i (all normalized symmetrically).
#[derive(Debug, Clone)]
pub struct FourFormResiduals {
    pub form1: Vec<f64>,
    pub form2: Vec<f64>,
    pub form3: Vec<f64>,
    pub form4: Vec<f64>,
}

impl FourFormResiduals {
    pub fn max(&self) -> f64 {
        self.form1
            .iter()
            .chain(&self.form2)
            .chain(&self.form3)
            .chain(&self.form4)
            .fold(0.0f64, |a, &b| a.max(b))
    }
}

fn sym_residual(lhs: C64, rhs: C64) -> f64 {
    (lhs - rhs).norm() / (lhs.norm() + rhs.norm()).max(1e-300)
}

/// Evaluate the eliminated (BE0) in the four equivalent forms on a given
/// oper. Form 1 uses a_2/a_1 at q1 s, q3 s; form 2 uses a_1/a_0 at
/// q2^-1 q1 s, q2^-1 q3 s; forms 3 and 4 are the p0 p1 variants with a_1
/// ratios only.
pub fn p0ss_residuals(
    cfg: &BetheConfig,
    params: &ToroidalParams,
    oper: &ScalarQOper,
) -> Result<FourFormResiduals> {
    let (q1, q2, q3) = (params.q1(), params.q2(), params.q3());
    let (l0, l1) = (cfg.l0() as i32, cfg.l1() as i32);
    let psi0 = params.psi0();
    let a0 = oper.a(0);
    let a1 = oper.a(1);
    let a2 = oper.a(2);
    let q2mu_inv = params.q2_neg_mu();
    let q3i = C64::new(1.0, 0.0) / q3;
    let q1i = C64::new(1.0, 0.0) / q1;

    let prod_ratio = |si: C64, c: C64| -> Result<C64> {
        let mut acc = C64::new(1.0, 0.0);
        for &sj in &cfg.s {
            acc *= guarded_div(c * si - sj, si - c * sj, "eliminated-(BE0) product")?;
        }
        Ok(acc)
    };

    let mut out = FourFormResiduals {
        form1: Vec::new(),
        form2: Vec::new(),
        form3: Vec::new(),
        form4: Vec::new(),
    };
    for &si in &cfg.s {
        let p2 = prod_ratio(si, q2)?;
        let psi0v = psi0.eval(si, 1e-12)?;

        // form 1
        let lhs = params.p0 * p2;
        let r_a2a1 = guarded_div(a2.eval(q1 * si), a1.eval(q1 * si), "a2/a1 at q1 s")?
            * guarded_div(a2.eval(q3 * si), a1.eval(q3 * si), "a2/a1 at q3 s")?;
        let rhs = -q2.powi(-l1) * psi0v * r_a2a1;
        out.form1.push(sym_residual(lhs, rhs));

        // form 2
        let u1 = q1 * si / q2;
        let u3 = q3 * si / q2;
        let r_a1a0 = guarded_div(a1.eval(u1), a0.eval(u1), "a1/a0 at q2^-1 q1 s")?
            * guarded_div(a1.eval(u3), a0.eval(u3), "a1/a0 at q2^-1 q3 s")?;
        let rhs2 = -q2.powi(-l1) * psi0v * r_a1a0;
        out.form2.push(sym_residual(lhs, rhs2));

        // form 3 (the q3^2 variant)
        let p3 = prod_ratio(si, q3 * q3)?;
        let lhs3 = params.p0 * params.p1 * p3;
        let f3sc = q3.powi(-2 * l0 - 1);
        let rhs3 = -f3sc * guarded_div(a1.eval(u3), a1.eval(q1 * si), "a1 ratio form 3")?;
        out.form3.push(sym_residual(lhs3, rhs3));

        // form 4 (the q1^2 variant with explicit weight factors)
        let p4 = prod_ratio(si, q1 * q1)?;
        let lhs4 = params.p0 * params.p1 * p4;
        let f4sc = q3.powi(l0 + 1) * q1.powi(-l0 - 2);
        let rat = guarded_div(
            (si - q3i * q2mu_inv) * (si - q1 * q3i * q3i),
            (si - q1i * q2mu_inv) * (si - q3i),
            "form 4 weight factors",
        )?;
        let rhs4 =
            -f4sc * rat * guarded_div(a1.eval(u1), a1.eval(q3 * si), "a1 ratio form 4")?;
        out.form4.push(sym_residual(lhs4, rhs4));
    }
    Ok(out)
}

/// The top q-hypergeometric oper (l_0 = 0 relaxed ansatz):
/// a_0 = p1 q2^(-nu+1) (x - qlam x1/q2), a_1 with both ends pinned,
/// a_2 = q2 (qlam x - x1/q2).
pub fn top_oper(params: &ToroidalParams) -> Result<ScalarQOper> {
    let q2 = params.q2();
    let (qlam, x1) = (params.qlam(), params.x1());
    let q2nu = params.q2nu;
    let one = C64::new(1.0, 0.0);
    let a0 = Polynomial::new(vec![-qlam * x1 / q2, one]).mul_scalar(params.p1 * q2 / q2nu);
    let a1 = Polynomial::new(vec![
        -(params.p1 * qlam / q2nu + one) * x1,
        params.p1 * q2 + q2 * qlam / q2nu,
    ]);
    let a2 = Polynomial::new(vec![-x1 / q2, qlam]).mul_scalar(q2);
    ScalarQOper::new(q2, vec![a0, a1, a2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe_gl2::{bethe_residuals, random_params, solve_bethe_system};
    use crate::qoper::{brute_force_apparent, delta_r, Classification, ScanConfig};
    use crate::testkit::cr;

    fn solved_instance(seed: u64) -> (ToroidalParams, BetheConfig) {
        let mut rng = crate::testkit::rng(seed);
        loop {
            let params = random_params(&mut rng);
            match solve_bethe_system(&params, 1, 1, 200, seed) {
                Ok(sols) if !sols.is_empty() => return (params, sols[0].clone()),
                _ => continue,
            }
        }
    }

    #[test]
    fn factorization_annihilates_y1() {
        let (params, cfg) = solved_instance(501);
        let built = oper_from_roots(&cfg, &params).unwrap();
        assert!(built.clearing_residual_a1 < 1e-9, "{}", built.clearing_residual_a1);
        let y1 = cfg.y1();
        let image = built.oper.apply(&y1);
        let scale = built.oper.a(0).norm_max() * y1.norm_max();
        assert!(
            image.norm_max() <= 1e-9 * scale,
            "L y_1 = {:.3e} (scale {scale:.3e})",
            image.norm_max()
        );
    }

    #[test]
    fn a1_endpoints_match_factorized_rederivation() {
        let (params, cfg) = solved_instance(502);
        let built = oper_from_roots(&cfg, &params).unwrap();
        // convert the assembled x-frame a_1 into the q2^-1 x frame
        let a1_shift = built.oper.a(1).scale_arg(C64::new(1.0, 0.0) / params.q2());
        let (lead, constant) = a1_endpoints_closed_form(&cfg, &params);
        let deg = 2 * cfg.l0() + 1;
        assert_eq!(a1_shift.degree(), Some(deg));
        assert!(
            (a1_shift.coeff(deg) - lead).norm() <= 1e-9 * lead.norm(),
            "lead {} vs {}",
            a1_shift.coeff(deg),
            lead
        );
        assert!(
            (a1_shift.coeff(0) - constant).norm() <= 1e-9 * constant.norm(),
            "constant {} vs {}",
            a1_shift.coeff(0),
            constant
        );
    }

    #[test]
    fn delta1_vanishes_at_designed_points() {
        let (params, cfg) = solved_instance(503);
        let built = oper_from_roots(&cfg, &params).unwrap();
        let d1 = delta_r(&built.oper, 1).unwrap();
        for &s in &cfg.s {
            for pt in [params.q1() * s, params.q3() * s] {
                let v = d1.eval(pt).norm();
                let scale = d1.eval_scale(pt).max(1e-300);
                assert!(v <= 1e-8 * scale, "Delta_1 = {:.3e} at {pt}", v / scale);
            }
        }
    }

    #[test]
    fn designed_points_brute_force_apparent() {
        let (params, cfg) = solved_instance(504);
        let built = oper_from_roots(&cfg, &params).unwrap();
        let scan = ScanConfig::default();
        for &s in &cfg.s {
            for pt in [params.q1() * s, params.q3() * s] {
                let rep = brute_force_apparent(&built.oper, pt, &scan).unwrap();
                assert_eq!(rep.classification, Classification::Apparent, "{}", rep.witness);
            }
        }
    }

    #[test]
    fn four_forms_vanish_on_solutions_and_not_on_probes() {
        let (params, cfg) = solved_instance(505);
        let built = oper_from_roots(&cfg, &params).unwrap();
        let forms = p0ss_residuals(&cfg, &params, &built.oper).unwrap();
        assert!(forms.max() < 1e-8, "residuals {forms:?}");

        // keep the BE1-satisfying t but move s: BE1 breaks too (it involves s),
        // so re-solve BE1 alone for the probing配置 is not required here;
        // a genuinely random s with the original t must violate the forms
        let mut rng = crate::testkit::rng(5050);
        let mut probe = cfg.clone();
        probe.s = vec![crate::testkit::random_point(&mut rng, 0.5, 2.0)];
        // re-solve the second family for the probe s so a_1 still clears
        let f = |z: &[C64]| -> crate::Result<Vec<C64>> {
            let c = BetheConfig {
                s: probe.s.clone(),
                t: z.to_vec(),
            };
            Ok(bethe_residuals(&c, &params)?[probe.s.len()..].to_vec())
        };
        let opts = crate::bethe_gl2::MultistartOptions {
            starts: 100,
            seed: 777,
            ..Default::default()
        };
        let tsols = crate::bethe_gl2::multistart_newton(&f, 1, &opts);
        assert!(!tsols.is_empty());
        probe.t = tsols[0].clone();
        let built_probe = oper_from_roots(&probe, &params).unwrap();
        let forms_probe = p0ss_residuals(&probe, &params, &built_probe.oper).unwrap();
        assert!(
            forms_probe.form1.iter().all(|&r| r > 1e-3),
            "expected O(1) residuals on generic s: {forms_probe:?}"
        );
        // the four verdicts agree: all large together
        assert!(forms_probe.form2.iter().all(|&r| r > 1e-3));
        assert!(forms_probe.form3.iter().all(|&r| r > 1e-3));
        assert!(forms_probe.form4.iter().all(|&r| r > 1e-3));
    }

    #[test]
    fn top_oper_expansion_matches_factorized_form() {
        let mut rng = crate::testkit::rng(506);
        let params = random_params(&mut rng);
        let l = top_oper(&params).unwrap();
        let q2 = params.q2();
        let (qlam, x1, p1, q2nu) = (params.qlam(), params.x1(), params.p1, params.q2nu);
        let one = cr(1.0);
        // q2^(-nu+1) x (p1 s - qlam)(s - q2^nu) - x1 (p1 q2^-nu qlam s - 1)(s - 1)
        // expanded: s^2, s^1, s^0 coefficient polynomials (sign convention
        // a_0 s^2 - a_1 s + a_2)
        let c2 = |x: C64| q2 / q2nu * x * p1 - x1 * p1 * qlam / q2nu;
        let c1 = |x: C64| {
            -(q2 / q2nu * x * (p1 * q2nu + qlam)) + x1 * (p1 * qlam / q2nu + one)
        };
        let c0 = |x: C64| q2 / q2nu * x * qlam * q2nu - x1;
        for k in 0..6 {
            let x = C64::from_polar(0.6 + 0.2 * k as f64, 0.7 * k as f64);
            assert!((l.a(0).eval(x) - c2(x)).norm() <= 1e-12 * (1.0 + c2(x).norm()));
            assert!((l.a(1).eval(x) + c1(x)).norm() <= 1e-12 * (1.0 + c1(x).norm()));
            assert!((l.a(2).eval(x) - c0(x)).norm() <= 1e-12 * (1.0 + c0(x).norm()));
        }
    }
}
