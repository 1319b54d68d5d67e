use super::{Classification, ScalarQOper, ScanConfig, SingularityReport};
use super::minors::{delta_r, delta_r_at, t_km};
use crate::numkernel::Polynomial;
use crate::{C64, Error, Result};
use std::collections::BTreeMap;

/// Offsets j (with multiplicities) such that q^j s is a zero of p, detected
/// from the roots of p. Detection scans exponents up to 2*window and errors
/// if a zero sits beyond the configured window, where the scan cannot certify
/// the escape condition.
pub fn orbit_zero_offsets(
    p: &Polynomial,
    s: C64,
    q: C64,
    scan: &ScanConfig,
) -> Result<BTreeMap<i64, usize>> {
    let mut out = BTreeMap::new();
    if p.degree().unwrap_or(0) == 0 {
        return Ok(out);
    }
    let roots = p.roots(scan.tol.zero_tol.max(1e-11))?;
    let lq = q.norm().ln();
    for z in roots {
        if z.norm() == 0.0 {
            continue;
        }
        let ratio = z / s;
        let j0 = (ratio.norm().ln() / lq).round() as i64;
        let mut found = None;
        for j in (j0 - 2)..=(j0 + 2) {
            let qj = q.powi(j as i32);
            if (ratio - qj).norm() <= 1e-6 * qj.norm() {
                found = Some(j);
                break;
            }
        }
        if let Some(j) = found {
            if j.abs() > scan.window {
                return Err(Error::Window(format!(
                    "zero on the q-orbit at offset {j} beyond window {}",
                    scan.window
                )));
            }
            *out.entry(j).or_insert(0) += 1;
        }
    }
    Ok(out)
}

fn offsets_match(
    map: &BTreeMap<i64, usize>,
    expected: &[(i64, usize)],
) -> std::result::Result<(), String> {
    let want: BTreeMap<i64, usize> = expected.iter().copied().collect();
    if *map == want {
        Ok(())
    } else {
        Err(format!("zero pattern {map:?}, expected {want:?}"))
    }
}

fn inconclusive(point: C64, witness: String, window: (i64, i64)) -> SingularityReport {
    SingularityReport {
        point,
        classification: Classification::Inconclusive,
        witness,
        window,
    }
}

/// Second-order criterion: under simple zeroes of a_0 at s and of a_2 at
/// q^-r s (and no other zeroes on the orbit), the pair (s, q^-r s) is
/// apparent iff Delta_r(s) = 0.
pub fn is_apparent_2nd(
    l: &ScalarQOper,
    s: C64,
    r: usize,
    scan: &ScanConfig,
) -> Result<SingularityReport> {
    let window = (0i64, r as i64);
    if l.order() != 2 {
        return Err(Error::InvalidInput("criterion requires order 2".into()));
    }
    if r == 0 {
        return Err(Error::InvalidInput("criterion requires r >= 1".into()));
    }
    let offs0 = orbit_zero_offsets(l.a(0), s, l.q, scan)?;
    let offs2 = orbit_zero_offsets(l.a(2), s, l.q, scan)?;
    if let Err(w) = offsets_match(&offs0, &[(0, 1)]) {
        return Ok(inconclusive(s, format!("a_0 {w}"), window));
    }
    if let Err(w) = offsets_match(&offs2, &[(-(r as i64), 1)]) {
        return Ok(inconclusive(s, format!("a_2 {w}"), window));
    }
    let dr = delta_r(l, r)?;
    let val = delta_r_at(l, r, s)?;
    let scale = dr.eval_scale(s).max(1e-300);
    let vanish = val.norm() <= scan.tol.zero_tol * scale;
    Ok(SingularityReport {
        point: s,
        classification: if vanish {
            Classification::Apparent
        } else {
            Classification::NotApparent
        },
        witness: format!("|Delta_r(s)|/scale = {:.3e}", val.norm() / scale),
        window,
    })
}

/// n-th order criterion with the two-block zero pattern: a_0 simple zeroes at
/// q^-j s (0 <= j <= t), a_n simple zeroes at q^-j s (r-t <= j <= r). The
/// points are apparent iff t_k^(r+1-j)(q^(1-j) x) are holomorphic at s for
/// 1 <= j <= t+1, 1 <= k <= n.
pub fn is_apparent_nth(
    l: &ScalarQOper,
    s: C64,
    r: i64,
    t: i64,
    scan: &ScanConfig,
) -> Result<SingularityReport> {
    let window = (0i64, r);
    if !(0 <= t && t < r) {
        return Err(Error::InvalidInput("need 0 <= t < r".into()));
    }
    let n = l.order() as i64;
    let offs0 = orbit_zero_offsets(l.a(0), s, l.q, scan)?;
    let offsn = orbit_zero_offsets(l.a(l.order()), s, l.q, scan)?;
    let want0: Vec<(i64, usize)> = (0..=t).map(|j| (-j, 1)).collect();
    let wantn: Vec<(i64, usize)> = ((r - t)..=r).map(|j| (-j, 1)).collect();
    if let Err(w) = offsets_match(&offs0, &want0) {
        return Ok(inconclusive(s, format!("a_0 {w}"), window));
    }
    if let Err(w) = offsets_match(&offsn, &wantn) {
        return Ok(inconclusive(s, format!("a_n {w}"), window));
    }
    for j in 1..=(t + 1) {
        for k in 1..=n {
            let minor = t_km(l, r + 1 - j, k).scale_arg(l.q.powi(1 - j as i32));
            if !minor.holomorphic_at(s, scan.tol.zero_tol)? {
                return Ok(SingularityReport {
                    point: s,
                    classification: Classification::NotApparent,
                    witness: format!("t_{k}^({}) has a pole at s (row j = {j})", r + 1 - j),
                    window,
                });
            }
        }
    }
    Ok(SingularityReport {
        point: s,
        classification: Classification::Apparent,
        witness: "all minor entries holomorphic".into(),
        window,
    })
}

/// Sufficient special case used for Miura opers: a_0 with simple zeroes at
/// q^-j s (0 <= j <= n-2), a_n at q^-j s (1 <= j <= n-1). Returns Apparent
/// when conditions (i)-(iii) hold, otherwise Inconclusive (the criterion is
/// one-directional).
pub fn is_apparent_special(
    l: &ScalarQOper,
    s: C64,
    scan: &ScanConfig,
) -> Result<SingularityReport> {
    let n = l.order() as i64;
    let window = (0i64, n - 1);
    if n < 2 {
        return Err(Error::InvalidInput("criterion requires order >= 2".into()));
    }
    let offs0 = orbit_zero_offsets(l.a(0), s, l.q, scan)?;
    let offsn = orbit_zero_offsets(l.a(l.order()), s, l.q, scan)?;
    let want0: Vec<(i64, usize)> = (0..=(n - 2)).map(|j| (-j, 1)).collect();
    let wantn: Vec<(i64, usize)> = (1..=(n - 1)).map(|j| (-j, 1)).collect();
    if let Err(w) = offsets_match(&offs0, &want0) {
        return Ok(inconclusive(s, format!("a_0 {w}"), window));
    }
    if let Err(w) = offsets_match(&offsn, &wantn) {
        return Ok(inconclusive(s, format!("a_n {w}"), window));
    }

    // (i) t_k holomorphic at q^-j s for the non-exempt a_0-zero offsets
    for k in 1..n {
        for j in 0..=(n - 2) {
            if j == n - k || j == n - k - 1 {
                continue;
            }
            let tk = l.t(k);
            if !tk.holomorphic_at(s * l.q.powi(-j as i32), scan.tol.zero_tol)? {
                return Ok(inconclusive(
                    s,
                    format!("condition (i) fails: t_{k} has a pole at q^-{j} s"),
                    window,
                ));
            }
        }
    }
    // (ii) t_k(q^(-n+1) s) = 0 for 2 <= k <= n-1; a_0 does not vanish there,
    // so this is a zero of a_k
    let pt = s * l.q.powi(1 - n as i32);
    for k in 2..n {
        if l.a(k as usize).vanishing_order(pt, scan.tol.zero_tol) == 0 {
            return Ok(inconclusive(
                s,
                format!("condition (ii) fails: t_{k}(q^(-n+1) s) != 0"),
                window,
            ));
        }
    }
    // (iii) the 2x2 minors t_k(q^(-n+k+1) x) t_1(q^(-n+1) x) - t_{k+1}(q^(-n+k+1) x)
    for k in 1..n {
        let shift_k = l.q.powi((-n + k + 1) as i32);
        let shift_1 = l.q.powi((-n + 1) as i32);
        let det = &(&l.t(k).scale_arg(shift_k) * &l.t(1).scale_arg(shift_1))
            - &l.t(k + 1).scale_arg(shift_k);
        if !det.holomorphic_at(s, scan.tol.zero_tol)? {
            return Ok(inconclusive(
                s,
                format!("condition (iii) fails: minor k = {k} has a pole at s"),
                window,
            ));
        }
    }
    Ok(SingularityReport {
        point: s,
        classification: Classification::Apparent,
        witness: "conditions (i)-(iii) hold".into(),
        window,
    })
}

/// Definition-level oracle: form the product A(q^N x) ... A(q^-N' x) with the
/// minimal window escaping all orbit zeroes of a_0 and a_n, and decide
/// regularity at s by vanishing-order bookkeeping of the polynomial matrix
/// product (entries holomorphic, determinant nonzero).
pub fn brute_force_apparent(
    l: &ScalarQOper,
    s: C64,
    scan: &ScanConfig,
) -> Result<SingularityReport> {
    let offs0 = orbit_zero_offsets(l.a(0), s, l.q, scan)?;
    let offsn = orbit_zero_offsets(l.a(l.order()), s, l.q, scan)?;

    if offs0.get(&0).copied().unwrap_or(0) == 0 && offsn.get(&0).copied().unwrap_or(0) == 0 {
        return Err(Error::Hypothesis(
            "not a singularity: neither a_0 nor a_n vanishes at the point".into(),
        ));
    }

    let all_offsets: Vec<i64> = offs0.keys().chain(offsn.keys()).copied().collect();
    let nplus = all_offsets.iter().copied().max().unwrap_or(0).max(0);
    let nminus = (-all_offsets.iter().copied().min().unwrap_or(0)).max(0);
    if nplus + nminus > 64 {
        return Err(Error::Window(format!(
            "product chain length {} too large",
            nplus + nminus + 1
        )));
    }

    // chain product of the denominator-cleared companion matrices
    let mut prod: Option<Vec<Vec<Polynomial>>> = None;
    for j in (-nminus..=nplus).rev() {
        let factor = cleared_companion(l, l.q.powi(j as i32));
        prod = Some(match prod {
            None => factor,
            Some(p) => polymat_mul(&p, &factor),
        });
    }
    let prod = prod.unwrap();

    // vanishing order of the common denominator prod_j a_0(q^j x) at s
    let ord_of = |offs: &BTreeMap<i64, usize>| -> usize {
        offs.iter()
            .filter(|(j, _)| -nminus <= **j && **j <= nplus)
            .map(|(_, m)| *m)
            .sum()
    };
    let ord_den = ord_of(&offs0);
    let ord_an = ord_of(&offsn);

    for (i, row) in prod.iter().enumerate() {
        for (k, entry) in row.iter().enumerate() {
            if entry.is_zero() {
                continue;
            }
            let ord = entry.vanishing_order(s, scan.tol.zero_tol);
            if ord < ord_den {
                return Ok(SingularityReport {
                    point: s,
                    classification: Classification::NotApparent,
                    witness: format!(
                        "entry ({},{}) has a pole of order {} at s",
                        i + 1,
                        k + 1,
                        ord_den - ord
                    ),
                    window: (nplus, nminus),
                });
            }
        }
    }
    // invertibility: det of the chain is prod_j a_n(q^j x)/a_0(q^j x)
    if ord_an != ord_den {
        return Ok(SingularityReport {
            point: s,
            classification: Classification::NotApparent,
            witness: format!(
                "determinant order {} at s (zero or pole)",
                ord_an as i64 - ord_den as i64
            ),
            window: (nplus, nminus),
        });
    }
    Ok(SingularityReport {
        point: s,
        classification: Classification::Apparent,
        witness: "product regular at s".into(),
        window: (nplus, nminus),
    })
}

/// a_0(q^j x) * A(q^j x) as a polynomial matrix, rescaled to unit max
/// coefficient norm (orders at a point are scale-invariant).
fn cleared_companion(l: &ScalarQOper, shift: C64) -> Vec<Vec<Polynomial>> {
    let n = l.order();
    let mut m = vec![vec![Polynomial::zero(); n]; n];
    for k in 1..=n {
        let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
        m[0][k - 1] = l.a(k).scale_arg(shift).mul_scalar(C64::new(sign, 0.0));
    }
    let a0s = l.a(0).scale_arg(shift);
    for i in 1..n {
        m[i][i - 1] = a0s.clone();
    }
    let scale = m
        .iter()
        .flatten()
        .map(|p| p.norm_max())
        .fold(0.0, f64::max)
        .max(1e-300);
    let inv = C64::new(1.0 / scale, 0.0);
    for row in m.iter_mut() {
        for p in row.iter_mut() {
            *p = p.mul_scalar(inv);
        }
    }
    m
}

fn polymat_mul(a: &[Vec<Polynomial>], b: &[Vec<Polynomial>]) -> Vec<Vec<Polynomial>> {
    let n = a.len();
    let mut out = vec![vec![Polynomial::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[k][j].is_zero() {
                    continue;
                }
                out[i][j] = &out[i][j] + &(&a[i][k] * &b[k][j]);
            }
        }
    }
    out
}
