//! Adaptive Simpson quadrature for complex-valued integrands.

use num_complex::Complex64;

/// Deepest bisection level allowed below a starting panel.
pub const MAX_DEPTH: u32 = 60;

/// Hard cap on integrand evaluations for a single call.
const MAX_EVALS: usize = 20_000_000;

struct Segment {
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
    (fa + 4.0 * fm + fb) * ((b - a) / 6.0)
}

/// Integrates `f` over `[a, b]` (b may be less than a) split into `panels`
/// equal pieces, each refined adaptively until the Richardson error estimate
/// falls below its share of `abs_tol`.
///
/// On failure the partial sum is returned in `Err` so the caller can report it.
pub fn integrate<F>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    abs_tol: f64,
) -> Result<Complex64, Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut evals = 0usize;
    let mut failed = false;
    let panel_tol = abs_tol / panels as f64;

    let mut stack: Vec<Segment> = Vec::with_capacity(128);
    let mut fa = f(a);
    evals += 1;
    for p in 0..panels {
        let pa = a + width * p as f64;
        let pb = if p + 1 == panels {
            b
        } else {
            a + width * (p + 1) as f64
        };
        let pm = 0.5 * (pa + pb);
        let fm = f(pm);
        let fb = f(pb);
        evals += 2;
        stack.push(Segment {
            a: pa,
            b: pb,
            fa,
            fm,
            fb,
            whole: simpson(pa, pb, fa, fm, fb),
            tol: panel_tol,
            depth: 0,
        });
        fa = fb;

        while let Some(seg) = stack.pop() {
            let m = 0.5 * (seg.a + seg.b);
            let lm = 0.5 * (seg.a + m);
            let rm = 0.5 * (m + seg.b);
            let flm = f(lm);
            let frm = f(rm);
            evals += 2;
            let left = simpson(seg.a, m, seg.fa, flm, seg.fm);
            let right = simpson(m, seg.b, seg.fm, frm, seg.fb);
            let delta = left + right - seg.whole;
            if delta.norm() <= 15.0 * seg.tol || seg.depth >= MAX_DEPTH || evals >= MAX_EVALS {
                if delta.norm() > 15.0 * seg.tol {
                    failed = true;
                }
                total += left + right + delta / 15.0;
                continue;
            }
            let half = 0.5 * seg.tol;
            stack.push(Segment {
                a: m,
                b: seg.b,
                fa: seg.fm,
                fm: frm,
                fb: seg.fb,
                whole: right,
                tol: half,
                depth: seg.depth + 1,
            });
            stack.push(Segment {
                a: seg.a,
                b: m,
                fa: seg.fa,
                fm: flm,
                fb: seg.fm,
                whole: left,
                tol: half,
                depth: seg.depth + 1,
            });
        }
    }
    if failed {
        Err(total)
    } else {
        Ok(total)
    }
}

/// Composite Simpson with a fixed number of panels; used for scale estimates.
pub fn composite<F>(f: F, a: f64, b: f64, panels: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut fa = f(a);
    for p in 0..panels {
        let pa = a + h * p as f64;
        let pb = pa + h;
        let fm = f(0.5 * (pa + pb));
        let fb = f(pb);
        acc += simpson(pa, pb, fa, fm, fb);
        fa = fb;
    }
    acc
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, panels: usize, abs_tol: f64) -> Result<f64, f64>
where
    F: Fn(f64) -> f64,
{
    integrate(|x| Complex64::new(f(x), 0.0), a, b, panels, abs_tol)
        .map(|c| c.re)
        .map_err(|c| c.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let got = integrate_real(|x| x * x * x - 2.0 * x, 0.0, 3.0, 1, 1e-14).unwrap();
        assert!((got - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let fwd = integrate_real(f64::sin, 0.0, 2.0, 4, 1e-12).unwrap();
        let back = integrate_real(f64::sin, 2.0, 0.0, 4, 1e-12).unwrap();
        assert!((fwd + back).abs() < 1e-12);
        assert!((fwd - (1.0 - 2f64.cos())).abs() < 1e-10);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        // int_0^10 e^{i 7 x} dx = (e^{70 i} - 1) / (7 i)
        let got = integrate(|x| Complex64::new(0.0, 7.0 * x).exp(), 0.0, 10.0, 8, 1e-12).unwrap();
        let want = (Complex64::new(0.0, 70.0).exp() - 1.0) / Complex64::new(0.0, 7.0);
        assert!((got - want).norm() < 1e-10);
    }

    #[test]
    fn non_integrable_spike_reports_partial() {
        let res = integrate_real(|x| 1.0 / x.abs().max(1e-300), -1.0, 1.0, 2, 1e-12);
        assert!(res.is_err());
    }
}
