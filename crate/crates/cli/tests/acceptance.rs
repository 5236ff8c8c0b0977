//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the verdict lines are always printed.

use std::process::{Command, ExitCode};
use std::time::Instant;

use beltrami_core::charts::{christoffel_at, compatibility_residual, metric_at};
use beltrami_core::expr::{parse, random_expr};
use beltrami_core::identities::{product_construction, random_field, spherical_null_field, FieldKind};
use beltrami_core::jets::FdStep;
use beltrami_core::oracles::{divergence_delta2, stencil_fits};
use beltrami_core::{
    beltrami::compose, builtin_chart, check_identity, delta1, delta2, extended, AnalyticFn, Chart, ChartKind,
    CheckConfig, Expr, IdentityId, PointGeometry, PsiVariant, ScalarField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn chart(kind: ChartKind, dim: usize) -> Chart {
    builtin_chart(kind, dim).expect("builtin chart")
}

fn builtins() -> Vec<Chart> {
    let mut charts = vec![
        chart(ChartKind::Euclidean, 2),
        chart(ChartKind::Euclidean, 3),
        chart(ChartKind::Polar2, 2),
        chart(ChartKind::Spherical3, 3),
    ];
    charts.extend((2..=8).map(|n| chart(ChartKind::Hyperspherical, n)));
    charts
}

fn config(samples: usize, tol: f64, psi: PsiVariant) -> CheckConfig {
    CheckConfig {
        seed: 42,
        samples,
        tol,
        psi,
    }
}

fn identity_suite() -> Outcome {
    use IdentityId::*;
    let ids = [Prop1, Prop2, Eq10, Prop3, Eq12, Thm1, Prop4, Prop5, Eq17, Thm2, Lemma1, Eq22, Eq23];
    let charts = [
        chart(ChartKind::Euclidean, 2),
        chart(ChartKind::Euclidean, 3),
        chart(ChartKind::Polar2, 2),
        chart(ChartKind::Spherical3, 3),
        chart(ChartKind::Hyperspherical, 4),
    ];
    let mut worst = 0.0f64;
    for id in ids {
        for c in &charts {
            let r = check_identity(id, c, &config(200, 1e-9, PsiVariant::Corrected)).map_err(|e| e.to_string())?;
            ensure(r.pass, || format!("{id} on {} residual {:e}", c.name(), r.max_abs_residual))?;
            worst = worst.max(r.max_abs_residual);
        }
    }
    Ok(format!("13 identities x 5 charts, worst residual {worst:.1e}"))
}

fn spherical_harmonics() -> Outcome {
    let sph = chart(ChartKind::Spherical3, 3);
    let w = spherical_null_field();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = sph.sample_point(&mut rng);
        for f in [AnalyticFn::Identity, AnalyticFn::Square, AnalyticFn::Exp] {
            let field = compose(&f, &w);
            for v in [delta1(&field, &sph, &p), delta2(&field, &sph, &p)] {
                let v = v.map_err(|e| e.to_string())?;
                worst = worst.max(v.norm() / (1.0 + v.norm()));
            }
        }
    }
    ensure(worst < 1e-9, || format!("witness residual {worst:e}"))?;
    let r = check_identity(IdentityId::Eq19And20, &sph, &config(200, 1e-9, PsiVariant::Corrected))
        .map_err(|e| e.to_string())?;
    ensure(r.pass, || format!("eq19_20 residual {:e}", r.max_abs_residual))?;
    Ok(format!("f(e^(-i phi) r sin theta) residual {worst:.1e}; eq19_20 passes"))
}

fn theorem_three() -> Outcome {
    let mut notes = Vec::new();
    for n in [2, 4, 6] {
        let c = chart(ChartKind::Hyperspherical, n);
        let corrected = check_identity(IdentityId::Thm3, &c, &config(200, 1e-9, PsiVariant::Corrected))
            .map_err(|e| e.to_string())?;
        ensure(corrected.pass, || format!("corrected N={n} residual {:e}", corrected.max_abs_residual))?;
        let paper = check_identity(IdentityId::Thm3, &c, &config(200, 1e-9, PsiVariant::Paper))
            .map_err(|e| e.to_string())?;
        if n == 2 {
            ensure(paper.pass, || format!("paper N=2 residual {:e}", paper.max_abs_residual))?;
        } else {
            ensure(!paper.pass && paper.max_abs_residual > 1e-3, || {
                format!("paper N={n} should fail, residual {:e}", paper.max_abs_residual)
            })?;
            notes.push(format!("paper N={n} fails at {:.2}", paper.max_abs_residual));
        }
    }
    Ok(format!("corrected psi passes for N=2,4,6; paper psi passes N=2; {}", notes.join(", ")))
}

fn proposition_six() -> Outcome {
    let c = chart(ChartKind::Hyperspherical, 4);
    let r = check_identity(IdentityId::Prop6i, &c, &config(200, 1e-8, PsiVariant::Corrected)).map_err(|e| e.to_string())?;
    ensure(r.pass, || format!("prop6i residual {:e}", r.max_abs_residual))?;
    let mut worst = [0.0f64; 2];
    let cases = [
        (vec![AnalyticFn::Identity, AnalyticFn::Identity], 1e-9),
        (vec![AnalyticFn::Square, AnalyticFn::Exp], 1e-8),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let p = c.sample_point(&mut rng);
        for (slot, (fs, _)) in cases.iter().enumerate() {
            let g = product_construction(fs, 4, PsiVariant::Corrected).map_err(|e| e.to_string())?;
            let v = extended::delta1(&g, &c, &p).map_err(|e| e.to_string())?;
            worst[slot] = worst[slot].max(v.norm() / (1.0 + v.norm()));
        }
    }
    for (slot, (fs, tol)) in cases.iter().enumerate() {
        ensure(worst[slot] < *tol, || format!("product {fs:?} residual {:e}", worst[slot]))?;
    }
    Ok(format!(
        "prop6i {:.1e}; products (id,id) {:.1e}, (square,exp) {:.1e}",
        r.max_abs_residual, worst[0], worst[1]
    ))
}

fn geometry_oracles() -> Outcome {
    for n in 2..=8 {
        let c = chart(ChartKind::Hyperspherical, n);
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..50 {
            let p = c.sample_point(&mut rng);
            let g = metric_at(&c, &p).map_err(|e| e.to_string())?.g;
            let mut diag = p[0] * p[0];
            for i in 0..n {
                let want = if i == 0 { 1.0 } else { diag };
                ensure((g[(i, i)] - want).abs() <= 1e-10 * want, || format!("N={n} g{i}{i} at {p:?}"))?;
                if i >= 1 && i + 1 < n {
                    diag *= p[i].cos().powi(2);
                }
                for k in (0..n).filter(|&k| k != i) {
                    ensure(g[(i, k)].abs() < 1e-10, || format!("N={n} g{i}{k} = {:e}", g[(i, k)]))?;
                }
            }
        }
    }
    let mut worst = 0.0f64;
    for c in builtins() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let p = c.sample_point(&mut rng);
            worst = worst.max(compatibility_residual(&PointGeometry::at(&c, &p).map_err(|e| e.to_string())?));
        }
    }
    ensure(worst < 1e-8, || format!("compatibility residual {worst:e}"))?;
    let polar = chart(ChartKind::Polar2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let p = polar.sample_point(&mut rng);
        let gamma = christoffel_at(&polar, &p).map_err(|e| e.to_string())?.gamma;
        ensure((gamma.get(0, 1, 1) + p[0]).abs() < 1e-9, || format!("Γ^r_θθ at {p:?}"))?;
        ensure((gamma.get(1, 0, 1) - 1.0 / p[0]).abs() < 1e-9, || format!("Γ^θ_rθ at {p:?}"))?;
    }
    Ok(format!("cascade diagonal N=2..8, compatibility {worst:.1e}, polar symbols exact"))
}

fn cross_oracle() -> Outcome {
    let kinds = [FieldKind::Poly, FieldKind::Trig, FieldKind::Mixed];
    let h = 1e-3;
    let (mut div_worst, mut fd_worst) = (0.0f64, 0.0f64);
    for c in builtins() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut checked = 0;
        while checked < 100 {
            let p = c.sample_point(&mut rng);
            let field = random_field(rng.gen(), c.coords(), kinds[rng.gen_range(0..3)]);
            if !stencil_fits(&c, &p, h) {
                continue;
            }
            let a = delta2(&field, &c, &p).map_err(|e| e.to_string())?;
            let b = divergence_delta2(&field, &c, &p, h).map_err(|e| e.to_string())?;
            div_worst = div_worst.max((a - b).norm() / (1.0 + a.norm()));

            let exact = field.eval_jet2(&p).map_err(|e| e.to_string())?;
            let fd = field.fd_jet(&p, FdStep::Auto).map_err(|e| e.to_string())?;
            let scale = 1.0 + exact.max_magnitude();
            for i in 0..c.dim() {
                fd_worst = fd_worst.max((exact.gradient()[i] - fd.gradient()[i]).norm() / scale);
                for j in 0..c.dim() {
                    fd_worst = fd_worst.max((exact.hessian(i, j) - fd.hessian(i, j)).norm() / scale);
                }
            }
            checked += 1;
        }
    }
    ensure(div_worst < 1e-8, || format!("divergence form disagrees by {div_worst:e}"))?;
    ensure(fd_worst < 1e-6, || format!("finite differences disagree by {fd_worst:e}"))?;
    Ok(format!("divergence form {div_worst:.1e}, finite differences {fd_worst:.1e}"))
}

fn chart_invariance() -> Outcome {
    let cart = chart(ChartKind::Euclidean, 3);
    let sph = chart(ChartKind::Spherical3, 3);
    let f = ScalarField::parse("x1^2 + x2^2 + x3^2", cart.coords()).map_err(|e| e.to_string())?;
    let g = ScalarField::parse("r^2", sph.coords()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = delta2(&f, &cart, &cart.sample_point(&mut rng)).map_err(|e| e.to_string())?;
        let b = delta2(&g, &sph, &sph.sample_point(&mut rng)).map_err(|e| e.to_string())?;
        worst = worst.max((a.re - 6.0).abs().max(a.im.abs()));
        worst = worst.max((b.re - 6.0).abs().max(b.im.abs()));
    }
    ensure(worst < 1e-9, || format!("deviation from 6: {worst:e}"))?;
    Ok(format!("Δ2(r²) = 6 in both charts within {worst:.1e}"))
}

fn parser() -> Outcome {
    let coords: Vec<String> = ["r", "theta", "u3"].iter().map(|s| s.to_string()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let e = random_expr(&mut rng, coords.len(), 6);
        let text = e.display(&coords).to_string();
        if parse(&text, &coords).ok().as_ref() != Some(&e) {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} round-trip mismatches"))?;

    let u: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let c = Expr::coord;
    let corpus = [
        ("2*u1^2", Expr::real(2.0) * c(0).powi(2)),
        ("-u1^2", -(c(0).powi(2))),
        ("u1-u2-u3", (c(0) - c(1)) - c(2)),
        ("u1^u2^u3", c(0).pow(c(1).pow(c(2)))),
        ("a/b*c", (c(0) / c(1)) * c(2)),
        ("a+b*c", c(0) + c(1) * c(2)),
        ("(a+b)*c", (c(0) + c(1)) * c(2)),
        ("2^-a", Expr::real(2.0).pow(-c(0))),
        ("-a*b", -c(0) * c(1)),
        ("sin(a)^2", c(0).sin().powi(2)),
    ];
    for (text, want) in corpus {
        let got = parse(text, &u).map_err(|e| format!("{text}: {e}"))?;
        ensure(got == want, || format!("`{text}` parsed as {}", got.display(&u)))?;
    }
    Ok("1000 random trees round-trip, precedence corpus exact".into())
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_beltrami"))
            .args(["verify", "--suite", "all", "--format", "json"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success(), || format!("verify exited {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stderr)))?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || "outputs differ".into())?;
    let rows: serde_json::Value = serde_json::from_slice(&a.stdout).map_err(|e| e.to_string())?;
    Ok(format!("{} rows, {} identical bytes", rows.as_array().map_or(0, Vec::len), a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("identity suite", identity_suite),
        ("spherical harmonics", spherical_harmonics),
        ("theorem 3 adjudication", theorem_three),
        ("proposition 6", proposition_six),
        ("geometry oracles", geometry_oracles),
        ("cross-oracle", cross_oracle),
        ("chart invariance", chart_invariance),
        ("parser", parser),
        ("determinism", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let ms = t.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({ms} ms)", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} ({ms} ms)", k + 1);
            }
        }
    }
    let total = start.elapsed().as_secs_f64();
    println!("acceptance: {} of 9 passed in {total:.1} s", 9 - failed);
    if failed == 0 && total < 60.0 {
        ExitCode::SUCCESS
    } else {
        if total >= 60.0 {
            println!("acceptance: exceeded the 60 s budget");
        }
        ExitCode::FAILURE
    }
}
