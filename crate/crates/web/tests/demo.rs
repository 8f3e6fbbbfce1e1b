use burgers_crit_web::demo;

#[test]
fn catastrophe_of_both_models() {
    let s = demo::catastrophe("standard").unwrap();
    assert!((s[0] - 3f64.sqrt()).abs() < 1e-10 && (s[2] - 0.75).abs() < 1e-12);
    let g = demo::catastrophe("generalized").unwrap();
    assert_eq!(s[..4], g[..4]);
    assert!(g[6] < s[6]);
    assert!(demo::catastrophe("kdv").is_err());
}

#[test]
fn profile_curve_is_odd() {
    let u = demo::profile_curve(1.5, -3.0, 3.0, 61).unwrap();
    assert_eq!(u[30], 0.0);
    for k in 0..30 {
        assert!((u[k] + u[60 - k]).abs() < 1e-8);
    }
    // U decreases in X
    assert!(u.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn viscous_layout_and_agreement_near_catastrophe() {
    let nx = 1200;
    let out = demo::viscous_vs_profile("standard", 0.01, 1.54, nx).unwrap();
    assert_eq!(out.len(), 3 * (nx + 1));
    let (x, rest) = out.split_at(nx + 1);
    let (u, ui) = rest.split_at(nx + 1);
    assert_eq!(x[0], -6.0);
    let i = x.iter().position(|&v| (v - 1.76).abs() < 1e-9).unwrap();
    assert!((u[i] - ui[i]).abs() < 0.06, "{} {}", u[i], ui[i]);
}

#[test]
fn shock_front_starts_at_catastrophe_and_moves_right() {
    let out = demo::shock_front(1.8, 200).unwrap();
    let n = out.len() / 2;
    let (t, x) = out.split_at(n);
    assert!((x[0] - 3f64.sqrt()).abs() < 1e-4);
    assert!((t[n - 1] - 1.8).abs() < 1e-12);
    assert!(x.windows(2).all(|w| w[1] > w[0]));
    assert!(demo::shock_front(1.0, 10).is_err());
}
