//! Quasi-resonant triad generation on the Rossby-wave dispersion relation.
//!
//! A triad is a set of three integer wave vectors `(k1,l1), (k2,l2), (k3,l3)`
//! that close exactly in wavenumber (`k1+k2=k3`, `l1+l2=l3`) and almost close
//! in frequency: `|w1+w2-w3| < 1/delta` for the dispersion relation
//! `w(k,l) = k/(k^2+l^2)`. Exactly resonant solutions live on an elliptic
//! surface and are reached through a rational parameterization in two
//! auxiliary parameters `(a,b)`: [`hayat_ratios`] evaluates the wave-vector
//! ratios `k1/k3`, `l3/k3`, `l1/k3` at a given `(a,b)`, and [`generate_triads`]
//! scans a rational grid of `(a,b)` values against a range of integer `k3`,
//! rounding the scaled ratios to integers and keeping the candidates that stay
//! quasi-resonant inside the wavenumber box.
//!
//! Grid coordinates are exact rationals; conversion to `f64` happens only
//! inside the ratio evaluation, so grid membership never depends on
//! floating-point drift.

use num_rational::BigRational;
use thiserror::Error;

/// Errors from triad generation and frequency evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriadError {
    /// A denominator factor of the ratio parameterization vanishes at `(a,b)`.
    #[error("ratio parameterization is singular at a={a}, b={b}")]
    SingularParameters { a: BigRational, b: BigRational },
    /// The dispersion relation is undefined at the zero wave vector.
    #[error("dispersion relation evaluated at the zero wave vector")]
    ZeroWaveVector,
    /// The grid was exhausted before enough triads were accepted.
    #[error("grid exhausted after {found} accepted triads, {requested} requested")]
    InsufficientTriads { found: usize, requested: usize },
    /// Rejected generation configuration.
    #[error("invalid triad generation config: {0}")]
    InvalidConfig(String),
}

impl TriadError {
    /// Stable machine-parsable class name for CLI error reporting.
    pub fn class(&self) -> &'static str {
        match self {
            TriadError::SingularParameters { .. } => "SingularParameters",
            TriadError::ZeroWaveVector => "ZeroWaveVector",
            TriadError::InsufficientTriads { .. } => "InsufficientTriads",
            TriadError::InvalidConfig(_) => "InvalidConfig",
        }
    }
}

/// Auxiliary parameters `(a,b)` on the elliptic surface of exact resonances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxParams {
    pub a: BigRational,
    pub b: BigRational,
}

impl AuxParams {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        AuxParams { a, b }
    }
}

/// Dimensionless wave-vector ratios produced by the parameterization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioTriple {
    pub k1_over_k3: f64,
    pub l3_over_k3: f64,
    pub l1_over_k3: f64,
}

/// Integer wave vector `(k,l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WaveVector {
    pub k: i64,
    pub l: i64,
}

impl WaveVector {
    pub fn new(k: i64, l: i64) -> Self {
        WaveVector { k, l }
    }
}

/// A quasi-resonant triad together with the grid point that generated it.
///
/// The components satisfy `k1+k2 = k3` and `l1+l2 = l3` exactly;
/// `omega_defect` is the signed frequency residual `w3 - w2 - w1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Triad {
    pub k1: i64,
    pub l1: i64,
    pub k2: i64,
    pub l2: i64,
    pub k3: i64,
    pub l3: i64,
    /// Generating auxiliary parameter `a` (exact).
    pub a: BigRational,
    /// Generating auxiliary parameter `b` (exact).
    pub b: BigRational,
    pub omega_defect: f64,
}

impl Triad {
    /// The six wave-vector components in `(k1,l1,k2,l2,k3,l3)` order.
    pub fn components(&self) -> (i64, i64, i64, i64, i64, i64) {
        (self.k1, self.l1, self.k2, self.l2, self.k3, self.l3)
    }
}

/// Validated configuration for [`generate_triads`].
#[derive(Debug, Clone, PartialEq)]
pub struct TriadGenConfig {
    a_lo: BigRational,
    a_hi: BigRational,
    a_step: BigRational,
    b_lo: BigRational,
    b_hi: BigRational,
    b_step: BigRational,
    k3_lo: i64,
    k3_hi: i64,
    k3_step: i64,
    inv_detuning: u64,
    bound: i64,
    count: usize,
}

impl TriadGenConfig {
    /// Builds a configuration, rejecting degenerate grids.
    ///
    /// Requirements: positive steps, `delta >= 1`, `bound >= 1`, and a grid
    /// large enough to possibly supply `count` triads (`n1*n2*n3 >= count`).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a_lo: BigRational,
        a_hi: BigRational,
        a_step: BigRational,
        b_lo: BigRational,
        b_hi: BigRational,
        b_step: BigRational,
        k3_lo: i64,
        k3_hi: i64,
        k3_step: i64,
        inv_detuning: u64,
        bound: i64,
        count: usize,
    ) -> Result<Self, TriadError> {
        use num_traits::Zero;
        if a_step <= BigRational::zero() || b_step <= BigRational::zero() {
            return Err(TriadError::InvalidConfig(
                "grid step sizes must be positive".into(),
            ));
        }
        if k3_step < 1 {
            return Err(TriadError::InvalidConfig(
                "k3 step must be a positive integer".into(),
            ));
        }
        if inv_detuning == 0 {
            return Err(TriadError::InvalidConfig(
                "inverse detuning level must be positive".into(),
            ));
        }
        if bound < 1 {
            return Err(TriadError::InvalidConfig(
                "wavenumber bound must be positive".into(),
            ));
        }
        let cfg = TriadGenConfig {
            a_lo,
            a_hi,
            a_step,
            b_lo,
            b_hi,
            b_step,
            k3_lo,
            k3_hi,
            k3_step,
            inv_detuning,
            bound,
            count,
        };
        let points = cfg.grid_size_a() as u128 * cfg.grid_size_b() as u128 * cfg.grid_size_k3() as u128;
        if points < count as u128 {
            return Err(TriadError::InvalidConfig(format!(
                "grid holds {points} candidate points but {count} triads were requested"
            )));
        }
        Ok(cfg)
    }

    /// Number of grid points in the `a` range.
    pub fn grid_size_a(&self) -> u64 {
        rational_grid_len(&self.a_lo, &self.a_hi, &self.a_step)
    }

    /// Number of grid points in the `b` range.
    pub fn grid_size_b(&self) -> u64 {
        rational_grid_len(&self.b_lo, &self.b_hi, &self.b_step)
    }

    /// Number of grid points in the `k3` range.
    pub fn grid_size_k3(&self) -> u64 {
        if self.k3_hi < self.k3_lo {
            0
        } else {
            ((self.k3_hi - self.k3_lo) / self.k3_step) as u64 + 1
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    /// The detuning threshold `1/delta`.
    pub fn detuning_level(&self) -> f64 {
        1.0 / self.inv_detuning as f64
    }
}

fn rational_grid_len(lo: &BigRational, hi: &BigRational, step: &BigRational) -> u64 {
    use num_traits::ToPrimitive;
    if hi < lo {
        return 0;
    }
    let steps = ((hi - lo) / step).floor();
    steps.to_integer().to_u64().map_or(u64::MAX, |n| n.saturating_add(1))
}

fn rational_grid(lo: &BigRational, hi: &BigRational, step: &BigRational) -> Vec<BigRational> {
    let mut points = Vec::new();
    let mut v = lo.clone();
    while v <= *hi {
        points.push(v.clone());
        v += step;
    }
    points
}

/// Shared polynomial factors of the three ratio expressions at `(a,b)`.
struct RatioFactors {
    cube: f64,    // a^2 + b(2-3b) + 1
    f1: f64,      // a^2 - 3b^2 - 2b + 1
    f3: f64,      // a^2 - 3b^2 - 1
    g: f64,       // 2(11-3a^2)b^2 + (a^2+1)^2 - 16ab + 9b^4
    bracket: f64, // degree-six polynomial shared by the l1/k3 numerator
    l3_num: f64,  // 6(a^2+a-1)b^2 - (a+1)^2(a^2+1) + 4ab - 9b^4
}

fn ratio_factors(a: f64, b: f64) -> RatioFactors {
    let a2 = a * a;
    let b2 = b * b;
    let s = 3.0 * b2 + 2.0 * b - 1.0;
    RatioFactors {
        cube: a2 + b * (2.0 - 3.0 * b) + 1.0,
        f1: a2 - 3.0 * b2 - 2.0 * b + 1.0,
        f3: a2 - 3.0 * b2 - 1.0,
        g: 2.0 * (11.0 - 3.0 * a2) * b2 + (a2 + 1.0) * (a2 + 1.0) - 16.0 * a * b
            + 9.0 * b2 * b2,
        bracket: a2 * a2 * a2 + 2.0 * a2 * a2 * a + a2 * a2 * (-9.0 * b2 - 6.0 * b + 3.0)
            - 4.0 * a2 * a * s
            + 3.0 * a2 * s * s
            + 2.0 * a * (9.0 * b2 * b2 + 12.0 * b2 * b + 14.0 * b2 - 4.0 * b + 1.0)
            - (3.0 * b2 + 1.0) * (3.0 * b2 + 1.0) * (3.0 * b2 + 6.0 * b - 1.0),
        l3_num: 6.0 * (a2 + a - 1.0) * b2 - (a + 1.0) * (a + 1.0) * (a2 + 1.0) + 4.0 * a * b
            - 9.0 * b2 * b2,
    }
}

/// Evaluates the wave-vector ratios `(k1/k3, l3/k3, l1/k3)` at `(a,b)`.
///
/// All arithmetic is IEEE-754 binary64 with a fixed evaluation order, so
/// identical inputs give bit-identical results. Returns
/// [`TriadError::SingularParameters`] when a denominator factor vanishes or a
/// ratio overflows.
pub fn hayat_ratios(params: &AuxParams) -> Result<RatioTriple, TriadError> {
    use num_traits::ToPrimitive;
    let singular = || TriadError::SingularParameters {
        a: params.a.clone(),
        b: params.b.clone(),
    };
    let a = params.a.to_f64().ok_or_else(singular)?;
    let b = params.b.to_f64().ok_or_else(singular)?;
    let f = ratio_factors(a, b);
    if f.f1 == 0.0 || f.f3 == 0.0 || f.g == 0.0 {
        return Err(singular());
    }
    let ratios = RatioTriple {
        k1_over_k3: f.cube * f.cube * f.cube / (f.f1 * f.g),
        l3_over_k3: f.l3_num / (f.f3 * f.f1),
        l1_over_k3: f.cube * f.bracket / (f.f3 * f.f1 * f.g),
    };
    if !(ratios.k1_over_k3.is_finite()
        && ratios.l3_over_k3.is_finite()
        && ratios.l1_over_k3.is_finite())
    {
        return Err(singular());
    }
    Ok(ratios)
}

/// Rossby-wave frequency `w(k,l) = k/(k^2+l^2)`.
pub fn dispersion_omega(w: WaveVector) -> Result<f64, TriadError> {
    if w.k == 0 && w.l == 0 {
        return Err(TriadError::ZeroWaveVector);
    }
    Ok(w.k as f64 / (w.k * w.k + w.l * w.l) as f64)
}

/// Rounds to the nearest integer, ties away from zero, saturating on overflow.
fn round_ties_away(x: f64) -> i64 {
    x.round() as i64
}

/// Generates `cfg.count()` quasi-resonant triads, sorted by the grid order.
///
/// The `(a,b)` grid is scanned with `a` ascending in the outer loop and `b`
/// ascending in the inner loop, and every ratio triple is cached before any
/// `k3` is tried. For each cached grid point in turn and each `k3` ascending,
/// the scaled ratios are rounded to integers (ties away from zero) and the
/// candidate is accepted when all six components are nonzero with magnitude
/// below the bound, `k3 > 0`, and the frequency defect is strictly below
/// `1/delta`. Generation stops as soon as enough triads are accepted.
pub fn generate_triads(cfg: &TriadGenConfig) -> Result<Vec<Triad>, TriadError> {
    if cfg.count == 0 {
        return Ok(Vec::new());
    }
    let grid_a = rational_grid(&cfg.a_lo, &cfg.a_hi, &cfg.a_step);
    let grid_b = rational_grid(&cfg.b_lo, &cfg.b_hi, &cfg.b_step);
    let mut cache = Vec::with_capacity(grid_a.len() * grid_b.len());
    for a in &grid_a {
        for b in &grid_b {
            let params = AuxParams::new(a.clone(), b.clone());
            cache.push((a, b, hayat_ratios(&params)?));
        }
    }

    let mut triads = Vec::with_capacity(cfg.count);
    let detuning = cfg.detuning_level();
    for (a, b, ratios) in &cache {
        let mut k3 = cfg.k3_lo;
        while k3 <= cfg.k3_hi {
            if let Some(triad) = accept_candidate(ratios, k3, cfg.bound, detuning, a, b) {
                triads.push(triad);
                if triads.len() == cfg.count {
                    sort_triads(&mut triads);
                    return Ok(triads);
                }
            }
            k3 += cfg.k3_step;
        }
    }
    Err(TriadError::InsufficientTriads {
        found: triads.len(),
        requested: cfg.count,
    })
}

fn accept_candidate(
    ratios: &RatioTriple,
    k3: i64,
    bound: i64,
    detuning: f64,
    a: &BigRational,
    b: &BigRational,
) -> Option<Triad> {
    if k3 <= 0 {
        return None;
    }
    let k1 = round_ties_away(ratios.k1_over_k3 * k3 as f64);
    let l3 = round_ties_away(ratios.l3_over_k3 * k3 as f64);
    let l1 = round_ties_away(ratios.l1_over_k3 * k3 as f64);
    if !(in_box(k1, bound) && in_box(l1, bound) && in_box(l3, bound) && in_box(k3, bound)) {
        return None;
    }
    let k2 = k3 - k1;
    let l2 = l3 - l1;
    if !(in_box(k2, bound) && in_box(l2, bound)) {
        return None;
    }
    let w1 = dispersion_omega(WaveVector::new(k1, l1)).expect("nonzero by bound check");
    let w2 = dispersion_omega(WaveVector::new(k2, l2)).expect("nonzero by bound check");
    let w3 = dispersion_omega(WaveVector::new(k3, l3)).expect("nonzero by bound check");
    let defect = w3 - w2 - w1;
    if defect.abs() >= detuning {
        return None;
    }
    Some(Triad {
        k1,
        l1,
        k2,
        l2,
        k3,
        l3,
        a: (*a).clone(),
        b: (*b).clone(),
        omega_defect: defect,
    })
}

#[inline]
fn in_box(v: i64, bound: i64) -> bool {
    0 < v.abs() && v.abs() < bound
}

/// Comparison key for the triad total order: `(a, b, k3)` lexicographic.
fn order_key(t: &Triad) -> (&BigRational, &BigRational, i64) {
    (&t.a, &t.b, t.k3)
}

/// The triad total order: true iff `x` precedes or equals `y`.
///
/// `x` comes first when `a < a'`, or on equal `a` when `b < b'`, or on equal
/// `(a,b)` when `k3 <= k3'`. Rationals are compared exactly.
pub fn triad_less(x: &Triad, y: &Triad) -> bool {
    order_key(x) <= order_key(y)
}

/// Stable ascending sort under the triad total order; idempotent.
pub fn sort_triads(triads: &mut [Triad]) {
    triads.sort_by(|x, y| order_key(x).cmp(&order_key(y)));
}

/// True when the sequence is ascending under the triad total order.
pub fn is_sorted(triads: &[Triad]) -> bool {
    triads.windows(2).all(|w| triad_less(&w[0], &w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn ratios_at_origin() {
        // Every polynomial factor reduces to +-1 at (0,0).
        let r = hayat_ratios(&AuxParams::new(rat(0, 1), rat(0, 1))).unwrap();
        assert_eq!(r.k1_over_k3, 1.0);
        assert_eq!(r.l3_over_k3, 1.0);
        assert_eq!(r.l1_over_k3, -1.0);
    }

    #[test]
    fn ratios_at_reference_grid_point() {
        let p = AuxParams::new(rat(-10541, 10000), rat(-10541, 10000));
        let r = hayat_ratios(&p).unwrap();
        for (k3, want) in [(401, (-1128, 1152, 1820)), (476, (-1339, 1368, 2161))] {
            let k1 = round_ties_away(r.k1_over_k3 * k3 as f64);
            let l1 = round_ties_away(r.l1_over_k3 * k3 as f64);
            let l3 = round_ties_away(r.l3_over_k3 * k3 as f64);
            assert_eq!((k1, l1, l3), want);
        }
    }

    #[test]
    fn singular_parameters_detected() {
        // f3 = a^2 - 3b^2 - 1 vanishes at (1, 0).
        let err = hayat_ratios(&AuxParams::new(rat(1, 1), rat(0, 1))).unwrap_err();
        assert!(matches!(err, TriadError::SingularParameters { .. }));
    }

    #[test]
    fn dispersion_examples() {
        assert_eq!(dispersion_omega(WaveVector::new(1, 0)).unwrap(), 1.0);
        assert_eq!(dispersion_omega(WaveVector::new(0, 5)).unwrap(), 0.0);
        let w = dispersion_omega(WaveVector::new(401, 1820)).unwrap();
        assert_eq!(w, 401.0 / (401.0f64 * 401.0 + 1820.0 * 1820.0));
        assert_eq!(
            dispersion_omega(WaveVector::new(0, 0)),
            Err(TriadError::ZeroWaveVector)
        );
    }

    #[test]
    fn rounding_is_ties_away_from_zero() {
        assert_eq!(round_ties_away(1294.5), 1295);
        assert_eq!(round_ties_away(-0.5), -1);
        assert_eq!(round_ties_away(2.5), 3);
        assert_eq!(round_ties_away(-2.5), -3);
    }

    fn reference_config(count: usize) -> TriadGenConfig {
        TriadGenConfig::new(
            rat(-10541, 10000),
            rat(-8514, 10000),
            rat(2, 1000),
            rat(-10541, 10000),
            rat(-8514, 10000),
            rat(19, 1000),
            401,
            691,
            5,
            1000,
            90_000,
            count,
        )
        .unwrap()
    }

    #[test]
    fn zero_count_yields_empty() {
        assert!(generate_triads(&reference_config(0)).unwrap().is_empty());
    }

    #[test]
    fn generated_triads_satisfy_invariants() {
        let cfg = reference_config(200);
        let triads = generate_triads(&cfg).unwrap();
        assert_eq!(triads.len(), 200);
        assert!(is_sorted(&triads));
        for t in &triads {
            assert_eq!(t.k1 + t.k2, t.k3);
            assert_eq!(t.l1 + t.l2, t.l3);
            assert!(t.k3 > 0);
            for v in [t.k1, t.l1, t.k2, t.l2, t.k3, t.l3] {
                assert!(0 < v.abs() && v.abs() < cfg.bound());
            }
            assert!(t.omega_defect.abs() < cfg.detuning_level());
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = reference_config(64);
        assert_eq!(generate_triads(&cfg).unwrap(), generate_triads(&cfg).unwrap());
    }

    #[test]
    fn insufficient_grid_rejected_up_front() {
        let err = TriadGenConfig::new(
            rat(0, 1),
            rat(0, 1),
            rat(1, 1),
            rat(0, 1),
            rat(0, 1),
            rat(1, 1),
            1,
            1,
            1,
            1000,
            100,
            2,
        )
        .unwrap_err();
        assert!(matches!(err, TriadError::InvalidConfig(_)));
    }

    #[test]
    fn exhausted_grid_reports_insufficient() {
        // A 1x1x1 grid whose only candidate fails the detuning test.
        let cfg = TriadGenConfig::new(
            rat(1, 2),
            rat(1, 2),
            rat(1, 1),
            rat(1, 2),
            rat(1, 2),
            rat(1, 1),
            1,
            1,
            1,
            u64::MAX,
            1_000_000,
            1,
        )
        .unwrap();
        let err = generate_triads(&cfg).unwrap_err();
        assert!(matches!(err, TriadError::InsufficientTriads { found: 0, requested: 1 }));
    }

    #[test]
    fn order_relation_examples() {
        let t = |a: i64, b: i64, k3: i64| Triad {
            k1: 1,
            l1: 1,
            k2: 1,
            l2: 1,
            k3,
            l3: 2,
            a: rat(a, 1),
            b: rat(b, 1),
            omega_defect: 0.0,
        };
        assert!(triad_less(&t(1, 1, 5), &t(1, 1, 5))); // reflexive
        assert!(triad_less(&t(1, 1, 401), &t(1, 1, 406)));
        assert!(!triad_less(&t(2, 0, 1), &t(1, 9, 9))); // a dominates
    }

    #[test]
    fn sort_is_stable_and_idempotent() {
        let cfg = reference_config(32);
        let sorted = generate_triads(&cfg).unwrap();
        let mut reversed: Vec<Triad> = sorted.iter().rev().cloned().collect();
        sort_triads(&mut reversed);
        assert_eq!(reversed, sorted);
        sort_triads(&mut reversed);
        assert_eq!(reversed, sorted);
    }
}
