//! Analytic size estimators and storage lower bounds.
//!
//! All logarithms are base 2. Binomials go through log-gamma so arguments far
//! beyond `u64` are fine.

use std::f64::consts::LN_2;
use std::fmt::Write as _;

use statrs::function::gamma::ln_gamma;

use crate::bitio::ceil_log2;
use crate::error::{Error, Result};

/// A bound in bits, before and after rounding up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bits {
    pub exact: f64,
    pub ceiled: f64,
}

impl Bits {
    fn new(exact: f64) -> Self {
        // clamp tiny negative rounding noise of log C(a, a)
        let exact = exact.max(0.0);
        Self { exact, ceiled: exact.ceil() }
    }

    pub fn bytes(&self) -> f64 {
        self.exact / 8.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBounds {
    /// One vertex ID: `log n`.
    pub vertex_id: Bits,
    /// One offset: `log 2m`.
    pub offset: Bits,
    /// One weight: `log Ŵ`.
    pub weight: Bits,
    /// Bit-vector offsets: `log C(2Wm/B, n)`.
    pub bitvector: Bits,
    /// The whole graph: `log C(C(n,2), m)`.
    pub graph: Bits,
    /// A plain adjacency array with `W`-bit IDs, `2mW` bits, for comparison.
    pub adjacency_array_bits: f64,
}

/// `n`, `m` and `w` as `f64` so that `n = 2^42` style inputs work.
pub fn lower_bounds(n: f64, m: f64, max_weight: f64, w: u32, block_bits: u32) -> Result<LowerBounds> {
    if !(n >= 1.0) || !(m >= 0.0) || !(max_weight >= 1.0) {
        return Err(Error::Domain(format!("need n >= 1, m >= 0, max weight >= 1 (got {n}, {m}, {max_weight})")));
    }
    if block_bits == 0 || w == 0 {
        return Err(Error::Domain("W and B must be positive".into()));
    }
    let pairs = n * (n - 1.0) / 2.0;
    if m > pairs {
        return Err(Error::Domain(format!("m = {m} exceeds C(n,2) = {pairs}")));
    }
    let bv_len = (2.0 * w as f64 * m / block_bits as f64).floor();
    Ok(LowerBounds {
        vertex_id: Bits::new(n.log2()),
        offset: Bits::new(if m > 0.0 { (2.0 * m).log2() } else { 0.0 }),
        weight: Bits::new(max_weight.log2()),
        bitvector: Bits::new(log2_binomial(bv_len.max(n), n)),
        graph: Bits::new(log2_binomial(pairs, m)),
        adjacency_array_bits: 2.0 * m * w as f64,
    })
}

/// `log2 C(a, b)` for real `0 <= b <= a`.
pub fn log2_binomial(a: f64, b: f64) -> f64 {
    if b < 0.0 || b > a {
        return f64::NEG_INFINITY;
    }
    let b = b.min(a - b);
    if b == 0.0 {
        return 0.0;
    }
    (ln_gamma_ratio(a + 1.0, a - b + 1.0) - ln_gamma(b + 1.0)) / LN_2
}

/// `ln Γ(x) - ln Γ(y)` for `x >= y > 0`.
///
/// When `y` is large the two gammas agree in their leading digits, so the
/// difference is taken inside Stirling's series instead of after it.
fn ln_gamma_ratio(x: f64, y: f64) -> f64 {
    if y < 1e6 {
        return ln_gamma(x) - ln_gamma(y);
    }
    let d = x - y;
    // (x-1/2)ln x - (y-1/2)ln y = (x-1/2)ln(x/y) + d ln y
    let main = (x - 0.5) * (d / y).ln_1p() + d * y.ln() - d;
    let series = |z: f64| 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z * z);
    main + series(x) - series(y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErEstimate {
    pub expected_a_bits: f64,
    pub expected_o_bits: f64,
}

/// `E|A| = (⌈log n⌉ + ⌈log Ŵ⌉) p n²` and `E|O| = n ⌈log 2p + 2 log n⌉`.
///
/// `pn²` counts self pairs, so `E|A|` overshoots an exact count by roughly `pn`
/// entries. `max_weight = None` drops the weight term.
pub fn er_expected_sizes(n: u64, p: f64, max_weight: Option<u64>) -> Result<ErEstimate> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("p = {p} not in (0, 1]")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let nf = n as f64;
    let width = ceil_log2(n) as f64 + max_weight.map_or(0.0, |w| ceil_log2(w.max(1)) as f64);
    Ok(ErEstimate {
        expected_a_bits: width * p * nf * nf,
        expected_o_bits: nf * (2.0 * p).log2().mul_add(1.0, 2.0 * nf.log2()).ceil().max(0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlEstimate {
    /// Maximum-degree bound `(α n log n / (β-1))^(1/(β-1))`.
    pub d_hat: f64,
    /// `m ≈ (α/2) ∫_1^d̂ x^(1-β) dx`.
    pub m_estimate: f64,
    pub expected_a_bits: f64,
    pub expected_o_bits: f64,
}

/// Power-law model with degree distribution `f(d) = α d^-β`.
///
/// The maximum-degree bound only holds with high probability; it is used as if
/// deterministic. At `β = 2` the integral is `ln d̂` and that limit is returned.
pub fn pl_expected_size(n: u64, alpha: f64, beta: f64, max_weight: Option<u64>) -> Result<PlEstimate> {
    if !(beta > 1.0) || !(alpha > 0.0) || n < 2 {
        return Err(Error::Domain(format!("need beta > 1, alpha > 0, n >= 2 (got {beta}, {alpha}, {n})")));
    }
    let nf = n as f64;
    let d_hat = (alpha * nf * nf.log2() / (beta - 1.0)).powf(1.0 / (beta - 1.0));
    let integral = if (beta - 2.0).abs() < 1e-12 {
        d_hat.ln()
    } else {
        (d_hat.powf(2.0 - beta) - 1.0) / (2.0 - beta)
    };
    let m_estimate = alpha / 2.0 * integral;
    let width = ceil_log2(n) as f64 + max_weight.map_or(0.0, |w| ceil_log2(w.max(1)) as f64);
    let two_m = 2.0 * m_estimate;
    Ok(PlEstimate {
        d_hat,
        m_estimate,
        expected_a_bits: two_m * width,
        expected_o_bits: if two_m > 1.0 { nf * two_m.log2().ceil() } else { 0.0 },
    })
}

/// Parameters of the random-graph model behind a theory curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    ErdosRenyi { p: f64 },
    PowerLaw { alpha: f64, beta: f64 },
}

impl Model {
    fn name(&self) -> String {
        match self {
            Model::ErdosRenyi { p } => format!("er(p={p})"),
            Model::PowerLaw { alpha, beta } => format!("pl(alpha={alpha},beta={beta})"),
        }
    }
}

pub const FIGURE_CSV_HEADER: &str = "model,n,scheme,bits";
/// Baseline entry: a 32-bit vertex ID plus an 8-bit weight.
pub const BASELINE_ENTRY_BITS: f64 = 40.0;
const FIGURE_MAX_WEIGHT: u64 = 1 << 8;

/// Rows for each `n`: the model's `E|A|` (`loggraph`), its `E|O|`
/// (`loggraph-offsets`) and the `32+8` array of the same expected edge count.
pub fn emit_theory_figure_data(ns: &[u64], models: &[Model]) -> Result<String> {
    let mut out = String::from(FIGURE_CSV_HEADER);
    out.push('\n');
    for model in models {
        let name = model.name();
        for &n in ns {
            let (a, o, two_m) = match *model {
                Model::ErdosRenyi { p } => {
                    let e = er_expected_sizes(n, p, Some(FIGURE_MAX_WEIGHT))?;
                    (e.expected_a_bits, e.expected_o_bits, p * (n as f64) * (n as f64))
                }
                Model::PowerLaw { alpha, beta } => {
                    let e = pl_expected_size(n, alpha, beta, Some(FIGURE_MAX_WEIGHT))?;
                    (e.expected_a_bits, e.expected_o_bits, 2.0 * e.m_estimate)
                }
            };
            for (scheme, bits) in [("loggraph", a), ("loggraph-offsets", o), ("32+8", two_m * BASELINE_ENTRY_BITS)] {
                let _ = writeln!(out, "\"{name}\",{n},{scheme},{bits:.1}");
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::One;

    fn exact_log2_binomial(a: u64, b: u64) -> f64 {
        let mut c = BigUint::one();
        for i in 0..b {
            c = c * (a - i) / (i + 1);
        }
        let bits = c.bits();
        let shift = bits.saturating_sub(60);
        let top = (&c >> shift).to_u64_digits().first().copied().unwrap_or(0);
        (top as f64).log2() + shift as f64
    }

    #[test]
    fn log_binomial_matches_big_integers() {
        let cases = [(1u64, 1u64), (10, 3), (100, 50), (1000, 7), (5000, 2500), (10_000, 1), (10_000, 9_999), (10_000, 4321)];
        for (a, b) in cases {
            let exact = exact_log2_binomial(a, b);
            let got = log2_binomial(a as f64, b as f64);
            if exact == 0.0 {
                assert!(got.abs() < 1e-9, "C({a},{b})");
            } else {
                assert!(((got - exact) / exact).abs() < 1e-6, "C({a},{b}): {got} vs {exact}");
            }
        }
    }

    #[test]
    fn stirling_difference_is_continuous() {
        // both branches of ln_gamma_ratio around the switch point
        for b in [1.0, 10.0, 1000.0] {
            let below = ln_gamma(999_999.0 + 1.0 + b) - ln_gamma(999_999.0 + 1.0);
            let above = ln_gamma_ratio(999_999.0 + 1.0 + b, 999_999.0 + 1.0);
            let stirling = ln_gamma_ratio(1e6 + b, 1e6);
            assert!((below - above).abs() / below < 1e-9);
            assert!((stirling - (ln_gamma(1e6 + b) - ln_gamma(1e6))).abs() / stirling < 1e-9);
        }
    }

    #[test]
    fn trivial_bounds() {
        let lb = lower_bounds(8.0, 4.0, 1.0, 32, 8).unwrap();
        assert_eq!(lb.vertex_id.ceiled, 3.0);
        assert_eq!(lb.offset.exact, 3.0);
        assert_eq!(lb.weight.exact, 0.0);
        let lb = lower_bounds(4.0, 6.0, 1.0, 32, 8).unwrap();
        assert_eq!(lb.graph.exact, 0.0);
        assert!(matches!(lower_bounds(4.0, 7.0, 1.0, 32, 8), Err(Error::Domain(_))));
    }

    #[test]
    fn huge_graph_bounds() {
        let lb = lower_bounds(2f64.powi(42), 2f64.powi(46), 1.0, 64, 8).unwrap();
        let aa_bytes = lb.adjacency_array_bits / 8.0;
        assert!((aa_bytes / 1.126e15 - 1.0).abs() < 0.05);
        assert!((lb.graph.bytes() / 3.5e14 - 1.0).abs() < 0.05, "{}", lb.graph.bytes());
    }

    #[test]
    fn graph_bound_increases_in_m_below_half() {
        let mut prev = -1.0;
        for m in (0..=2475).step_by(75) {
            let g = lower_bounds(100.0, m as f64, 1.0, 32, 8).unwrap().graph.exact;
            assert!(g > prev);
            prev = g;
        }
    }

    #[test]
    fn er_plug_in() {
        let e = er_expected_sizes(4, 0.5, None).unwrap();
        assert_eq!(e.expected_a_bits, 16.0);
        assert_eq!(e.expected_o_bits, 16.0);
        assert_eq!(er_expected_sizes(4, 1.0, None).unwrap().expected_a_bits, 32.0);
        assert_eq!(er_expected_sizes(4, 1.0, Some(4)).unwrap().expected_a_bits, 64.0);
        assert!(er_expected_sizes(4, 0.0, None).is_err());
    }

    #[test]
    fn pl_estimates() {
        let e = pl_expected_size(1_000_000, 1.0, 2.0, None).unwrap();
        assert!((e.m_estimate - 0.5 * e.d_hat.ln()).abs() < 1e-12);
        // the limit is approached from both sides
        let lo = pl_expected_size(1_000_000, 1.0, 2.0 - 1e-6, None).unwrap();
        let hi = pl_expected_size(1_000_000, 1.0, 2.0 + 1e-6, None).unwrap();
        assert!((lo.m_estimate / e.m_estimate - 1.0).abs() < 1e-3);
        assert!((hi.m_estimate / e.m_estimate - 1.0).abs() < 1e-3);
        assert!(pl_expected_size(10, 1.0, 1.0, None).is_err());
    }

    #[test]
    fn pl_monotone_in_n() {
        for beta in [2.1, 2.5, 2.9] {
            for alpha in [0.5, 1.0, 4.0] {
                let mut prev = 0.0;
                for k in 4..30 {
                    let a = pl_expected_size(1 << k, alpha, beta, Some(16)).unwrap().expected_a_bits;
                    assert!(a >= prev && a >= 0.0);
                    prev = a;
                }
            }
        }
    }

    #[test]
    fn figure_csv() {
        let csv = emit_theory_figure_data(&[1 << 10, 1 << 12], &[Model::ErdosRenyi { p: 0.01 }, Model::PowerLaw { alpha: 1.0, beta: 2.5 }]).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], FIGURE_CSV_HEADER);
        assert_eq!(lines.len(), 1 + 2 * 2 * 3);
        // baseline 2m(32+8) with 2m = pn²
        assert_eq!(lines[3], "\"er(p=0.01)\",1024,32+8,419430.4");
    }
}
