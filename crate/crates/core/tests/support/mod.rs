//! Strategies and checks shared by the property suites and the acceptance run.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use ncagm::ncpoly::{distinct_product_sum, falling_factorial, NcPoly, Word};
use ncagm::sdp::{
    export_sdpa_string, import_sdpa_str, solve, Block, BlockKind, Constraint, ProblemMeta,
    SdpProblem, Sign, SolveStatus, SolverOptions, SparseSymMatrix, SymEntry,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub type Q = BigRational;
pub type Check = std::result::Result<(), TestCaseError>;

pub const CASES: u32 = 1000;

pub fn q(v: i64) -> Q {
    BigRational::from_integer(BigInt::from(v))
}

/// Runs `check` on `CASES` draws of `strategy` with a fixed seed.
pub fn run_cases<S: Strategy>(strategy: S, check: impl Fn(S::Value) -> Check) -> Result<(), String> {
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: CASES,
            failure_persistence: None,
            ..Config::default()
        },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    runner.run(&strategy, check).map_err(|e| e.to_string())
}

// ---- free algebra

pub type Terms = Vec<(Vec<u8>, i64)>;

pub fn terms() -> impl Strategy<Value = Terms> {
    prop::collection::vec((prop::collection::vec(any::<u8>(), 0..4), -5i64..=5), 0..6)
}

pub fn poly(n: usize, terms: Terms) -> NcPoly<Q> {
    let terms = terms
        .into_iter()
        .map(|(w, c)| (Word::new(w.into_iter().map(|l| l % n as u8 + 1).collect::<Vec<_>>()), q(c)));
    NcPoly::from_terms(n, terms).unwrap()
}

pub fn to_f64(p: &NcPoly<Q>) -> NcPoly<f64> {
    p.map_coeffs(|c| c.to_f64().unwrap())
}

pub fn sym(dim: usize, vals: &[f64]) -> DMatrix<f64> {
    let m = DMatrix::from_fn(dim, dim, |i, j| vals[i * dim + j]);
    (&m + m.transpose()) * 0.5
}

pub fn algebra_case() -> impl Strategy<Value = (usize, Terms, Terms, Terms)> {
    (1usize..4, terms(), terms(), terms())
}

/// Transpose reverses products, multiplication is associative and distributes.
pub fn check_algebra_laws((n, a, b, c): (usize, Terms, Terms, Terms)) -> Check {
    let (x, y, z) = (poly(n, a), poly(n, b), poly(n, c));
    prop_assert_eq!((&x * &y).transpose(), &y.transpose() * &x.transpose());
    prop_assert_eq!(x.transpose().transpose(), x.clone());
    prop_assert_eq!((&x + &y).transpose(), &x.transpose() + &y.transpose());
    prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
    prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
    let copy = x.clone();
    prop_assert!((&x - &copy).is_zero());
    prop_assert_eq!(&x * &NcPoly::one(n).unwrap(), x.clone());
    prop_assert!((&x + &x.transpose()).is_symmetric());
    prop_assert!((&x * &x.transpose()).is_symmetric());
    Ok(())
}

pub fn degree_pair(max_n: usize) -> impl Strategy<Value = (usize, usize)> {
    (1..=max_n).prop_flat_map(|n| (1..=n, Just(n)))
}

/// The distinct-product sum has `n!/(n-m)!` unit terms on injective words.
pub fn check_distinct_counts((m, n): (usize, usize)) -> Check {
    let p = distinct_product_sum::<Q>(m, n).unwrap();
    let expected: u128 = (n - m + 1..=n).map(|k| k as u128).product();
    prop_assert_eq!(p.len() as u128, expected);
    prop_assert_eq!(falling_factorial(n, m), expected);
    prop_assert!(p.is_symmetric());
    for (w, c) in p.terms() {
        prop_assert_eq!(w.degree(), m);
        prop_assert!(w.has_distinct_letters());
        prop_assert_eq!(c, &q(1));
    }
    Ok(())
}

// ---- spectral norms

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.amax()
}

pub fn pair_case() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1usize..6, prop::collection::vec(-2.0f64..2.0, 50))
}

/// `‖AB+BA‖ <= ‖A²+B²‖` for symmetric `A, B`, and for the PSD pair
/// `G², H²` additionally `2‖AB+BA‖ <= ‖(A+B)²‖`.
pub fn check_norm_inequalities((dim, vals): (usize, Vec<f64>)) -> Check {
    let g = sym(dim, &vals[..25]);
    let h = sym(dim, &vals[25..]);
    for (a, b, psd) in [(g.clone(), h.clone(), false), (&g * &g, &h * &h, true)] {
        let anti = &a * &b + &b * &a;
        prop_assert!(spectral_norm(&anti) <= spectral_norm(&(&a * &a + &b * &b)) + 1e-9);
        if psd {
            let s = &a + &b;
            prop_assert!(2.0 * spectral_norm(&anti) <= spectral_norm(&(&s * &s)) + 1e-9);
        }
    }
    Ok(())
}

// ---- solver against an LP oracle

/// `min cᵀx, Ax = b, x >= 0` by enumerating every basis.
pub fn lp_brute_force(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> Option<f64> {
    let (r, k) = a.shape();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize != r {
            continue;
        }
        let cols: Vec<usize> = (0..k).filter(|j| mask & (1 << j) != 0).collect();
        let sub = DMatrix::from_fn(r, r, |i, j| a[(i, cols[j])]);
        if sub.determinant().abs() < 1e-9 {
            continue;
        }
        let Some(xs) = sub.lu().solve(b) else { continue };
        if xs.iter().any(|&v| v < -1e-9) {
            continue;
        }
        let obj: f64 = cols.iter().zip(xs.iter()).map(|(&j, &v)| c[j] * v).sum();
        best = Some(best.map_or(obj, |o: f64| o.min(obj)));
    }
    best
}

/// The LP as one diagonal SDP block.
pub fn diagonal_sdp(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> SdpProblem {
    let (r, k) = a.shape();
    let diag = |f: &dyn Fn(usize) -> f64| {
        SparseSymMatrix::from_entries((0..k).map(|j| SymEntry {
            block: 0,
            row: j,
            col: j,
            value: f(j),
        }))
    };
    SdpProblem {
        blocks: vec![Block::diagonal(k)],
        objective: diag(&|j| c[j]),
        constraints: (0..r)
            .map(|i| Constraint {
                matrix: diag(&|j| a[(i, j)]),
                rhs: b[i],
            })
            .collect(),
        meta: None,
    }
}

pub type LpCase = (DMatrix<f64>, DVector<f64>, DVector<f64>);

/// Full-row-rank integer `A`, `b = A x0` with `x0 > 0`, and `c > 0`: feasible and bounded.
pub fn lp_case() -> impl Strategy<Value = LpCase> {
    (2usize..7)
        .prop_flat_map(|k| (Just(k), 1..=k.min(4)))
        .prop_flat_map(|(k, r)| {
            (
                prop::collection::vec(-3i32..=3, r * k),
                prop::collection::vec(0.1f64..2.0, k),
                prop::collection::vec(0.05f64..3.0, k),
            )
                .prop_map(move |(av, x0, cv)| {
                    let a = DMatrix::from_fn(r, k, |i, j| av[i * k + j] as f64);
                    let b = &a * DVector::from_vec(x0);
                    (a, b, DVector::from_vec(cv))
                })
        })
        .prop_filter("full row rank", |(a, _, _)| a.rank(1e-9) == a.nrows())
}

/// Optimal value matches the oracle, and weak duality holds at termination.
pub fn check_lp_oracle((a, b, c): LpCase) -> Check {
    let oracle = lp_brute_force(&a, &b, &c).expect("feasible and bounded");
    let s = solve(&diagonal_sdp(&a, &b, &c), &SolverOptions::default()).unwrap();
    prop_assert_eq!(s.status, SolveStatus::Optimal);
    prop_assert!(
        (s.objective_primal - oracle).abs() <= 1e-6 * (1.0 + oracle.abs()),
        "solver {} vs oracle {}",
        s.objective_primal,
        oracle
    );
    let x = &s.primal_blocks[0];
    let pobj: f64 = (0..c.len()).map(|j| c[j] * x[(j, j)]).sum();
    let dobj: f64 = b.iter().zip(&s.dual).map(|(bi, yi)| bi * yi).sum();
    prop_assert!(pobj - dobj >= -1e-6 * (1.0 + pobj.abs()), "pobj {pobj} < dobj {dobj}");
    prop_assert!((0..c.len()).all(|j| x[(j, j)] >= -1e-9));
    let slack_ok = (0..c.len()).all(|j| {
        let z = c[j] - (0..a.nrows()).map(|i| a[(i, j)] * s.dual[i]).sum::<f64>();
        z >= -1e-6 * (1.0 + c.amax())
    });
    prop_assert!(slack_ok);
    Ok(())
}

// ---- SDPA round trip

fn entry(blocks: Vec<Block>) -> impl Strategy<Value = SymEntry> {
    (0..blocks.len()).prop_flat_map(move |blk| {
        let b = blocks[blk];
        (0..b.dim, 0..b.dim, -1e3f64..1e3).prop_map(move |(i, j, v)| {
            let (row, col) = match b.kind {
                BlockKind::Diagonal => (i, i),
                BlockKind::Dense => (i.min(j), i.max(j)),
            };
            SymEntry {
                block: blk,
                row,
                col,
                value: v,
            }
        })
    })
}

fn sparse(blocks: &[Block]) -> impl Strategy<Value = SparseSymMatrix> {
    prop::collection::vec(entry(blocks.to_vec()), 0..6).prop_map(SparseSymMatrix::from_entries)
}

pub fn random_problem() -> impl Strategy<Value = SdpProblem> {
    prop::collection::vec((1usize..5, any::<bool>()), 1..4)
        .prop_map(|v| {
            v.into_iter()
                .map(|(d, diag)| if diag { Block::diagonal(d) } else { Block::dense(d) })
                .collect::<Vec<_>>()
        })
        .prop_flat_map(|blocks| {
            let constraint =
                (sparse(&blocks), -1e3f64..1e3).prop_map(|(matrix, rhs)| Constraint { matrix, rhs });
            let meta = prop::option::of((1usize..6, 1usize..6, any::<bool>()).prop_map(|(m, n, plus)| {
                ProblemMeta {
                    m,
                    n,
                    d: m / 2,
                    sign: if plus { Sign::Plus } else { Sign::Minus },
                }
            }));
            (
                Just(blocks.clone()),
                sparse(&blocks),
                prop::collection::vec(constraint, 1..6),
                meta,
            )
        })
        .prop_map(|(blocks, objective, constraints, meta)| SdpProblem {
            blocks,
            objective,
            constraints,
            meta,
        })
}

pub fn check_sdpa_round_trip(p: SdpProblem) -> Check {
    p.validate().unwrap();
    let text = export_sdpa_string(&p);
    let back = import_sdpa_str(&text).unwrap();
    prop_assert_eq!(&back, &p);
    prop_assert_eq!(export_sdpa_string(&back), text);
    Ok(())
}
