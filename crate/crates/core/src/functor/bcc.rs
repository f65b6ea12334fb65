//! A refutation-oriented test suite for exact-square preservation.
//!
//! Preservation of exact squares is a universally quantified property; the
//! suite samples squares that are known to be exact, applies the functor and
//! re-checks exactness, and additionally checks that the relation lifting is
//! functorial. A clean run means no counterexample was found, nothing more.

use rand::Rng;
use rayon::prelude::*;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::exact::{catalog_square, exactness_witness, CatalogInput, ExactnessWitness, SquareKind};
use crate::fib::relation_to_fibration;
use crate::functor::carrier::apply_functor_ob;
use crate::functor::expr::FunctorExpr;
use crate::functor::lift::lift_relation;
use crate::gen::{self, FixtureRng};
use crate::order::{FinPreorder, LaxSquare, MonotoneMap};
use crate::rel::{compose_rel, id_rel, MonotoneRelation};

#[derive(Clone, Debug)]
pub struct BccConfig {
    pub seed: u64,
    /// Largest carrier drawn for random fixtures.
    pub max_size: usize,
    /// Random squares drawn per catalog shape.
    pub samples: usize,
    /// Random relation pairs drawn for the lifting laws.
    pub law_samples: usize,
    pub caps: Caps,
}

impl Default for BccConfig {
    fn default() -> Self {
        BccConfig {
            seed: 0,
            max_size: 3,
            samples: 12,
            law_samples: 24,
            caps: Caps::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counter {
    pub checked: usize,
    pub passed: usize,
    /// Cases whose carriers exceeded the size caps.
    pub skipped: usize,
}

#[derive(Clone, Debug)]
pub enum Detail {
    /// The image square is not exact at the given pair.
    NotExact {
        square: LaxSquare,
        image: LaxSquare,
        witness: ExactnessWitness,
    },
    /// The image of a lax square lost its comparison cell.
    NotLax { square: LaxSquare, at: String },
    /// A lifting law failed.
    Law {
        law: &'static str,
        relations: Vec<MonotoneRelation>,
    },
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    /// Stable case id such as `fixed:embedding-vee` or `comma#3`.
    pub case: String,
    pub kind: String,
    pub detail: Detail,
}

#[derive(Clone, Debug)]
pub struct BccReport {
    pub functor: String,
    pub seed: u64,
    pub max_size: usize,
    pub squares: Counter,
    pub laws: Counter,
    pub failures: usize,
    /// First failing case in suite order.
    pub counterexample: Option<Counterexample>,
}

impl BccReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed() {
            "no counterexample found"
        } else {
            "counterexample found"
        }
    }
}

enum Case {
    Square {
        id: String,
        kind: SquareKind,
        square: LaxSquare,
    },
    Law {
        id: String,
        r: MonotoneRelation,
        s: MonotoneRelation,
    },
}

enum Outcome {
    Pass,
    Skipped,
    Fail(Box<Counterexample>),
}

/// The square of the known non-preserved embedding: the discrete pair
/// `{a, b}` included into `a <= c >= b`.
pub fn vee_embedding() -> MonotoneMap {
    let d = FinPreorder::discrete(["a", "b"]).expect("distinct ids");
    let v =
        FinPreorder::new(["a", "b", "c"], &[("a", "c"), ("b", "c")], true).expect("valid order");
    MonotoneMap::from_pairs(&d, &v, &[("a", "a"), ("b", "b")]).expect("inclusion is monotone")
}

fn fixed_squares(poset_only: bool) -> Vec<(String, CatalogInput)> {
    let c2 = FinPreorder::chain(["0", "1"]).expect("distinct ids");
    let c3 = FinPreorder::chain(["0", "1", "2"]).expect("distinct ids");
    let one = FinPreorder::singleton("*");
    let id1 = MonotoneMap::identity(&one);
    let id2 = MonotoneMap::identity(&c2);
    let collapse = MonotoneMap::new(&c3, &c2, vec![0, 1, 1]).expect("monotone");
    let mut out = vec![
        (
            "fixed:embedding-vee".into(),
            CatalogInput::Embedding(vee_embedding()),
        ),
        (
            "fixed:comma-chain".into(),
            CatalogInput::Comma(id2.clone(), id2),
        ),
        (
            "fixed:opcomma-point".into(),
            CatalogInput::OpComma(id1.clone(), id1),
        ),
        (
            "fixed:yoneda-collapse".into(),
            CatalogInput::YonedaLeft(collapse.clone()),
        ),
        (
            "fixed:adjunction-collapse".into(),
            CatalogInput::AdjunctionUnit {
                u: collapse
                    .find_right_adjoint()
                    .expect("collapse has a right adjoint"),
                f: collapse,
            },
        ),
    ];
    if !poset_only {
        let cyc = FinPreorder::new(["x", "y"], &[("x", "y"), ("y", "x")], false).expect("valid");
        let point = MonotoneMap::from_pairs(&FinPreorder::singleton("x"), &cyc, &[("x", "x")])
            .expect("monotone");
        out.push((
            "fixed:abs-dense-cycle".into(),
            CatalogInput::AbsDense(point),
        ));
    }
    out
}

struct Draw<'a> {
    rng: &'a mut FixtureRng,
    max: usize,
    poset_only: bool,
    counter: usize,
}

impl Draw<'_> {
    fn preorder(&mut self, min: usize) -> FinPreorder {
        let n = self.rng.gen_range(min..=self.max.max(min));
        let poset = self.poset_only || self.rng.gen_bool(0.5);
        self.counter += 1;
        let prefix = format!("{}", (b'a' + (self.counter % 26) as u8) as char);
        gen::random_preorder(self.rng, &prefix, n, poset)
    }

    fn map(&mut self, a: &FinPreorder, b: &FinPreorder) -> MonotoneMap {
        gen::random_map(self.rng, a, b).expect("codomain is nonempty")
    }

    fn relation(&mut self, a: &FinPreorder, b: &FinPreorder) -> MonotoneRelation {
        gen::random_relation(self.rng, a, b)
    }
}

fn random_squares(
    cfg: &BccConfig,
    poset_only: bool,
    rng: &mut FixtureRng,
) -> Vec<(String, CatalogInput)> {
    let mut d = Draw {
        rng,
        max: cfg.max_size.max(1),
        poset_only,
        counter: 0,
    };
    let mut out = Vec::new();
    for i in 0..cfg.samples {
        let (a, b, c) = (d.preorder(0), d.preorder(0), d.preorder(1));
        let f = d.map(&a, &c);
        let g = d.map(&b, &c);
        out.push((format!("comma#{i}"), CatalogInput::Comma(f, g)));

        let (c, a, b) = (d.preorder(0), d.preorder(1), d.preorder(1));
        let f = d.map(&c, &a);
        let g = d.map(&c, &b);
        out.push((format!("opcomma#{i}"), CatalogInput::OpComma(f, g)));

        let (a, b) = (d.preorder(0), d.preorder(1));
        let f = d.map(&a, &b);
        out.push((
            format!("yoneda-left#{i}"),
            CatalogInput::YonedaLeft(f.clone()),
        ));
        out.push((
            format!("yoneda-right#{i}"),
            CatalogInput::YonedaRight(f.clone()),
        ));
        if f.is_order_embedding() {
            out.push((format!("embedding#{i}"), CatalogInput::Embedding(f.clone())));
        }
        if f.is_absolutely_dense() {
            out.push((format!("abs-dense#{i}"), CatalogInput::AbsDense(f.clone())));
        }
        if let Some(u) = f.find_right_adjoint() {
            out.push((
                format!("adjunction-unit#{i}"),
                CatalogInput::AdjunctionUnit {
                    f: f.clone(),
                    u: u.clone(),
                },
            ));
            out.push((
                format!("adjunction-counit#{i}"),
                CatalogInput::AdjunctionCounit { f, u },
            ));
        }

        let (a, b, c) = (d.preorder(1), d.preorder(1), d.preorder(1));
        let r = d.relation(&a, &b);
        let s = d.relation(&b, &c);
        out.push((
            format!("pullback-of-fibrations#{i}"),
            CatalogInput::PullbackOfFibrations {
                outer: relation_to_fibration(&s),
                inner: relation_to_fibration(&r),
            },
        ));

        if let Some(sq) = random_exact_square(&mut d) {
            out.push((format!("random-exact#{i}"), CatalogInput::Custom(sq)));
        }
    }
    out
}

/// Samples lax squares until one is exact; gives up after a bounded number of draws.
fn random_exact_square(d: &mut Draw<'_>) -> Option<LaxSquare> {
    for _ in 0..64 {
        let (p, a, b, c) = (d.preorder(1), d.preorder(1), d.preorder(1), d.preorder(1));
        let p0 = d.map(&p, &a);
        let p1 = d.map(&p, &b);
        let f = d.map(&a, &c);
        let g = d.map(&b, &c);
        if let Ok(sq) = LaxSquare::new(p0, p1, f, g) {
            if exactness_witness(&sq).is_none() {
                return Some(sq);
            }
        }
    }
    None
}

fn is_cap(e: &Error) -> bool {
    matches!(e, Error::SizeCapExceeded { .. })
}

fn image_square(
    t: &FunctorExpr,
    sq: &LaxSquare,
    caps: &Caps,
) -> Result<std::result::Result<LaxSquare, String>> {
    let tp = apply_functor_ob(t, sq.vertex(), caps)?;
    let ta = apply_functor_ob(t, sq.f().dom(), caps)?;
    let tb = apply_functor_ob(t, sq.g().dom(), caps)?;
    let tc = apply_functor_ob(t, sq.f().cod(), caps)?;
    let tp0 = tp.map_to(&ta, sq.p0())?;
    let tp1 = tp.map_to(&tb, sq.p1())?;
    let tf = ta.map_to(&tc, sq.f())?;
    let tg = tb.map_to(&tc, sq.g())?;
    match LaxSquare::new(tp0, tp1, tf, tg) {
        Ok(img) => Ok(Ok(img)),
        Err(Error::NotLax(at)) => Ok(Err(at)),
        Err(e) => Err(e),
    }
}

fn evaluate(t: &FunctorExpr, case: &Case, caps: &Caps) -> Result<Outcome> {
    match case {
        Case::Square { id, kind, square } => {
            let image = match image_square(t, square, caps) {
                Err(e) if is_cap(&e) => return Ok(Outcome::Skipped),
                other => other?,
            };
            let fail = |detail| {
                Outcome::Fail(Box::new(Counterexample {
                    case: id.clone(),
                    kind: kind.name().to_string(),
                    detail,
                }))
            };
            Ok(match image {
                Err(at) => fail(Detail::NotLax {
                    square: square.clone(),
                    at,
                }),
                Ok(img) => match exactness_witness(&img) {
                    None => Outcome::Pass,
                    Some(witness) => fail(Detail::NotExact {
                        square: square.clone(),
                        image: img,
                        witness,
                    }),
                },
            })
        }
        Case::Law { id, r, s } => {
            let run = || -> Result<Option<(&'static str, Vec<MonotoneRelation>)>> {
                let lr = lift_relation(t, r, caps)?.relation;
                let ls = lift_relation(t, s, caps)?.relation;
                let lsr = lift_relation(t, &compose_rel(s, r)?, caps)?.relation;
                if compose_rel(&ls, &lr)? != lsr {
                    return Ok(Some((
                        "lift(S∘R) = lift(S)∘lift(R)",
                        vec![r.clone(), s.clone()],
                    )));
                }
                let ida = id_rel(r.src());
                let lid = lift_relation(t, &ida, caps)?;
                if lid.relation != id_rel(lid.src.preorder()) {
                    return Ok(Some(("lift(id) = id", vec![ida])));
                }
                Ok(None)
            };
            match run() {
                Err(e) if is_cap(&e) => Ok(Outcome::Skipped),
                Err(e) => Err(e),
                Ok(None) => Ok(Outcome::Pass),
                Ok(Some((law, relations))) => Ok(Outcome::Fail(Box::new(Counterexample {
                    case: id.clone(),
                    kind: "lifting-law".into(),
                    detail: Detail::Law { law, relations },
                }))),
            }
        }
    }
}

/// Runs the suite. Errors other than exceeded caps (which count as skipped
/// cases) are returned, e.g. a convex powerset over a proper preorder.
pub fn check_bcc(t: &FunctorExpr, cfg: &BccConfig) -> Result<BccReport> {
    let poset_only = t.needs_poset();
    let mut rng = gen::rng(cfg.seed);
    let mut cases = Vec::new();
    for (id, input) in fixed_squares(poset_only)
        .into_iter()
        .chain(random_squares(cfg, poset_only, &mut rng))
    {
        let kind = input.kind();
        let square = catalog_square(&input)?;
        debug_assert!(exactness_witness(&square).is_none(), "{id} must be exact");
        cases.push(Case::Square { id, kind, square });
    }
    let mut d = Draw {
        rng: &mut rng,
        max: cfg.max_size.max(1),
        poset_only,
        counter: 0,
    };
    for i in 0..cfg.law_samples {
        let (a, b, c) = (d.preorder(1), d.preorder(1), d.preorder(1));
        let r = d.relation(&a, &b);
        let s = d.relation(&b, &c);
        cases.push(Case::Law {
            id: format!("law#{i}"),
            r,
            s,
        });
    }

    let outcomes: Vec<Result<Outcome>> = cases
        .par_iter()
        .map(|case| evaluate(t, case, &cfg.caps))
        .collect();

    let mut report = BccReport {
        functor: t.to_string(),
        seed: cfg.seed,
        max_size: cfg.max_size,
        squares: Counter::default(),
        laws: Counter::default(),
        failures: 0,
        counterexample: None,
    };
    for (case, outcome) in cases.iter().zip(outcomes) {
        let counter = match case {
            Case::Square { .. } => &mut report.squares,
            Case::Law { .. } => &mut report.laws,
        };
        match outcome? {
            Outcome::Pass => {
                counter.checked += 1;
                counter.passed += 1;
            }
            Outcome::Skipped => counter.skipped += 1,
            Outcome::Fail(cx) => {
                counter.checked += 1;
                report.failures += 1;
                report.counterexample.get_or_insert(*cx);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::expr::{parse_functor, Registry};

    fn run(src: &str) -> BccReport {
        let t = parse_functor(src, &Registry::new()).unwrap();
        let cfg = BccConfig {
            seed: 7,
            samples: 3,
            law_samples: 4,
            ..BccConfig::default()
        };
        check_bcc(&t, &cfg).unwrap()
    }

    #[test]
    fn connected_components_fail_on_the_vee_embedding() {
        let rep = run("CC");
        let cx = rep.counterexample.clone().expect("must fail");
        assert_eq!(cx.case, "fixed:embedding-vee");
        assert!(matches!(cx.detail, Detail::NotExact { .. }));
        assert_eq!(rep.verdict(), "counterexample found");
    }

    #[test]
    fn powerset_passes() {
        let rep = run("P");
        assert!(rep.passed(), "{:?}", rep.counterexample);
        assert!(rep.squares.checked > 0 && rep.laws.checked > 0);
        assert_eq!(rep.verdict(), "no counterexample found");
    }

    #[test]
    fn dual_powerset_passes() {
        assert!(run("dual(P)").passed());
    }
}
