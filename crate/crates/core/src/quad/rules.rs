//! Double-exponential node sets and the level-refinement driver.
//!
//! Finite intervals use the tanh-sinh map
//! `x = c + r·tanh(π/2·sinh t)`, semi-infinite ones the exp-sinh map
//! `x = a + exp(π/2·sinh t)`. Level `L` uses step `h = 2^-L`; every level
//! after the first only adds the odd multiples of `h`, so the trapezoid sum
//! is refined as `S_L = S_{L-1}/2 + h·Σ_new`.

use crate::compensated::CompensatedSum;
use crate::Real;

use super::{QuadConfig, QuadError};

/// Levels below this are never accepted as converged.
pub const MIN_ACCEPT_LEVEL: u32 = 3;

/// Weights below this are dropped from the node set.
const WEIGHT_FLOOR: f64 = 1e-300;

/// One abscissa of a rule with its (already scaled) weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node<T> {
    pub t: T,
    pub abscissa: T,
    pub weight: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Rule<T> {
    TanhSinh { lower: T, upper: T },
    ExpSinh { lower: T },
}

fn weight_floor<T: Real>() -> T {
    T::from_f64(WEIGHT_FLOOR)
        .filter(|w| *w > T::zero())
        .unwrap_or_else(T::min_positive_value)
        .max(T::min_positive_value())
}

/// Positive offsets of one side at `level`, in increasing order.
fn side_offsets<T: Real>(level: u32) -> impl Iterator<Item = T> {
    let h = T::lit(0.5f64.powi(level as i32));
    (0u64..).map(move |j| {
        if level == 0 {
            T::lit((j + 1) as f64)
        } else {
            T::lit((2 * j + 1) as f64) * h
        }
    })
}

impl<T: Real> Rule<T> {
    fn center(&self) -> Node<T> {
        match *self {
            Rule::TanhSinh { lower, upper } => {
                let half = (upper - lower) / T::lit(2.0);
                Node {
                    t: T::zero(),
                    abscissa: lower + half,
                    weight: T::FRAC_PI_2() * half,
                }
            }
            Rule::ExpSinh { lower } => Node {
                t: T::zero(),
                abscissa: lower + T::one(),
                weight: T::FRAC_PI_2(),
            },
        }
    }

    /// Node at offset `t > 0` on `side`, or `None` once the node set is
    /// exhausted on that side (weight underflow, endpoint collision or
    /// overflow).
    fn node(&self, t: T, side: Side) -> Option<Node<T>> {
        let two = T::lit(2.0);
        match *self {
            Rule::TanhSinh { lower, upper } => {
                let half = (upper - lower) / two;
                let u = T::FRAC_PI_2() * t.sinh();
                // exp(-2u) keeps both the endpoint distance and the weight
                // free of cancellation.
                let e = (-two * u).exp();
                let one_e = T::one() + e;
                let delta = two * e / one_e;
                let weight = T::FRAC_PI_2() * t.cosh() * T::lit(4.0) * e / (one_e * one_e) * half;
                let (abscissa, signed_t) = match side {
                    Side::Left => (lower + half * delta, -t),
                    Side::Right => (upper - half * delta, t),
                };
                let keep = weight >= weight_floor::<T>() && abscissa > lower && abscissa < upper;
                keep.then_some(Node {
                    t: signed_t,
                    abscissa,
                    weight,
                })
            }
            Rule::ExpSinh { lower } => {
                let signed_t = match side {
                    Side::Left => -t,
                    Side::Right => t,
                };
                let ex = (T::FRAC_PI_2() * signed_t.sinh()).exp();
                let abscissa = lower + ex;
                let weight = T::FRAC_PI_2() * t.cosh() * ex;
                let keep = match side {
                    Side::Left => weight >= weight_floor::<T>() && abscissa > lower,
                    Side::Right => abscissa.is_finite() && weight.is_finite(),
                };
                keep.then_some(Node {
                    t: signed_t,
                    abscissa,
                    weight,
                })
            }
        }
    }

    fn side(&self, level: u32, side: Side) -> impl Iterator<Item = Node<T>> + '_ {
        side_offsets::<T>(level).map_while(move |t| self.node(t, side))
    }

    /// Every node introduced at `level` (the centre belongs to level 0).
    pub(crate) fn level_nodes(&self, level: u32) -> Vec<Node<T>> {
        let mut nodes = Vec::new();
        if level == 0 {
            nodes.push(self.center());
        }
        nodes.extend(self.side(level, Side::Left));
        nodes.extend(self.side(level, Side::Right));
        nodes
    }
}

/// Nodes a tanh-sinh rule on `[lower, upper]` introduces at `level`.
pub fn tanh_sinh_nodes<T: Real>(lower: T, upper: T, level: u32) -> Vec<Node<T>> {
    Rule::TanhSinh { lower, upper }.level_nodes(level)
}

/// Nodes an exp-sinh rule on `[lower, ∞)` introduces at `level`.
pub fn exp_sinh_nodes<T: Real>(lower: T, level: u32) -> Vec<Node<T>> {
    Rule::ExpSinh { lower }.level_nodes(level)
}

/// Result of running the refinement loop.
#[derive(Debug, Clone)]
pub(crate) struct Outcome<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
    pub converged: bool,
    /// Trapezoid estimate after each completed level.
    pub levels: Vec<T>,
    pub reason: &'static str,
}

struct Sampler<'f, T, F> {
    rule: Rule<T>,
    f: &'f mut F,
    evaluations: usize,
    max_evals: usize,
    max_term: T,
    /// Largest `|t|` later levels sample on each side, fixed at level 0.
    extent: [T; 2],
}

impl<T, F> Sampler<'_, T, F>
where
    T: Real,
    F: FnMut(T, T) -> Result<T, QuadError>,
{
    fn term(&mut self, node: &Node<T>) -> Result<Option<T>, QuadError> {
        if self.evaluations >= self.max_evals {
            return Ok(None);
        }
        self.evaluations += 1;
        let fx = (self.f)(node.abscissa, node.weight)?;
        if !fx.is_finite() {
            return Err(QuadError::Evaluation {
                at: node.abscissa.to_f64().unwrap_or(f64::NAN),
                message: format!("integrand returned {fx}"),
            });
        }
        let term = node.weight * fx;
        self.max_term = self.max_term.max(term.abs());
        Ok(Some(term))
    }

    /// Weighted sum over the nodes new at `level`; `None` when the
    /// evaluation budget ran out part way.
    ///
    /// At level 0 each side is scanned outward and abandoned once two
    /// consecutive terms past `|t| = 1` fall below `ε²` times the largest
    /// term seen: the remaining tail is below rounding, and its far nodes
    /// can overflow or underflow the integrand. Later levels only fill in
    /// midpoints inside the range level 0 covered.
    fn level_sum(&mut self, level: u32) -> Result<Option<T>, QuadError> {
        let mut acc = CompensatedSum::new();
        if level == 0 {
            let c = self.rule.center();
            match self.term(&c)? {
                Some(v) => acc.add(v),
                None => return Ok(None),
            }
        }
        let cutoff = T::epsilon() * T::epsilon();
        let rule = self.rule;
        for (i, side) in [Side::Left, Side::Right].into_iter().enumerate() {
            let mut negligible = 0;
            if level == 0 {
                // Unbounded unless the scan below stops on negligible terms;
                // otherwise the node set itself ends the side.
                self.extent[i] = T::infinity();
            }
            for node in rule.side(level, side) {
                let at = node.t.abs();
                if level > 0 && at >= self.extent[i] {
                    break;
                }
                let Some(term) = self.term(&node)? else {
                    return Ok(None);
                };
                acc.add(term);
                if level == 0 {
                    if at >= T::one() && term.abs() <= cutoff * self.max_term {
                        negligible += 1;
                        if negligible >= 2 {
                            self.extent[i] = at;
                            break;
                        }
                    } else {
                        negligible = 0;
                    }
                }
            }
        }
        Ok(Some(acc.value()))
    }
}

/// Refines level by level until two successive estimates agree within the
/// configured tolerance (from [`MIN_ACCEPT_LEVEL`] on), or `max_level` /
/// `max_evals` is exhausted. With `accept == false` every level runs.
pub(crate) fn refine<T, F>(
    rule: Rule<T>,
    f: &mut F,
    config: &QuadConfig<T>,
    accept: bool,
) -> Result<Outcome<T>, QuadError>
where
    T: Real,
    F: FnMut(T, T) -> Result<T, QuadError>,
{
    let mut sampler = Sampler {
        rule,
        f,
        evaluations: 0,
        max_evals: config.max_evals,
        max_term: T::zero(),
        extent: [T::zero(); 2],
    };
    let mut levels: Vec<T> = Vec::new();
    let mut error = T::infinity();
    for level in 0..=config.max_level {
        let Some(new_sum) = sampler.level_sum(level)? else {
            return Ok(Outcome {
                value: levels.last().copied().unwrap_or_else(T::nan),
                error,
                evaluations: sampler.evaluations,
                converged: false,
                levels,
                reason: "evaluation budget exhausted",
            });
        };
        let estimate = match levels.last() {
            None => new_sum,
            Some(&prev) => {
                let h = T::lit(0.5f64.powi(level as i32));
                prev / T::lit(2.0) + h * new_sum
            }
        };
        if let Some(&prev) = levels.last() {
            error = (estimate - prev).abs();
        }
        levels.push(estimate);
        if accept && level >= MIN_ACCEPT_LEVEL && error <= config.tolerance_for(estimate) {
            return Ok(Outcome {
                value: estimate,
                error,
                evaluations: sampler.evaluations,
                converged: true,
                levels,
                reason: "",
            });
        }
    }
    Ok(Outcome {
        value: levels.last().copied().unwrap_or_else(T::nan),
        error,
        evaluations: sampler.evaluations,
        converged: false,
        levels,
        reason: "maximum level reached",
    })
}
