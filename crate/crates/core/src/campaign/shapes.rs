use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::config::{CampaignConfig, ConfigError, ShapeMode};
use crate::schema::{InputSchema, Shape};

/// Upper bound on the number of enumerated shapes.
pub const MAX_SHAPES: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct ShapeInfo {
    pub shape: Shape,
    pub cost: u64,
    pub elements: u64,
}

/// Every capped shape, sorted by predicted cost so that the shapes
/// admissible at budget `k` form a prefix.
#[derive(Debug, Clone)]
pub struct ShapeSpace {
    shapes: Vec<ShapeInfo>,
    mode: ShapeMode,
}

impl ShapeSpace {
    pub fn new(schema: &InputSchema, config: &CampaignConfig) -> Result<ShapeSpace, ConfigError> {
        let dims = schema.dims();
        let mut caps = Vec::with_capacity(dims.len());
        for d in &dims {
            caps.push(config.max_size.cap(d).ok_or_else(|| {
                ConfigError(format!("max_size has no entry for dimension `{d}`"))
            })?);
        }
        let info = |shape: Shape| ShapeInfo {
            cost: schema.shape_cost(&shape),
            elements: schema.element_count(&shape),
            shape,
        };
        let shapes = match config.shape_mode {
            ShapeMode::Fixed => vec![info(Shape(caps))],
            ShapeMode::CostBudget => {
                let total = caps
                    .iter()
                    .try_fold(1usize, |acc, c| acc.checked_mul(c + 1))
                    .filter(|n| *n <= MAX_SHAPES)
                    .ok_or_else(|| {
                        ConfigError(format!("more than {MAX_SHAPES} shapes under max_size"))
                    })?;
                let mut out = Vec::with_capacity(total);
                let mut current = vec![0usize; caps.len()];
                loop {
                    out.push(info(Shape(current.clone())));
                    // Odometer increment, last dimension fastest.
                    let mut i = caps.len();
                    loop {
                        if i == 0 {
                            break;
                        }
                        i -= 1;
                        if current[i] < caps[i] {
                            current[i] += 1;
                            break;
                        }
                        current[i] = 0;
                    }
                    if current.iter().all(|c| *c == 0) {
                        break;
                    }
                }
                out.sort_by(|a, b| (a.cost, &a.shape).cmp(&(b.cost, &b.shape)));
                out
            }
        };
        Ok(ShapeSpace {
            shapes,
            mode: config.shape_mode,
        })
    }

    pub fn all(&self) -> &[ShapeInfo] {
        &self.shapes
    }

    /// Number of shapes admissible at budget `k`.
    pub fn admissible_count(&self, k: u64) -> usize {
        match self.mode {
            ShapeMode::Fixed => self.shapes.len(),
            ShapeMode::CostBudget => self.shapes.partition_point(|s| s.cost <= k),
        }
    }

    pub fn admissible(&self, k: u64) -> &[ShapeInfo] {
        &self.shapes[..self.admissible_count(k)]
    }

    /// Budget from which every capped shape is admissible.
    pub fn k_cap(&self) -> u64 {
        match self.mode {
            ShapeMode::Fixed => 0,
            ShapeMode::CostBudget => self.shapes.last().map_or(0, |s| s.cost),
        }
    }

    /// Index of the largest admissible shape: highest cost, then most
    /// elements, then last in shape order.
    pub fn largest(&self, k: u64) -> Option<usize> {
        let n = self.admissible_count(k);
        (0..n).max_by(|&a, &b| {
            let (x, y) = (&self.shapes[a], &self.shapes[b]);
            (x.cost, x.elements, &x.shape).cmp(&(y.cost, y.elements, &y.shape))
        })
    }
}

/// Shapes whose longest path costs at most `k`, capped by `max_size`.
/// Fixed mode returns the single capped shape.
pub fn shape_for_budget(
    schema: &InputSchema,
    k: u64,
    config: &CampaignConfig,
) -> Result<Vec<Shape>, ConfigError> {
    let space = ShapeSpace::new(schema, config)?;
    Ok(space
        .admissible(k)
        .iter()
        .map(|s| s.shape.clone())
        .collect())
}

/// Assigns each input of a step to a shape. The largest admissible shape
/// gets the first `ceil(batch / 2)` inputs; the rest go one at a time to
/// the least-drawn admissible shape, ties to the earlier shape.
#[derive(Debug, Clone)]
pub struct Scheduler {
    draws: Vec<u64>,
}

impl Scheduler {
    pub fn new(space: &ShapeSpace) -> Self {
        Scheduler {
            draws: vec![0; space.all().len()],
        }
    }

    pub fn plan(&mut self, space: &ShapeSpace, k: u64, batch: usize) -> Vec<usize> {
        let n = space.admissible_count(k);
        let Some(largest) = space.largest(k) else {
            return Vec::new();
        };
        let half = batch.div_ceil(2);
        let mut plan = vec![largest; half];
        self.draws[largest] += half as u64;
        let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
            (0..n).map(|i| Reverse((self.draws[i], i))).collect();
        for _ in half..batch {
            let Reverse((count, i)) = heap.pop().expect("nonempty");
            plan.push(i);
            self.draws[i] = count + 1;
            heap.push(Reverse((count + 1, i)));
        }
        plan
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::config::MaxSize;
    use crate::corpus;

    fn config(max: usize) -> CampaignConfig {
        CampaignConfig {
            max_size: MaxSize::Uniform(max),
            ..CampaignConfig::default()
        }
    }

    #[test]
    fn linear_lengths_up_to_budget() {
        let s = corpus::linear_search();
        let shapes = shape_for_budget(&s.schema, 3, &config(10)).unwrap();
        assert_eq!(
            shapes,
            vec![
                Shape(vec![0]),
                Shape(vec![1]),
                Shape(vec![2]),
                Shape(vec![3])
            ]
        );
        assert_eq!(
            shape_for_budget(&s.schema, 0, &config(10)).unwrap(),
            vec![Shape(vec![0])]
        );
    }

    #[test]
    fn matrix_budget_admits_full_cube_at_its_cost() {
        let s = corpus::matrix_mult();
        let shapes = shape_for_budget(&s.schema, 8, &config(4)).unwrap();
        assert!(shapes.contains(&Shape(vec![2, 2, 2])));
        assert!(!shapes.contains(&Shape(vec![3, 3, 1])));
        let space = ShapeSpace::new(&s.schema, &config(2)).unwrap();
        assert_eq!(space.k_cap(), 8);
        assert_eq!(
            space.all()[space.largest(8).unwrap()].shape,
            Shape(vec![2, 2, 2])
        );
    }

    #[test]
    fn fixed_mode_is_single_capped_shape() {
        let s = corpus::matrix_mult();
        let mut cfg = config(3);
        cfg.shape_mode = ShapeMode::Fixed;
        for k in [0, 5, 100] {
            assert_eq!(
                shape_for_budget(&s.schema, k, &cfg).unwrap(),
                vec![Shape(vec![3, 3, 3])]
            );
        }
    }

    #[test]
    fn scheduler_gives_half_to_largest_and_covers_the_rest() {
        let s = corpus::linear_search();
        let space = ShapeSpace::new(&s.schema, &config(10)).unwrap();
        let mut sched = Scheduler::new(&space);
        let plan = sched.plan(&space, 5, 101);
        assert_eq!(plan.len(), 101);
        assert!(plan.iter().filter(|&&i| i == 5).count() >= 51);
        for i in 0..=5 {
            assert!(plan.contains(&i));
        }
    }

    #[test]
    fn missing_per_dimension_cap_is_an_error() {
        let s = corpus::matrix_mult();
        let cfg = CampaignConfig {
            max_size: MaxSize::PerDim([("m".to_string(), 2)].into()),
            ..CampaignConfig::default()
        };
        assert!(ShapeSpace::new(&s.schema, &cfg).is_err());
    }
}
