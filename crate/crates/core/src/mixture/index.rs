use super::Mixture;
use crate::eval::Evaluable;

/// Components sharing one scale, sorted by their first coordinate.
struct ScaleGroup {
    window: f64,
    keys: Vec<f64>,
    members: Vec<usize>,
}

/// Windowed evaluator for large mixtures.
///
/// A component contributes to `x` only when `|x_0 - mu_0| <= R_g * sigma`,
/// where `R_g` is the kernel's effective radius. Constructed mixtures have one
/// or two distinct scales, so each query is a binary search plus a short scan.
pub struct MixtureIndex<'a> {
    mix: &'a Mixture,
    groups: Vec<ScaleGroup>,
}

impl<'a> MixtureIndex<'a> {
    pub fn new(mix: &'a Mixture) -> Self {
        let reach = mix.kernel().effective_radius();
        let mut order: Vec<usize> = (0..mix.len()).collect();
        let comps = mix.components();
        order.sort_by(|&a, &b| {
            comps[a]
                .scale
                .total_cmp(&comps[b].scale)
                .then(comps[a].location[0].total_cmp(&comps[b].location[0]))
                .then(a.cmp(&b))
        });
        let mut groups: Vec<ScaleGroup> = Vec::new();
        for i in order {
            let c = &comps[i];
            match groups.last_mut() {
                Some(g) if g.window == reach * c.scale => {
                    g.keys.push(c.location[0]);
                    g.members.push(i);
                }
                _ => groups.push(ScaleGroup {
                    window: reach * c.scale,
                    keys: vec![c.location[0]],
                    members: vec![i],
                }),
            }
        }
        Self { mix, groups }
    }

    pub fn mixture(&self) -> &Mixture {
        self.mix
    }
}

impl Evaluable for MixtureIndex<'_> {
    fn dim(&self) -> usize {
        self.mix.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut buf = vec![0.0; self.mix.dim()];
        let comps = self.mix.components();
        let mut total = 0.0;
        for g in &self.groups {
            let lo = x[0] - g.window;
            let hi = x[0] + g.window;
            let start = g.keys.partition_point(|&k| k < lo);
            for (key, &i) in g.keys[start..].iter().zip(&g.members[start..]) {
                if *key > hi {
                    break;
                }
                total += self.mix.component_value(&comps[i], x, &mut buf);
            }
        }
        total
    }

    fn radius(&self) -> f64 {
        self.mix.radius()
    }

    fn sup_bound(&self) -> f64 {
        self.mix.sup_bound()
    }
}
