//! Experiment drivers shared by the command line runner and the acceptance
//! tests. Every driver is a pure function of its parameters and seed and
//! returns a [`Report`] with named checks and CSV curves.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dynamics::{
    builtin_model, covariance_decay_profile, simulate_diffusion, BuiltinModel, ConsensusSde, DiffusionDynamics,
    DiscreteDynamics, DiscreteModel, Dynamics, NoisePlan, Params, TrajectorySet,
};
use crate::empirical::{
    component_functional_distribution, depth_sensitivity, ergodicity_variance_curve, giant_fraction,
    global_empirical, root_law_monte_carlo, LocalFunctional, PairProduct, shift_average, tv_discrete, wasserstein1_paths,
    PathLaw, WindowMean, DEFAULT_W1_SAMPLE_CAP,
};
use crate::error::{Error, Result};
use crate::gibbs::{
    conditional_kernel, exact_gibbs, glauber_sample, iid_marks, outer_boundary, single_site_kernel, GibbsSpec,
    GlauberChain, Label,
};
use crate::graphs::{
    ball, gen_canopy_truncation, gen_erdos_renyi, gen_lattice_box, gen_random_regular,
    gen_regular_tree, largest_component, Graph, LatticeBox, RootedGraph,
};
use crate::limit_trees::{
    dual_distribution, extinction_fixed_point, poisson_dual, sample_ugw, survival_prob, DegreeDist,
};
use crate::local_topology::{histogram_tv, neighborhood_histogram_with_cap, sampled_histogram};
use crate::rng::{derive_seed, seeded_rng, Seed};
use crate::stats::{ks_two_sample, loglog_slope};
use crate::Symbol;

/// One pass/fail comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: String,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: "<".into(),
            bound,
            passed: value < bound,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: "<=".into(),
            bound,
            passed: value <= bound,
        }
    }

    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: ">".into(),
            bound,
            passed: value > bound,
        }
    }

    /// `|value - target| < tol`; reports the absolute deviation.
    pub fn near(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Check::below(name, (value - target).abs(), tol)
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            relation: "==".into(),
            bound: 1.0,
            passed: ok,
        }
    }
}

/// Rows `(x, value, ci)`; `ci` is left blank when there is none.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curve {
    pub name: String,
    pub rows: Vec<(f64, f64, Option<f64>)>,
}

impl Curve {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "x,value,ci")?;
        for (x, y, ci) in &self.rows {
            match ci {
                Some(c) => writeln!(out, "{x},{y},{c}")?,
                None => writeln!(out, "{x},{y},")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub experiment: String,
    pub seed: Seed,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub details: BTreeMap<String, Value>,
    #[serde(skip)]
    pub curves: Vec<Curve>,
}

impl Report {
    pub fn new(experiment: &str, seed: Seed) -> Self {
        Report {
            experiment: experiment.into(),
            seed,
            passed: true,
            checks: Vec::new(),
            details: BTreeMap::new(),
            curves: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.details.insert(key.into(), v);
    }

    pub fn curve(&mut self, name: &str, rows: Vec<(f64, f64, Option<f64>)>) {
        self.curves.push(Curve { name: name.into(), rows });
    }

    /// Folds another report in, prefixing its check names.
    pub fn absorb(&mut self, other: Report) {
        let prefix = other.experiment.clone();
        for mut c in other.checks {
            c.name = format!("{prefix}: {}", c.name);
            self.check(c);
        }
        self.details.insert(prefix.clone(), serde_json::to_value(other.details).unwrap_or(Value::Null));
        for mut c in other.curves {
            c.name = format!("{prefix}_{}", c.name);
            self.curves.push(c);
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// Sparse random graph family together with its local limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphFamily {
    /// `G(n, theta / n)`, limit UGW(Poisson(theta)).
    ErdosRenyi { theta: f64 },
    /// Uniform simple `degree`-regular graph, limit the regular tree.
    RandomRegular { degree: usize },
}

impl GraphFamily {
    pub fn sample(&self, n: usize, seed: Seed) -> Result<Graph> {
        match *self {
            GraphFamily::ErdosRenyi { theta } => {
                if !(theta >= 0.0) || theta > n as f64 {
                    return Err(Error::invalid(format!("theta {theta} outside [0, n]")));
                }
                gen_erdos_renyi(n, theta / n as f64, seed)
            }
            GraphFamily::RandomRegular { degree } => Ok(gen_random_regular(n, degree, seed)?.graph),
        }
    }

    /// Degree law of the limiting unimodular tree.
    pub fn limit_degrees(&self) -> Result<DegreeDist<f64>> {
        match *self {
            GraphFamily::ErdosRenyi { theta } => DegreeDist::poisson(theta),
            GraphFamily::RandomRegular { degree } => DegreeDist::dirac(degree),
        }
    }
}

/// A model from the registry, with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    #[serde(default)]
    pub params: Params,
}

impl ModelSpec {
    pub fn voter() -> Self {
        ModelSpec {
            name: "voter".into(),
            params: Params::new(),
        }
    }

    pub fn build(&self) -> Result<BuiltinModel<f64>> {
        builtin_model(&self.name, &self.params)
    }

    fn discrete(&self) -> Result<Box<dyn DiscreteModel<State = Symbol>>> {
        match self.build()? {
            BuiltinModel::Discrete(m) => Ok(m),
            BuiltinModel::Diffusion(_) => Err(Error::invalid(format!("{} is not a discrete model", self.name))),
        }
    }
}

/// Initial condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    /// Independent symbols with law `lambda`.
    Iid { lambda: Vec<f64> },
    /// Independent uniform values on `[-radius, radius]` in each coordinate.
    Uniform { radius: f64 },
    /// Every coordinate equal to `value`.
    Constant { value: f64 },
    /// Glauber sample of the Gibbs measure on the simulated graph.
    Gibbs {
        alphabet: Vec<Label>,
        psi: Vec<Vec<f64>>,
        lambda: Vec<f64>,
        sweeps: usize,
    },
}

impl InitSpec {
    pub fn fair_coin() -> Self {
        InitSpec::Iid { lambda: vec![0.5, 0.5] }
    }

    pub fn symbols(&self, g: &Graph, seed: Seed) -> Result<Vec<Symbol>> {
        let n = g.vertex_count();
        match self {
            InitSpec::Iid { lambda } => iid_marks(n, lambda, seed),
            InitSpec::Constant { value } => {
                if *value < 0.0 || value.fract() != 0.0 || *value > Symbol::MAX as f64 {
                    return Err(Error::invalid(format!("constant symbol {value} is not a symbol index")));
                }
                Ok(vec![*value as Symbol; n])
            }
            InitSpec::Uniform { .. } => Err(Error::invalid("uniform initial values need a diffusion model")),
            InitSpec::Gibbs {
                alphabet,
                psi,
                lambda,
                sweeps,
            } => {
                let spec = GibbsSpec::<f64>::new(alphabet.clone(), psi.clone(), lambda.clone())?;
                glauber_sample(g, &spec, *sweeps, None, seed)
            }
        }
    }

    /// `dim` values per vertex.
    pub fn reals(&self, g: &Graph, dim: usize, seed: Seed) -> Result<Vec<f64>> {
        let n = g.vertex_count() * dim;
        match self {
            InitSpec::Uniform { radius } => {
                if !(*radius >= 0.0) || !radius.is_finite() {
                    return Err(Error::invalid(format!("uniform radius {radius}")));
                }
                let mut rng = seeded_rng(seed);
                Ok((0..n).map(|_| rng.gen_range(-1.0..=1.0) * radius).collect())
            }
            InitSpec::Constant { value } => Ok(vec![*value; n]),
            InitSpec::Iid { .. } | InitSpec::Gibbs { .. } => {
                let symbols = self.symbols(g, seed)?;
                let labels = match self {
                    InitSpec::Gibbs { alphabet, .. } => alphabet.iter().map(Label::value).collect(),
                    _ => (0..).take(symbols.len()).map(|i| Some(i as f64)).collect::<Vec<_>>(),
                };
                let value = |s: Symbol| match self {
                    InitSpec::Gibbs { .. } => labels[s as usize]
                        .ok_or_else(|| Error::invalid("Gibbs initial values need numeric labels")),
                    _ => Ok(f64::from(s)),
                };
                symbols
                    .iter()
                    .flat_map(|&s| std::iter::repeat(s).take(dim))
                    .map(value)
                    .collect()
            }
        }
    }
}

// ---------------------------------------------------------------- duality

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualityParams {
    pub thetas: Vec<f64>,
    /// Degree law in `DegreeDist::parse` syntax; replaces `thetas`.
    pub rho: Option<String>,
    pub identity_tolerance: f64,
    pub law_tolerance: f64,
}

impl Default for DualityParams {
    fn default() -> Self {
        DualityParams {
            thetas: vec![1.5, 2.0, 3.0],
            rho: None,
            identity_tolerance: 1e-12,
            law_tolerance: 1e-8,
        }
    }
}

/// Dual law of supercritical Poisson (or given) degree laws, checked
/// against the closed-form Poisson dual.
pub fn duality(p: &DualityParams, seed: Seed) -> Result<Report> {
    let mut report = Report::new("duality", seed);
    if let Some(spec) = &p.rho {
        let rho = DegreeDist::<f64>::parse(spec)?;
        let dual = dual_distribution(&rho)?;
        report.check(Check::at_most("dual theta", dual.dual_theta, 1.0));
        report.detail("report", &dual);
        return Ok(report);
    }
    let mut reports = Vec::new();
    for &theta in &p.thetas {
        let rho = DegreeDist::<f64>::poisson(theta)?;
        let dual = dual_distribution(&rho)?;
        let closed = poisson_dual(theta)?;
        let identity = (closed * (-closed).exp() - theta * (-theta).exp()).abs();
        report.check(Check::below(format!("theta {theta}: t e^-t identity"), identity, p.identity_tolerance));
        let len = dual.dual.probs().len();
        let poisson = DegreeDist::<f64>::poisson(closed)?;
        let mut matched: Vec<f64> = (0..len).map(|k| poisson.prob(k)).collect();
        let mass: f64 = matched.iter().sum();
        matched.iter_mut().for_each(|x| *x /= mass);
        let tv = dual.dual.tv(&DegreeDist::from_probs(matched)?);
        report.check(Check::below(format!("theta {theta}: TV(dual, Poisson)"), tv, p.law_tolerance));
        report.check(Check::near(format!("theta {theta}: theta beta"), theta * dual.beta, closed, p.law_tolerance));
        report.check(Check::near(
            format!("theta {theta}: dual theta"),
            dual.dual_theta,
            closed,
            p.law_tolerance,
        ));
        reports.push(json!({
            "theta": theta,
            "survival": dual.survival,
            "alpha": dual.alpha,
            "beta": dual.beta,
            "dual_theta": dual.dual_theta,
            "poisson_dual": closed,
        }));
    }
    if let [only] = reports.as_slice() {
        for key in ["theta", "survival", "alpha", "beta", "dual_theta", "poisson_dual"] {
            report.detail(key, &only[key]);
        }
    } else {
        report.detail("thetas", reports);
    }
    Ok(report)
}

// ------------------------------------------------------------ giant component

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GiantParams {
    pub n: usize,
    pub theta: f64,
    pub replicas: usize,
    pub tolerance: f64,
}

impl Default for GiantParams {
    fn default() -> Self {
        GiantParams {
            n: 20_000,
            theta: 2.0,
            replicas: 10,
            tolerance: 0.02,
        }
    }
}

/// `|C_max| / n` for `G(n, theta/n)` against the survival probability.
pub fn giant_component(p: &GiantParams, seed: Seed) -> Result<Report> {
    let mut report = Report::new("giant", seed);
    let s = survival_prob(&DegreeDist::<f64>::poisson(p.theta)?)?;
    let family = GraphFamily::ErdosRenyi { theta: p.theta };
    let (mean, stderr) = giant_fraction(|n, s| family.sample(n, s), p.n, p.replicas, seed)?;
    report.check(Check::near("giant fraction vs survival", mean, s, p.tolerance));
    report.detail("mean", mean);
    report.detail("stderr", stderr);
    report.detail("survival", s);
    Ok(report)
}

// ------------------------------------------------------- local weak limits

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LwcParams {
    pub family: GraphFamily,
    pub sizes: Vec<usize>,
    pub radius: usize,
    pub tree_samples: usize,
    /// Size cap for canonical codes of balls containing cycles.
    pub iso_cap: usize,
    pub tolerance: f64,
}

impl Default for LwcParams {
    fn default() -> Self {
        LwcParams {
            family: GraphFamily::ErdosRenyi { theta: 2.0 },
            sizes: vec![300, 1000, 3000, 10_000],
            radius: 2,
            tree_samples: 100_000,
            iso_cap: 64,
            tolerance: 0.05,
        }
    }
}

/// Ball histograms of growing graphs against the limit tree.
pub fn lwc_test(p: &LwcParams, seed: Seed) -> Result<Report> {
    if p.sizes.is_empty() {
        return Err(Error::invalid("sizes must be nonempty"));
    }
    let mut report = Report::new("lwc-test", seed);
    let rho = p.family.limit_degrees()?;
    let r = p.radius;
    let sampler = |s: Seed| sample_ugw(&rho, r, s).map(|t| t.tree).expect("limit tree within budget");
    let limit = sampled_histogram(&sampler, r, p.tree_samples, derive_seed(seed, 0))?;
    let mut tvs = Vec::new();
    for (i, &n) in p.sizes.iter().enumerate() {
        let g = p.family.sample(n, derive_seed(seed, 1 + i as u64))?;
        tvs.push(histogram_tv(&neighborhood_histogram_with_cap(&g, r, p.iso_cap)?, &limit)?);
    }
    report.check(Check::holds("TV strictly decreasing in n", strictly_decreasing(&tvs)));
    report.check(Check::below("TV at largest n", *tvs.last().expect("nonempty"), p.tolerance));
    report.detail("sizes", &p.sizes);
    report.detail("tv", &tvs);
    report.detail("limit_ball_types", limit.counts.len());
    report.curve("tv_vs_n", p.sizes.iter().zip(&tvs).map(|(&n, &t)| (n as f64, t, None)).collect());
    Ok(report)
}

// ---------------------------------------------------- empirical measures

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmpParams {
    pub family: GraphFamily,
    pub sizes: Vec<usize>,
    pub model: ModelSpec,
    pub init: InitSpec,
    /// Steps for discrete models, time for diffusions.
    pub horizon: f64,
    pub dt: f64,
    /// Root-law replicas.
    pub replicas: usize,
    /// Tree depth for diffusions; discrete models use the horizon.
    pub tree_depth: usize,
    pub tolerance: f64,
}

impl Default for EmpParams {
    fn default() -> Self {
        EmpParams {
            family: GraphFamily::ErdosRenyi { theta: 1.5 },
            sizes: vec![300, 1000, 3000, 10_000],
            model: ModelSpec::voter(),
            init: InitSpec::fair_coin(),
            horizon: 4.0,
            dt: 0.01,
            replicas: 100_000,
            tree_depth: 4,
            tolerance: 0.05,
        }
    }
}

fn steps_of(horizon: f64) -> Result<usize> {
    if !(horizon >= 0.0) || horizon.fract() != 0.0 {
        return Err(Error::invalid(format!("discrete horizon {horizon} must be a whole number of steps")));
    }
    Ok(horizon as usize)
}

fn tree_sampler(rho: &DegreeDist<f64>, depth: usize) -> impl Fn(Seed) -> Result<RootedGraph> + Sync + '_ {
    move |s| Ok(sample_ugw(rho, depth, s)?.tree)
}

/// Global empirical measure of growing graphs against the root law of the
/// limit tree: exact TV for discrete models, W1 for diffusions.
pub fn emp_test(p: &EmpParams, seed: Seed) -> Result<Report> {
    if p.sizes.is_empty() {
        return Err(Error::invalid("sizes must be nonempty"));
    }
    let mut report = Report::new("emp-test", seed);
    let rho = p.family.limit_degrees()?;
    let distances = match p.model.build()? {
        BuiltinModel::Discrete(m) => {
            let k = steps_of(p.horizon)?;
            let dy = DiscreteDynamics { model: &*m, steps: k };
            let init = |t: &RootedGraph, s: Seed| p.init.symbols(t.graph(), s);
            let root = root_law_monte_carlo(tree_sampler(&rho, k), init, &dy, p.replicas, derive_seed(seed, 0))?;
            let mut tvs = Vec::new();
            for (i, &n) in p.sizes.iter().enumerate() {
                let s = derive_seed(seed, 1 + i as u64);
                let g = p.family.sample(n, derive_seed(s, 0))?;
                let marks = p.init.symbols(&g, derive_seed(s, 1))?;
                let ts = dy.simulate(&g, &marks, &NoisePlan::shared(derive_seed(s, 2)))?;
                tvs.push(tv_discrete(&global_empirical(&ts)?, &root)?);
            }
            report.detail("metric", "tv");
            tvs
        }
        BuiltinModel::Diffusion(m) => {
            let dy = DiffusionDynamics {
                model: &*m,
                horizon: p.horizon,
                dt: p.dt,
            };
            let d = m.dim();
            let init = |t: &RootedGraph, s: Seed| p.init.reals(t.graph(), d, s);
            let depth_sampler = |depth: usize, s: Seed| Ok(sample_ugw(&rho, depth, s)?.tree);
            let root = root_law_monte_carlo(
                tree_sampler(&rho, p.tree_depth),
                init,
                &dy,
                p.replicas,
                derive_seed(seed, 0),
            )?;
            let shift = depth_sensitivity(depth_sampler, init, &dy, p.tree_depth, p.replicas, derive_seed(seed, 0))?;
            report.detail("depth_sensitivity_w1", shift);
            let mut w1s = Vec::new();
            for (i, &n) in p.sizes.iter().enumerate() {
                let s = derive_seed(seed, 1 + i as u64);
                let g = p.family.sample(n, derive_seed(s, 0))?;
                let marks = p.init.reals(&g, d, derive_seed(s, 1))?;
                let ts = dy.simulate(&g, &marks, &NoisePlan::shared(derive_seed(s, 2)))?;
                let mu = global_empirical(&ts)?;
                w1s.push(wasserstein1_paths(&mu, &root, p.horizon, DEFAULT_W1_SAMPLE_CAP, derive_seed(s, 3))?);
            }
            report.detail("metric", "w1");
            w1s
        }
    };
    report.check(Check::holds("distance strictly decreasing in n", strictly_decreasing(&distances)));
    report.check(Check::below("distance at largest n", *distances.last().expect("nonempty"), p.tolerance));
    report.detail("sizes", &p.sizes);
    report.detail("distance", &distances);
    report.curve(
        "distance_vs_n",
        p.sizes.iter().zip(&distances).map(|(&n, &t)| (n as f64, t, None)).collect(),
    );
    Ok(report)
}

// ------------------------------------------- connected component measures

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompEmpParams {
    pub n: usize,
    pub model: ModelSpec,
    pub init: InitSpec,
    pub steps: usize,
    pub subcritical_theta: f64,
    pub supercritical_theta: f64,
    pub root_draws: usize,
    pub tree_draws: usize,
    /// Replicas of the survival-conditioned root law.
    pub replicas: usize,
    /// Graphs pooled into the giant-conditioned empirical measure.
    pub giant_graphs: usize,
    pub ks_tolerance: f64,
    pub fraction_tolerance: f64,
    pub tv_tolerance: f64,
    pub giant: GiantParams,
}

impl Default for CompEmpParams {
    fn default() -> Self {
        CompEmpParams {
            n: 10_000,
            model: ModelSpec::voter(),
            init: InitSpec::fair_coin(),
            steps: 3,
            subcritical_theta: 0.5,
            supercritical_theta: 2.0,
            root_draws: 2000,
            tree_draws: 20_000,
            replicas: 100_000,
            giant_graphs: 5,
            ks_tolerance: 0.05,
            fraction_tolerance: 0.03,
            tv_tolerance: 0.07,
            giant: GiantParams::default(),
        }
    }
}

/// Fraction of vertices in symbol 1 at the final step.
fn final_ones(steps: usize) -> impl Fn(&[Symbol]) -> f64 + Sync {
    move |path| if path[steps] == 1 { 1.0 } else { 0.0 }
}

/// Subcritical regime: the law of `<mu^{C_Unif}, f>` against the same
/// functional of the whole GW tree.
pub fn component_subcritical(p: &CompEmpParams, seed: Seed) -> Result<Report> {
    let mut report = Report::new("subcritical", seed);
    let m = p.model.discrete()?;
    let dy = DiscreteDynamics {
        model: &*m,
        steps: p.steps,
    };
    let family = GraphFamily::ErdosRenyi {
        theta: p.subcritical_theta,
    };
    let f = final_ones(p.steps);
    let init = |c: &RootedGraph, s: Seed| p.init.symbols(c.graph(), s);
    let draws = component_functional_distribution(
        |s| family.sample(p.n, s),
        init,
        &dy,
        &f,
        p.root_draws,
        derive_seed(seed, 0),
    )?;
    let rho = family.limit_degrees()?;
    let tree_values = (0..p.tree_draws as u64)
        .into_par_iter()
        .map(|i| {
            let s = derive_seed(derive_seed(seed, 1), i);
            let tree = sample_ugw(&rho, usize::MAX, derive_seed(s, 0))?;
            if tree.truncated {
                return Err(Error::Diagnostic("subcritical tree hit the vertex budget".into()));
            }
            let marks = init(&tree.tree, derive_seed(s, 1))?;
            let ts = dy.simulate(tree.tree.graph(), &marks, &NoisePlan::shared(derive_seed(s, 2)))?;
            Ok(global_empirical(&ts)?.integrate(&f))
        })
        .collect::<Result<Vec<f64>>>()?;
    let graph_values: Vec<f64> = draws.iter().map(|d| d.value).collect();
    let ks = ks_two_sample(&graph_values, &tree_values)?;
    report.check(Check::below("KS(component functional, tree functional)", ks, p.ks_tolerance));
    report.detail("ks", ks);
    report.detail("graph_mean", crate::stats::mean(&graph_values));
    report.detail("tree_mean", crate::stats::mean(&tree_values));
    Ok(report)
}

/// Draws `B_k` of UGW(rho) conditioned on survival: a depth-`k` sample is
/// kept with probability `1 - q_hat^{N_k}`, `N_k` the size of generation `k`.
pub fn survival_conditioned_ball(rho: &DegreeDist<f64>, k: usize, q_hat: f64, seed: Seed) -> Result<RootedGraph> {
    for attempt in 0..1_000_000u64 {
        let s = derive_seed(seed, attempt);
        let tree = sample_ugw(rho, k, derive_seed(s, 0))?;
        let frontier = tree.generation_size(k) as i32;
        let keep = 1.0 - q_hat.powi(frontier);
        if seeded_rng(derive_seed(s, 1)).gen::<f64>() < keep {
            return Ok(tree.tree);
        }
    }
    Err(Error::NoConvergence { iterations: 1_000_000 })
}

/// Supercritical regime: mass of the giant and the giant-conditioned
/// empirical measure against the survival-conditioned root law.
pub fn component_supercritical(p: &CompEmpParams, seed: Seed) -> Result<Report> {
    let mut report = Report::new("supercritical", seed);
    let m = p.model.discrete()?;
    let dy = DiscreteDynamics {
        model: &*m,
        steps: p.steps,
    };
    let family = GraphFamily::ErdosRenyi {
        theta: p.supercritical_theta,
    };
    let rho = family.limit_degrees()?;
    let s = survival_prob(&rho)?;
    let f = final_ones(p.steps);
    let init = |c: &RootedGraph, s: Seed| p.init.symbols(c.graph(), s);
    let draws = component_functional_distribution(
        |s| family.sample(p.n, s),
        init,
        &dy,
        &f,
        p.root_draws,
        derive_seed(seed, 0),
    )?;
    let fraction = draws.iter().filter(|d| d.in_largest).count() as f64 / draws.len() as f64;
    report.check(Check::near("root draws in C_max vs survival", fraction, s, p.fraction_tolerance));

    let mut parts = Vec::new();
    for j in 0..p.giant_graphs as u64 {
        let sj = derive_seed(derive_seed(seed, 1), j);
        let g = family.sample(p.n, derive_seed(sj, 0))?;
        let giant = largest_component(&g)?;
        let marks = init(&giant, derive_seed(sj, 1))?;
        let ts = dy.simulate(giant.graph(), &marks, &NoisePlan::shared(derive_seed(sj, 2)))?;
        parts.push((1.0, PathLaw::from_empirical(&global_empirical(&ts)?)));
    }
    let giant_law = PathLaw::mixture(&parts)?;
    let q_hat = extinction_fixed_point(&rho.size_biased()?)?;
    let root = root_law_monte_carlo(
        |s| survival_conditioned_ball(&rho, p.steps, q_hat, s),
        init,
        &dy,
        p.replicas,
        derive_seed(seed, 2),
    )?;
    let tv = giant_law.tv(&PathLaw::from_empirical(&root));
    report.check(Check::below("TV(giant empirical, surviving root law)", tv, p.tv_tolerance));
    report.detail("survival", s);
    report.detail("fraction_in_giant", fraction);
    report.detail("tv", tv);
    Ok(report)
}

pub fn comp_emp_test(p: &CompEmpParams, seed: Seed) -> Result<Report> {
    let mut report = Report::new("comp-emp-test", seed);
    report.absorb(giant_component(&p.giant, derive_seed(seed, 0))?);
    report.absorb(component_subcritical(p, derive_seed(seed, 1))?);
    report.absorb(component_supercritical(p, derive_seed(seed, 2))?);
    Ok(report)
}

// ------------------------------------------------------ correlation decay

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalityParams {
    /// Lattice `[-radius, radius]^2`.
    pub lattice_radius: usize,
    pub model: ModelSpec,
    pub init: InitSpec,
    pub trials: usize,
    pub max_steps: usize,
    pub covariance_steps: usize,
    pub distances: Vec<usize>,
    pub replicas: usize,
}

impl Default for LocalityParams {
    fn default() -> Self {
        let mut params = Params::new();
        params.insert("epsilon".into(), 0.1);
        LocalityParams {
            lattice_radius: 10,
            model: ModelSpec {
                name: "noisy_majority".into(),
                params,
            },
            init: InitSpec::fair_coin(),
            trials: 50,
            max_steps: 4,
            covariance_steps: 2,
            distances: vec![5, 6, 8],
            replicas: 2000,
        }
    }
}

/// Row pairs at horizontal distance `d`, centred on the origin.
fn row_pair(lattice: &LatticeBox, d: usize) -> Result<(usize, usize)> {
    let left = -((d / 2) as i64);
    let right = left + d as i64;
    match (lattice.index(&[left, 0]), lattice.index(&[right, 0])) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::invalid(format!("distance {d} does not fit in the lattice"))),
    }
}

/// Exact locality of discrete dynamics on a square lattice, and vanishing
/// covariance beyond twice the horizon.
pub fn corr_decay_discrete(p: &LocalityParams, seed: Seed) -> Result<Report> {
    let mut report = Report::new("corr-decay", seed);
    let m = p.model.discrete()?;
    let rooted = gen_lattice_box(2, p.lattice_radius)?;
    let lattice = LatticeBox {
        dim: 2,
        radius: p.lattice_radius,
    };
    let g = rooted.graph();
    let n = g.vertex_count();
    let marks = p.init.symbols(g, derive_seed(seed, 0))?;
    let mut rng = seeded_rng(derive_seed(seed, 1));
    let mut identical = 0usize;
    for t in 0..p.trials as u64 {
        let v = rng.gen_range(0..n);
        let k = rng.gen_range(1..=p.max_steps);
        let base = NoisePlan::shared(derive_seed(derive_seed(seed, 2), t)).resolve(n);
        let fresh = NoisePlan::shared(derive_seed(derive_seed(seed, 3), t)).resolve(n);
        let inside = g.bfs_distances(v, k);
        let swapped: Vec<Seed> = (0..n).map(|u| if inside[u].is_some() { base[u] } else { fresh[u] }).collect();
        let a = crate::dynamics::simulate_discrete(g, &marks, &*m, k, &NoisePlan::PerVertex(base))?;
        let b = crate::dynamics::simulate_discrete(g, &marks, &*m, k, &NoisePlan::PerVertex(swapped))?;
        identical += usize::from(a.path(v) == b.path(v));
    }
    report.check(Check::holds(
        "root trajectory unchanged by noise outside B_k(v)",
        identical == p.trials,
    ));
    report.detail("identical_trials", identical);

    let k = p.covariance_steps;
    let mut pairs = Vec::new();
    for &d in &p.distances {
        if d <= 2 * k {
            return Err(Error::invalid(format!("distance {d} is not beyond twice the horizon {k}")));
        }
        let (a, b) = row_pair(&lattice, d)?;
        pairs.push((vec![a], vec![b], d));
    }
    let dy = DiscreteDynamics { model: &*m, steps: k };
    let f = |ts: &TrajectorySet<Symbol>, a: &[usize]| f64::from(ts.final_state(a[0])[0]);
    let profile = covariance_decay_profile(g, &marks, &dy, &pairs, f, p.replicas, derive_seed(seed, 4))?;
    for pt in &profile.points {
        report.check(Check::at_most(
            format!("|cov| at distance {} within CI", pt.distance),
            pt.estimate.abs(),
            pt.ci_half_width,
        ));
    }
    report.curve(
        "covariance",
        profile
            .points
            .iter()
            .map(|pt| (pt.distance as f64, pt.estimate, Some(pt.ci_half_width)))
            .collect(),
    );
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiffusionDecayParams {
    pub path_length: usize,
    pub sigma0: f64,
    pub horizon: f64,
    pub dt: f64,
    pub replicas: usize,
    pub distances: Vec<usize>,
    /// Distances from which the factorial envelope is enforced.
    pub envelope_from: usize,
}

impl Default for DiffusionDecayParams {
    fn default() -> Self {
        DiffusionDecayParams {
            path_length: 40,
            sigma0: 1.0,
            horizon: 1.0,
            dt: 1e-3,
            replicas: 10_000,
            distances: vec![2, 4, 6, 8, 10],
            envelope_from: 6,
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Covariance between two vertices of a consensus diffusion on a path, as
/// a function of their distance.
pub fn corr_decay_diffusion(p: &DiffusionDecayParams, seed: Seed) -> Result<Report> {
    let mut report = Report::new("corr-decay-diffusion", seed);
    let n = p.path_length;
    if n < 2 || p.distances.is_empty() {
        return Err(Error::invalid("need a path of two or more vertices and at least one distance"));
    }
    let g = Graph::from_edges(n, &(1..n).map(|v| (v - 1, v)).collect::<Vec<_>>())?;
    let model = ConsensusSde::<f64>::new(p.sigma0, 1);
    let dy = DiffusionDynamics {
        model: &model,
        horizon: p.horizon,
        dt: p.dt,
    };
    let mut pairs = Vec::new();
    for &d in &p.distances {
        let a = (n / 2).checked_sub(d / 2).filter(|a| a + d < n);
        let a = a.ok_or_else(|| Error::invalid(format!("distance {d} does not fit on the path")))?;
        pairs.push((vec![a], vec![a + d], d));
    }
    let f = |ts: &TrajectorySet<f64>, a: &[usize]| ts.final_state(a[0])[0];
    let marks = vec![0.0; n];
    let profile = covariance_decay_profile(&g, &marks, &dy, &pairs, f, p.replicas, seed)?;
    let pts = &profile.points;
    let monotone = pts
        .windows(2)
        .all(|w| w[1].estimate.abs() - w[1].ci_half_width <= w[0].estimate.abs() + w[0].ci_half_width);
    report.check(Check::holds("|cov| nonincreasing beyond the CI floor", monotone));
    // c^j / j! with j = ceil(d/2), c matched at the first distance
    let j0 = pts[0].distance.div_ceil(2).max(1);
    let c = (pts[0].estimate.abs() * factorial(j0)).powf(1.0 / j0 as f64);
    for pt in pts.iter().filter(|pt| pt.distance >= p.envelope_from) {
        let j = pt.distance.div_ceil(2);
        let envelope = c.powi(j as i32) / factorial(j);
        report.check(Check::at_most(
            format!("|cov| - ci at distance {} under envelope", pt.distance),
            pt.estimate.abs() - pt.ci_half_width,
            envelope,
        ));
    }
    report.detail("fitted_c", c);
    report.curve(
        "covariance",
        pts.iter()
            .map(|pt| (pt.distance as f64, pt.estimate, Some(pt.ci_half_width)))
            .collect(),
    );
    Ok(report)
}

// ------------------------------------------------- regular tree and canopy

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeCounterexampleParams {
    pub degree: usize,
    pub height: usize,
    pub steps: usize,
    pub model: ModelSpec,
    pub init: InitSpec,
    pub canopy_levels: usize,
    pub replicas: usize,
    pub root_law_gap: f64,
    pub canopy_tolerance: f64,
}

impl Default for TreeCounterexampleParams {
    fn default() -> Self {
        TreeCounterexampleParams {
            degree: 3,
            height: 12,
            steps: 3,
            model: ModelSpec::voter(),
            init: InitSpec::fair_coin(),
            canopy_levels: 10,
            replicas: 20_000,
            root_law_gap: 0.1,
            canopy_tolerance: 0.05,
        }
    }
}

/// Empirical measure on a finite regular tree against the regular-tree
/// root law (should differ) and the canopy mixture (should agree).
pub fn tree_counterexample(p: &TreeCounterexampleParams, seed: Seed) -> Result<Report> {
    let mut report = Report::new("tree-counterexample", seed);
    let m = p.model.discrete()?;
    let k = p.steps;
    let dy = DiscreteDynamics { model: &*m, steps: k };
    let init = |t: &RootedGraph, s: Seed| p.init.symbols(t.graph(), s);
    let tree = gen_regular_tree(p.degree, p.height)?;
    let marks = init(&tree, derive_seed(seed, 0))?;
    let ts = dy.simulate(tree.graph(), &marks, &NoisePlan::shared(derive_seed(seed, 1)))?;
    let empirical = PathLaw::from_empirical(&global_empirical(&ts)?);

    let regular_ball = gen_regular_tree(p.degree, k)?;
    let regular = root_law_monte_carlo(|_| Ok(regular_ball.clone()), init, &dy, p.replicas, derive_seed(seed, 2))?;
    let tv_regular = empirical.tv(&PathLaw::from_empirical(&regular));

    let mut parts = Vec::new();
    let ratio = 1.0 / (p.degree - 1) as f64;
    for i in 0..=p.canopy_levels {
        let canopy = gen_canopy_truncation(p.degree, i + k, 1, i)?;
        let local = ball(&canopy.rooted, k);
        let law = root_law_monte_carlo(
            |_| Ok(local.clone()),
            init,
            &dy,
            p.replicas,
            derive_seed(derive_seed(seed, 3), i as u64),
        )?;
        let weight = (1.0 - ratio) * ratio.powi(i as i32);
        parts.push((weight, PathLaw::from_empirical(&law)));
    }
    let tv_canopy = empirical.tv(&PathLaw::mixture(&parts)?);
    report.check(Check::above("TV(empirical, regular-tree root law)", tv_regular, p.root_law_gap));
    report.check(Check::below("TV(empirical, canopy mixture)", tv_canopy, p.canopy_tolerance));
    report.detail("tv_regular", tv_regular);
    report.detail("tv_canopy", tv_canopy);
    report.detail("tree_vertices", tree.vertex_count());
    Ok(report)
}

// ------------------------------------------------------------- lattices

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeParams {
    pub dim: usize,
    /// Box radii `n` of `[-n, n]^dim`.
    pub radii: Vec<usize>,
    pub steps: usize,
    pub model: ModelSpec,
    pub init: InitSpec,
    pub replicas: usize,
    pub tolerance: f64,
}

impl Default for LatticeParams {
    fn default() -> Self {
        LatticeParams {
            dim: 2,
            radii: vec![4, 8, 16, 32, 64],
            steps: 3,
            model: ModelSpec::voter(),
            init: InitSpec::fair_coin(),
            replicas: 100_000,
            tolerance: 0.05,
        }
    }
}

/// Empirical measure on growing lattice boxes against the root law on the
/// full lattice, computed on the ball of radius `steps`.
pub fn lattice_test(p: &LatticeParams, seed: Seed) -> Result<Report> {
    if p.radii.is_empty() {
        return Err(Error::invalid("radii must be nonempty"));
    }
    let mut report = Report::new("lattice-test", seed);
    let m = p.model.discrete()?;
    let dy = DiscreteDynamics {
        model: &*m,
        steps: p.steps,
    };
    let init = |t: &RootedGraph, s: Seed| p.init.symbols(t.graph(), s);
    let local = gen_lattice_box(p.dim, p.steps)?;
    let root = root_law_monte_carlo(|_| Ok(local.clone()), init, &dy, p.replicas, derive_seed(seed, 0))?;
    let mut tvs = Vec::new();
    for (i, &r) in p.radii.iter().enumerate() {
        let s = derive_seed(seed, 1 + i as u64);
        let lattice = gen_lattice_box(p.dim, r)?;
        let marks = init(&lattice, derive_seed(s, 0))?;
        let ts = dy.simulate(lattice.graph(), &marks, &NoisePlan::shared(derive_seed(s, 1)))?;
        tvs.push(tv_discrete(&global_empirical(&ts)?, &root)?);
    }
    report.check(Check::holds("TV strictly decreasing in the box radius", strictly_decreasing(&tvs)));
    report.check(Check::below("TV at largest box", *tvs.last().expect("nonempty"), p.tolerance));
    report.detail("radii", &p.radii);
    report.detail("tv", &tvs);
    report.curve("tv_vs_radius", p.radii.iter().zip(&tvs).map(|(&r, &t)| (r as f64, t, None)).collect());
    Ok(report)
}

/// Local functional read around each shift, with radius `window`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowFunctional {
    /// Product of the final states at `a` and `a + window e_1`.
    PairProduct,
    /// Mean final state over the sup-norm window.
    WindowMean,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErgodicityParams {
    pub functional: WindowFunctional,
    pub dim: usize,
    pub lattice_radius: usize,
    pub steps: usize,
    pub window: usize,
    pub box_sizes: Vec<usize>,
    pub replicas: usize,
    pub model: ModelSpec,
    pub init: InitSpec,
    pub slope_range: (f64, f64),
}

impl Default for ErgodicityParams {
    fn default() -> Self {
        ErgodicityParams {
            functional: WindowFunctional::PairProduct,
            dim: 2,
            lattice_radius: 32,
            steps: 5,
            window: 2,
            box_sizes: vec![4, 8, 16, 32],
            replicas: 50,
            model: ModelSpec::voter(),
            init: InitSpec::fair_coin(),
            slope_range: (-1.3, -0.7),
        }
    }
}

/// Cross-replica variance of shift averages over growing boxes.
pub fn ergodicity(p: &ErgodicityParams, seed: Seed) -> Result<Report> {
    let mut report = Report::new("ergodicity", seed);
    let m = p.model.discrete()?;
    let dy = DiscreteDynamics {
        model: &*m,
        steps: p.steps,
    };
    let rooted = gen_lattice_box(p.dim, p.lattice_radius)?;
    let lattice = LatticeBox {
        dim: p.dim,
        radius: p.lattice_radius,
    };
    let mean = WindowMean {
        radius: p.window,
        step: p.steps,
    };
    let pair = PairProduct {
        offset: p.window,
        step: p.steps,
    };
    let f: &dyn LocalFunctional<Symbol> = match p.functional {
        WindowFunctional::PairProduct => &pair,
        WindowFunctional::WindowMean => &mean,
    };
    let averages = (0..p.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let s = derive_seed(seed, r);
            let marks = p.init.symbols(rooted.graph(), derive_seed(s, 0))?;
            let ts = dy.simulate(rooted.graph(), &marks, &NoisePlan::shared(derive_seed(s, 1)))?;
            shift_average(&ts, &lattice, f, &p.box_sizes)
        })
        .collect::<Result<Vec<_>>>()?;
    let curve = ergodicity_variance_curve(&averages, &p.box_sizes)?;
    let volumes: Vec<f64> = curve.iter().map(|(m, _)| (*m as f64).powi(p.dim as i32)).collect();
    let variances: Vec<f64> = curve.iter().map(|(_, v)| *v).collect();
    let slope = loglog_slope(&volumes, &variances)?;
    let (lo, hi) = p.slope_range;
    report.check(Check::holds(
        format!("log-log slope {slope:.3} in [{lo}, {hi}]"),
        (lo..=hi).contains(&slope),
    ));
    report.detail("slope", slope);
    report.detail("variances", &variances);
    report.curve(
        "variance_vs_volume",
        volumes.iter().zip(&variances).map(|(&x, &v)| (x, v, None)).collect(),
    );
    Ok(report)
}

// ------------------------------------------------------------------ Gibbs

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GibbsCheckParams {
    pub beta: f64,
    pub grid_side: usize,
    pub burn_in: usize,
    pub sweeps: usize,
    pub marginal_tolerance: f64,
    pub small_graphs: usize,
    pub small_vertices: usize,
    pub exact_tolerance: f64,
}

impl Default for GibbsCheckParams {
    fn default() -> Self {
        GibbsCheckParams {
            beta: 0.4,
            grid_side: 3,
            burn_in: 1000,
            sweeps: 200_000,
            marginal_tolerance: 0.01,
            small_graphs: 20,
            small_vertices: 5,
            exact_tolerance: 1e-12,
        }
    }
}

fn grid_graph(side: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            let v = r * side + c;
            if c + 1 < side {
                edges.push((v, v + 1));
            }
            if r + 1 < side {
                edges.push((v, v + side));
            }
        }
    }
    Graph::from_edges(side * side, &edges)
}

/// Random positive symmetric interaction and reference law.
pub fn random_gibbs_spec(q: usize, seed: Seed) -> Result<GibbsSpec<f64>> {
    let mut rng = seeded_rng(seed);
    let mut psi = vec![vec![0.0; q]; q];
    for a in 0..q {
        for b in a..q {
            let w = rng.gen_range(0.2..3.0);
            psi[a][b] = w;
            psi[b][a] = w;
        }
    }
    let raw: Vec<f64> = (0..q).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    GibbsSpec::new(
        (0..q).map(|i| Label::Number(i as f64)).collect(),
        psi,
        raw.iter().map(|x| x / total).collect(),
    )
}

/// Largest deviation of conditional kernels from conditionals of the exact
/// joint law, over all configurations and one random region.
pub fn mrf_deviation(g: &Graph, spec: &GibbsSpec<f64>, region: &[usize]) -> Result<f64> {
    let exact = exact_gibbs(g, spec)?;
    let boundary = outer_boundary(g, region);
    let mut worst = 0.0f64;
    for idx in 0..exact.probs.len() {
        let c = exact.configuration(idx);
        let bmap: BTreeMap<usize, Symbol> = boundary.iter().map(|&v| (v, c[v])).collect();
        let kernel = conditional_kernel(g, spec, region, &bmap)?;
        // conditional of the joint given everything outside the region
        let mut total = 0.0;
        let mut cond = vec![0.0; kernel.probs.len()];
        for (j, slot) in cond.iter_mut().enumerate() {
            let inner = kernel.configuration(j);
            let mut full = c.clone();
            for (i, &v) in region.iter().enumerate() {
                full[v] = inner[i];
            }
            *slot = exact.prob(&full);
            total += *slot;
        }
        for (j, p) in cond.iter().enumerate() {
            worst = worst.max((p / total - kernel.probs[j]).abs());
        }
    }
    Ok(worst)
}

/// Largest violation of `pi(x) P(x, y) = pi(y) P(y, x)` for the random-scan
/// single-site kernel.
pub fn detailed_balance_deviation(g: &Graph, spec: &GibbsSpec<f64>) -> Result<f64> {
    let exact = exact_gibbs(g, spec)?;
    let q = spec.alphabet_size() as Symbol;
    let n = g.vertex_count();
    let mut worst = 0.0f64;
    for idx in 0..exact.probs.len() {
        let x = exact.configuration(idx);
        for v in 0..n {
            let kx = single_site_kernel(g, spec, v, &x);
            for s in 0..q {
                let mut y = x.clone();
                y[v] = s;
                let ky = single_site_kernel(g, spec, v, &y);
                let forward = exact.prob(&x) * kx[s as usize] / n as f64;
                let backward = exact.prob(&y) * ky[x[v] as usize] / n as f64;
                worst = worst.max((forward - backward).abs());
            }
        }
    }
    Ok(worst)
}

/// Glauber marginals on a small grid against exact enumeration, plus the
/// Markov field property and detailed balance on small random graphs.
pub fn gibbs_check(p: &GibbsCheckParams, seed: Seed) -> Result<Report> {
    let mut report = Report::new("gibbs", seed);
    let g = grid_graph(p.grid_side)?;
    let spec = GibbsSpec::<f64>::ising(p.beta)?;
    let exact = exact_gibbs(&g, &spec)?;
    let mut chain = GlauberChain::new(&g, &spec, derive_seed(seed, 0))?;
    for _ in 0..p.burn_in {
        chain.sweep();
    }
    let n = g.vertex_count();
    let mut plus = vec![0u64; n];
    let mut plus_pairs = 0u64;
    for _ in 0..p.sweeps {
        chain.sweep();
        for (v, &s) in chain.state().iter().enumerate() {
            plus[v] += u64::from(s);
        }
        plus_pairs += u64::from(chain.state()[0] == chain.state()[1]);
    }
    let marginal_gap = (0..n)
        .map(|v| (plus[v] as f64 / p.sweeps as f64 - exact.marginal(v)[1]).abs())
        .fold(0.0, f64::max);
    report.check(Check::below("max |Glauber - exact| marginal", marginal_gap, p.marginal_tolerance));
    let exact_agree: f64 = (0..exact.probs.len())
        .map(|i| {
            let c = exact.configuration(i);
            if c[0] == c[1] {
                exact.probs[i]
            } else {
                0.0
            }
        })
        .sum();
    let pair_gap = (plus_pairs as f64 / p.sweeps as f64 - exact_agree).abs();
    report.check(Check::below("|Glauber - exact| P(x_0 = x_1)", pair_gap, p.marginal_tolerance));

    let mut mrf = 0.0f64;
    let mut balance = 0.0f64;
    let mut full = 0.0f64;
    for j in 0..p.small_graphs as u64 {
        let s = derive_seed(derive_seed(seed, 1), j);
        let small = gen_erdos_renyi(p.small_vertices, 0.5, derive_seed(s, 0))?;
        let q = 2 + (j % 2) as usize;
        let spec = random_gibbs_spec(q, derive_seed(s, 1))?;
        let mut rng = seeded_rng(derive_seed(s, 2));
        let mut region: Vec<usize> = (0..p.small_vertices).filter(|_| rng.gen_bool(0.5)).collect();
        if region.is_empty() {
            region.push(0);
        }
        mrf = mrf.max(mrf_deviation(&small, &spec, &region)?);
        balance = balance.max(detailed_balance_deviation(&small, &spec)?);
        let all: Vec<usize> = (0..p.small_vertices).collect();
        let kernel = conditional_kernel(&small, &spec, &all, &BTreeMap::new())?;
        let exact = exact_gibbs(&small, &spec)?;
        full = full.max(
            kernel
                .probs
                .iter()
                .zip(&exact.probs)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
    }
    report.check(Check::below("Markov field property", mrf, p.exact_tolerance));
    report.check(Check::below("detailed balance", balance, p.exact_tolerance));
    report.check(Check::below("kernel on the whole graph equals the joint", full, p.exact_tolerance));
    report.detail("marginal_gap", marginal_gap);
    Ok(report)
}

// ------------------------------------------------------------- integrator

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorParams {
    pub dts: Vec<f64>,
    pub horizon: f64,
    /// Maximum error allowed as a multiple of `dt`.
    pub error_factor: f64,
}

impl Default for IntegratorParams {
    fn default() -> Self {
        IntegratorParams {
            dts: vec![1e-2, 5e-3, 2.5e-3],
            horizon: 1.0,
            error_factor: 5.0,
        }
    }
}

/// Noise-free consensus on one edge against `x - y = 2 e^{-2t}`.
pub fn integrator_check(p: &IntegratorParams, seed: Seed) -> Result<Report> {
    let mut report = Report::new("integrator", seed);
    let g = Graph::from_edges(2, &[(0, 1)])?;
    let model = ConsensusSde::<f64>::new(0.0, 1);
    let mut errors = Vec::new();
    for &dt in &p.dts {
        let ts = simulate_diffusion(&g, &[1.0, -1.0], &model, p.horizon, dt, &NoisePlan::shared(seed))?;
        let err = (0..ts.grid().len())
            .map(|i| {
                let exact = 2.0 * (-2.0 * ts.grid().time(i)).exp();
                (ts.state(0, i)[0] - ts.state(1, i)[0] - exact).abs()
            })
            .fold(0.0, f64::max);
        report.check(Check::at_most(format!("max error at dt {dt}"), err, p.error_factor * dt));
        errors.push(err);
    }
    report.check(Check::holds("error decreasing with dt", strictly_decreasing(&errors)));
    report.curve("error_vs_dt", p.dts.iter().zip(&errors).map(|(&d, &e)| (d, e, None)).collect());
    Ok(report)
}
