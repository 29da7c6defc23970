//! Built-in benchmark problems: the classical 23-member suite, generalized
//! Rosenbrock, the quadratic demo and the steady 2D Brusselator.

mod brusselator;
mod rosenbrock;
pub mod test23;

use std::fmt;

pub use brusselator::Brusselator2d;
pub use rosenbrock::{GeneralizedRosenbrock, Quadratic};

use crate::sparsity::SparsityPattern;
use crate::{Error, Problem, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Small,
    Sparse,
    IllConditioned,
}

#[derive(Clone)]
pub struct ProblemDescriptor {
    pub id: String,
    pub name: String,
    pub n: usize,
    pub problem: Problem,
    pub reference_solution: Option<Vec<f64>>,
    pub tags: Vec<Tag>,
}

impl ProblemDescriptor {
    fn new(id: impl Into<String>, name: impl Into<String>, problem: Problem) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            n: problem.dim(),
            problem,
            reference_solution: None,
            tags: Vec::new(),
        }
    }

    fn reference(mut self, r: Vec<f64>) -> Self {
        self.reference_solution = Some(r);
        self
    }

    fn tagged(mut self, tags: &[Tag]) -> Self {
        self.tags = tags.to_vec();
        self
    }

    pub fn has_tag(&self, tag: Tag) -> bool {
        self.tags.contains(&tag)
    }
}

impl fmt::Debug for ProblemDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemDescriptor")
            .field("id", &self.id)
            .field("n", &self.n)
            .field("tags", &self.tags)
            .finish()
    }
}

/// Short names of the suite, in suite order.
pub const TEST23_NAMES: [&str; 23] = [
    "rosenbrock",
    "powell_singular",
    "powell_badly_scaled",
    "wood",
    "helical_valley",
    "watson",
    "chebyquad",
    "brown_almost_linear",
    "discrete_boundary_value",
    "discrete_integral",
    "trigonometric",
    "variably_dimensioned",
    "broyden_tridiagonal",
    "broyden_banded",
    "hammarling_2x2",
    "hammarling_3x3",
    "dennis_schnabel",
    "sample_18",
    "sample_19",
    "scalar_cubic",
    "freudenstein_roth",
    "boggs",
    "chandrasekhar",
];

pub const WATSON_DIM: usize = 6;
pub const CHEBYQUAD_DIM: usize = 5;
const SUITE_DIM: usize = 10;

/// Suite member by 1-based index.
pub fn test23(index: usize) -> Result<ProblemDescriptor> {
    use test23::*;
    use Tag::*;

    if !(1..=23).contains(&index) {
        return Err(Error::InvalidArgument(format!(
            "suite index {index} outside 1..=23"
        )));
    }
    let n = SUITE_DIM;
    let ts = |n: usize| -> Vec<f64> {
        (1..=n)
            .map(|j| {
                let t = j as f64 / (n + 1) as f64;
                t * (t - 1.0)
            })
            .collect()
    };
    let d = match index {
        1 => (
            Problem::new(Rosenbrock, vec![-1.2, 1.0], vec![]),
            Some(vec![1.0, 1.0]),
        ),
        2 => (
            Problem::new(PowellSingular, vec![3.0, -1.0, 0.0, 1.0], vec![]),
            Some(vec![0.0; 4]),
        ),
        3 => (
            Problem::new(PowellBadlyScaled, vec![0.0, 1.0], vec![]),
            None,
        ),
        4 => (
            Problem::new(Wood, vec![-3.0, -1.0, -3.0, -1.0], vec![]),
            Some(vec![1.0; 4]),
        ),
        5 => (
            Problem::new(HelicalValley, vec![-1.0, 0.0, 0.0], vec![]),
            Some(vec![1.0, 0.0, 0.0]),
        ),
        6 => (Problem::new(Watson, vec![0.0; WATSON_DIM], vec![]), None),
        7 => {
            let m = CHEBYQUAD_DIM;
            let u0 = (1..=m).map(|j| j as f64 / (m + 1) as f64).collect();
            (Problem::new(Chebyquad, u0, vec![]), None)
        }
        8 => (
            Problem::new(BrownAlmostLinear, vec![0.5; n], vec![]),
            Some(vec![1.0; n]),
        ),
        9 => (Problem::new(DiscreteBoundaryValue, ts(n), vec![]), None),
        10 => (Problem::new(DiscreteIntegral, ts(n), vec![]), None),
        11 => (
            Problem::new(Trigonometric, vec![1.0 / n as f64; n], vec![]),
            Some(vec![0.0; n]),
        ),
        12 => {
            let u0 = (1..=n).map(|j| 1.0 - j as f64 / n as f64).collect();
            (
                Problem::new(VariablyDimensioned, u0, vec![]),
                Some(vec![1.0; n]),
            )
        }
        13 => (
            Problem::new(BroydenTridiagonal, vec![-1.0; n], vec![]),
            None,
        ),
        14 => (Problem::new(BroydenBanded, vec![-1.0; n], vec![]), None),
        15 => (
            Problem::new(
                MatrixSquareRoot { dim: 2 },
                vec![1.0, 0.0, 0.0, 1.0],
                vec![1e-4, 1.0, 0.0, 1e-4],
            ),
            Some(vec![0.01, 50.0, 0.0, 0.01]),
        ),
        16 => {
            let (a, b, c) = (0.01, 50.0, -125000.0);
            let mut eye = vec![0.0; 9];
            eye[0] = 1.0;
            eye[4] = 1.0;
            eye[8] = 1.0;
            (
                Problem::new(
                    MatrixSquareRoot { dim: 3 },
                    eye,
                    vec![1e-4, 1.0, 0.0, 0.0, 1e-4, 1.0, 0.0, 0.0, 1e-4],
                ),
                Some(vec![a, b, c, 0.0, a, b, 0.0, 0.0, a]),
            )
        }
        17 => (
            Problem::new(DennisSchnabel, vec![1.0, 5.0], vec![]),
            Some(vec![0.0, 3.0]),
        ),
        18 => (
            Problem::new(Sample18, vec![2.0, 2.0], vec![]),
            Some(vec![0.0, 0.0]),
        ),
        19 => (
            Problem::new(Sample19, vec![3.0, 3.0], vec![]),
            Some(vec![0.0, 0.0]),
        ),
        20 => (
            Problem::new(ScalarCubic, vec![1.0], vec![]),
            Some(vec![0.0]),
        ),
        21 => (
            Problem::new(FreudensteinRoth, vec![0.5, -2.0], vec![]),
            Some(vec![5.0, 4.0]),
        ),
        22 => (
            Problem::new(Boggs, vec![1.0, 0.0], vec![]),
            Some(vec![0.0, 1.0]),
        ),
        23 => (
            Problem::new(Chandrasekhar { c: 0.9 }, vec![1.0; n], vec![]),
            None,
        ),
        _ => unreachable!(),
    };
    let name = TEST23_NAMES[index - 1];
    let mut desc = ProblemDescriptor::new(format!("test23/{name}"), name, d.0);
    desc.reference_solution = d.1.or_else(|| frozen_reference(index));
    let tags: &[Tag] = match index {
        2 | 3 | 6 | 7 | 15 | 16 | 18 | 19 | 20 => &[Small, IllConditioned],
        _ => &[Small],
    };
    Ok(desc.tagged(tags))
}

/// Roots without a closed form, computed once at tight tolerance.
fn frozen_reference(index: usize) -> Option<Vec<f64>> {
    let r: &[f64] = match index {
        3 => &[1.098159329699915e-5, 9.106146739865716],
        6 => &[
            -0.01572508640145854,
            1.0124348693691099,
            -0.2329916259567394,
            1.2604300877996155,
            -1.5137289227222899,
            0.992996432431139,
        ],
        7 => &[
            0.08375125649950906,
            0.3127292952232094,
            0.5,
            0.6872707047767905,
            0.9162487435004909,
        ],
        9 => &[
            -0.04316498251876435,
            -0.08157715653538584,
            -0.11448571438052778,
            -0.1409735768625948,
            -0.159908696181981,
            -0.1698772023127728,
            -0.16908998378120646,
            -0.1552495352218303,
            -0.12535589167893396,
            -0.07541653368589157,
        ],
        10 => &[
            -0.04316498251876432,
            -0.08157715653538579,
            -0.11448571438052771,
            -0.14097357686259473,
            -0.15990869618198097,
            -0.16987720231277276,
            -0.1690899837812064,
            -0.15524953522183027,
            -0.1253558916789339,
            -0.0754165336858915,
        ],
        13 => &[
            -0.5707221320112248,
            -0.6818069499842752,
            -0.7022100760176601,
            -0.7055106298950804,
            -0.7049061557287437,
            -0.7014966070298512,
            -0.6918893223547983,
            -0.6657965144058536,
            -0.5960351090263657,
            -0.4164122575286934,
        ],
        14 => &[
            -0.4283028635872503,
            -0.47659642435629024,
            -0.5196524636468617,
            -0.5580993248321808,
            -0.5925061568294573,
            -0.624503682199468,
            -0.6232394714405911,
            -0.6213938417965734,
            -0.6204535966590874,
            -0.5864692707204351,
        ],
        23 => &[
            1.0967358168344776,
            1.2334840217223595,
            1.3423629130310344,
            1.4356463490493694,
            1.517868486486611,
            1.59149208688211,
            1.658105751392686,
            1.7188372512295915,
            1.7745363737392696,
            1.8258694825916455,
        ],
        _ => return None,
    };
    Some(r.to_vec())
}

pub fn generalized_rosenbrock(n: usize) -> Result<ProblemDescriptor> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "generalized Rosenbrock needs N >= 2".into(),
        ));
    }
    let mut u0 = vec![1.0; n];
    u0[0] = -1.2;
    let pattern = SparsityPattern::new(
        n,
        n,
        (0..n).flat_map(|i| std::iter::once((i, i)).chain((i > 0).then(|| (i, i - 1)))),
    )?;
    let problem = Problem::new(GeneralizedRosenbrock, u0, vec![]).with_pattern(pattern);
    Ok(ProblemDescriptor::new(
        format!("generalized_rosenbrock?N={n}"),
        "generalized_rosenbrock",
        problem,
    )
    .reference(vec![1.0; n])
    .tagged(&[Tag::Small, Tag::Sparse]))
}

/// `u² − p` from all-ones.
pub fn quadratic(p: &[f64]) -> Result<ProblemDescriptor> {
    if p.is_empty() || p.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument("quadratic needs p > 0".into()));
    }
    let problem = Problem::new(Quadratic, vec![1.0; p.len()], p.to_vec());
    Ok(ProblemDescriptor::new("quadratic", "quadratic", problem)
        .reference(p.iter().map(|v| v.sqrt()).collect())
        .tagged(&[Tag::Small]))
}

pub const BRUSSELATOR_FORCING: f64 = 5.0;

pub fn brusselator_2d(n: usize) -> Result<ProblemDescriptor> {
    if n < 3 {
        return Err(Error::InvalidArgument("Brusselator needs N >= 3".into()));
    }
    let b = Brusselator2d::new(n);
    let u0 = b.initial_state();
    let pattern = b.pattern();
    let problem = Problem::new(b, u0, vec![BRUSSELATOR_FORCING]).with_pattern(pattern);
    Ok(
        ProblemDescriptor::new(format!("brusselator2d?N={n}"), "brusselator_2d", problem)
            .tagged(&[Tag::Sparse]),
    )
}

/// Every built-in problem at its default size, in a stable order.
pub fn list_problems() -> Vec<ProblemDescriptor> {
    let mut out: Vec<_> = (1..=23)
        .map(|i| test23(i).expect("index in range"))
        .collect();
    out.push(quadratic(&[2.0, 5.0]).expect("positive p"));
    out.push(generalized_rosenbrock(10).expect("N >= 2"));
    out.push(brusselator_2d(16).expect("N >= 3"));
    out
}

/// Resolves a CLI-facing id such as `test23/wood` or `brusselator2d?N=32`.
pub fn lookup(id: &str) -> Result<ProblemDescriptor> {
    let (base, size) = match id.split_once('?') {
        Some((b, q)) => {
            let v = q
                .strip_prefix("N=")
                .ok_or_else(|| Error::InvalidArgument(format!("bad query in '{id}'")))?;
            let n = v
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad size in '{id}'")))?;
            (b, Some(n))
        }
        None => (id, None),
    };
    if let Some(name) = base.strip_prefix("test23/") {
        if size.is_some() {
            return Err(Error::InvalidArgument(format!(
                "suite members have fixed size: '{id}'"
            )));
        }
        let idx = TEST23_NAMES
            .iter()
            .position(|&s| s == name)
            .ok_or_else(|| Error::UnknownProblem(id.to_string()))?;
        return test23(idx + 1);
    }
    match base {
        "quadratic" => match size {
            None => quadratic(&[2.0, 5.0]),
            Some(n) => quadratic(&vec![2.0; n]),
        },
        "generalized_rosenbrock" => generalized_rosenbrock(size.unwrap_or(10)),
        "brusselator2d" | "brusselator_2d" => brusselator_2d(size.unwrap_or(16)),
        _ => Err(Error::UnknownProblem(id.to_string())),
    }
}
