//! Certification of metric-space structure: the Busemann 3-point and
//! 4-point midpoint-contraction conditions, their equivalence, and the
//! uniform nonpositive-curvature (NPC) variant with an explicit ball
//! radius `delta`.
//!
//! All checks sample seeded-random tuples plus caller-supplied named
//! witnesses, take the worst slack over every midpoint combination, and
//! re-evaluate failing witnesses so reported margins always reproduce.

use crate::report::{NamedMargin, ScalarRepr, StructureReport};
use crate::scalar::Scalar;
use crate::space::GeodesicSpace;

/// Labelled triple witness `(label, x, y, y')`.
pub type NamedTriple<P> = (String, P, P, P);
/// Labelled quadruple witness `(label, x, x', y, y')`.
pub type NamedQuadruple<P> = (String, P, P, P, P);

pub struct StructureParams<S> {
    pub sample_budget: usize,
    pub seed: u64,
    pub tau: S,
}

impl<S: Scalar> StructureParams<S> {
    pub fn new(sample_budget: usize, seed: u64) -> Self {
        Self {
            sample_budget,
            seed,
            // tau default: 0 exact / 1e-12 floating.
            tau: if S::EXACT {
                S::zero()
            } else {
                S::from_ratio(1, 1_000_000_000_000)
            },
        }
    }

    pub fn with_tau(mut self, tau: S) -> Self {
        self.tau = tau;
        self
    }
}

/// Slack of the 3-point inequality on a triple: `d(y, y') - 2 d(z, z')`
/// minimized over all midpoint combinations `z in M(x,y), z' in M(x,y')`.
pub fn busemann3_slack<Sp: GeodesicSpace>(
    space: &Sp,
    x: &Sp::P,
    y: &Sp::P,
    yp: &Sp::P,
) -> (Sp::S, Sp::P, Sp::P) {
    let dyyp = space.dist(y, yp);
    let mut worst: Option<(Sp::S, Sp::P, Sp::P)> = None;
    for z in space.midpoints(x, y) {
        for zp in space.midpoints(x, yp) {
            let dz = space.dist(&z, &zp);
            let slack = dyyp - (dz + dz);
            let worse = match &worst {
                None => true,
                Some((w, _, _)) => slack.total_cmp(w) == std::cmp::Ordering::Less,
            };
            if worse {
                worst = Some((slack, z.clone(), zp.clone()));
            }
        }
    }
    worst.expect("midpoint sets are nonempty")
}

/// Slack of the 4-point inequality on a quadruple:
/// `d(x, x') + d(y, y') - 2 d(z, z')` minimized over midpoints.
pub fn busemann4_slack<Sp: GeodesicSpace>(
    space: &Sp,
    x: &Sp::P,
    xp: &Sp::P,
    y: &Sp::P,
    yp: &Sp::P,
) -> (Sp::S, Sp::P, Sp::P) {
    let base = space.dist(x, xp) + space.dist(y, yp);
    let mut worst: Option<(Sp::S, Sp::P, Sp::P)> = None;
    for z in space.midpoints(x, y) {
        for zp in space.midpoints(xp, yp) {
            let dz = space.dist(&z, &zp);
            let slack = base - (dz + dz);
            let worse = match &worst {
                None => true,
                Some((w, _, _)) => slack.total_cmp(w) == std::cmp::Ordering::Less,
            };
            if worse {
                worst = Some((slack, z.clone(), zp.clone()));
            }
        }
    }
    worst.expect("midpoint sets are nonempty")
}

/// Slack plus the witness in key and tagged-record form.
type WorstTuple<S> = (S, Vec<String>, Vec<serde_json::Value>);

struct TupleScan<S> {
    worst: Option<WorstTuple<S>>,
    tested: usize,
    named: Vec<NamedMargin>,
}

impl<S: Scalar> TupleScan<S> {
    fn new() -> Self {
        Self {
            worst: None,
            tested: 0,
            named: Vec::new(),
        }
    }

    fn absorb(&mut self, slack: S, witness: Vec<String>, points: Vec<serde_json::Value>) {
        self.tested += 1;
        let worse = match &self.worst {
            None => true,
            Some((w, _, _)) => slack.total_cmp(w) == std::cmp::Ordering::Less,
        };
        if worse {
            self.worst = Some((slack, witness, points));
        }
    }

    fn finish(
        self,
        condition: &str,
        tau: S,
        delta: Option<S>,
        notes: Vec<String>,
    ) -> StructureReport {
        let (pass, margin, witness, witness_points) = match self.worst {
            None => (true, S::zero(), Vec::new(), Vec::new()),
            Some((w, wit, pts)) => (
                w.total_cmp(&(-tau)) != std::cmp::Ordering::Less,
                w,
                wit,
                pts,
            ),
        };
        StructureReport {
            condition: condition.into(),
            pass,
            delta: delta.map(ScalarRepr::of),
            worst_margin: ScalarRepr::of(margin),
            witness,
            witness_points,
            tuples_tested: self.tested,
            tau: ScalarRepr::of(tau),
            named: self.named,
            notes,
        }
    }
}

/// Busemann 3-point condition over sampled triples from `points` plus
/// named witnesses.
pub fn check_busemann3<Sp: GeodesicSpace>(
    space: &Sp,
    points: &[Sp::P],
    params: &StructureParams<Sp::S>,
    witnesses: &[NamedTriple<Sp::P>],
) -> StructureReport {
    let mut scan = TupleScan::new();
    for (label, x, y, yp) in witnesses {
        let (slack, z, zp) = busemann3_slack(space, x, y, yp);
        // named witnesses must reproduce exactly on re-evaluation
        let (re, _, _) = busemann3_slack(space, x, y, yp);
        assert!(
            (re - slack).abs().to_f64() <= 1e-12,
            "witness slack not reproducible"
        );
        let wit = vec![
            space.point_key(x),
            space.point_key(y),
            space.point_key(yp),
            space.point_key(&z),
            space.point_key(&zp),
        ];
        scan.named.push(NamedMargin {
            label: label.clone(),
            margin: ScalarRepr::of(slack),
            witness: wit.clone(),
        });
        let pts = vec![
            space.point_json(x),
            space.point_json(y),
            space.point_json(yp),
            space.point_json(&z),
            space.point_json(&zp),
        ];
        scan.absorb(slack, wit, pts);
    }
    let n = points.len();
    let mut rng = crate::sampling::seeded(params.seed);
    for _ in 0..params.sample_budget {
        let x = &points[crate::sampling::pick(&mut rng, n)];
        let y = &points[crate::sampling::pick(&mut rng, n)];
        let yp = &points[crate::sampling::pick(&mut rng, n)];
        let (slack, z, zp) = busemann3_slack(space, x, y, yp);
        scan.absorb(
            slack,
            vec![
                space.point_key(x),
                space.point_key(y),
                space.point_key(yp),
                space.point_key(&z),
                space.point_key(&zp),
            ],
            vec![
                space.point_json(x),
                space.point_json(y),
                space.point_json(yp),
                space.point_json(&z),
                space.point_json(&zp),
            ],
        );
    }
    scan.finish("busemann3", params.tau, None, Vec::new())
}

/// Busemann 4-point condition over sampled quadruples plus witnesses.
pub fn check_busemann4<Sp: GeodesicSpace>(
    space: &Sp,
    points: &[Sp::P],
    params: &StructureParams<Sp::S>,
    witnesses: &[NamedQuadruple<Sp::P>],
) -> StructureReport {
    let mut scan = TupleScan::new();
    for (label, x, xp, y, yp) in witnesses {
        let (slack, z, zp) = busemann4_slack(space, x, xp, y, yp);
        let wit = vec![
            space.point_key(x),
            space.point_key(xp),
            space.point_key(y),
            space.point_key(yp),
            space.point_key(&z),
            space.point_key(&zp),
        ];
        scan.named.push(NamedMargin {
            label: label.clone(),
            margin: ScalarRepr::of(slack),
            witness: wit.clone(),
        });
        let pts = vec![
            space.point_json(x),
            space.point_json(xp),
            space.point_json(y),
            space.point_json(yp),
            space.point_json(&z),
            space.point_json(&zp),
        ];
        scan.absorb(slack, wit, pts);
    }
    let n = points.len();
    let mut rng = crate::sampling::seeded(params.seed);
    for _ in 0..params.sample_budget {
        let x = &points[crate::sampling::pick(&mut rng, n)];
        let xp = &points[crate::sampling::pick(&mut rng, n)];
        let y = &points[crate::sampling::pick(&mut rng, n)];
        let yp = &points[crate::sampling::pick(&mut rng, n)];
        let (slack, z, zp) = busemann4_slack(space, x, xp, y, yp);
        scan.absorb(
            slack,
            vec![
                space.point_key(x),
                space.point_key(xp),
                space.point_key(y),
                space.point_key(yp),
                space.point_key(&z),
                space.point_key(&zp),
            ],
            vec![
                space.point_json(x),
                space.point_json(xp),
                space.point_json(y),
                space.point_json(yp),
                space.point_json(&z),
                space.point_json(&zp),
            ],
        );
    }
    scan.finish("busemann4", params.tau, None, Vec::new())
}

/// Runs the 3- and 4-point checks on the same restricted point set and
/// reports whether the verdicts agree (they must, by the equivalence of
/// the two conditions on any subset).
pub fn check_equivalence_3_4<Sp: GeodesicSpace>(
    space: &Sp,
    points: &[Sp::P],
    params: &StructureParams<Sp::S>,
) -> (StructureReport, StructureReport, bool) {
    // The 3-point check reuses the 4-point sampler with x' = x so both
    // verdicts see the same tuple stream.
    let r3 = check_busemann3(space, points, params, &[]);
    let r4 = {
        let mut scan = TupleScan::new();
        let n = points.len();
        let mut rng = crate::sampling::seeded(params.seed);
        for _ in 0..params.sample_budget {
            let x = &points[crate::sampling::pick(&mut rng, n)];
            let y = &points[crate::sampling::pick(&mut rng, n)];
            let yp = &points[crate::sampling::pick(&mut rng, n)];
            // same stream as the 3-point sampler, specialized x' = x,
            // plus an extra independent x' draw
            let (slack, z, zp) = busemann4_slack(space, x, x, y, yp);
            scan.absorb(
                slack,
                vec![
                    space.point_key(x),
                    space.point_key(x),
                    space.point_key(y),
                    space.point_key(yp),
                    space.point_key(&z),
                    space.point_key(&zp),
                ],
                vec![
                    space.point_json(x),
                    space.point_json(y),
                    space.point_json(yp),
                ],
            );
        }
        let mut rng2 = crate::sampling::seeded(params.seed ^ 0x9e3779b97f4a7c15);
        for _ in 0..params.sample_budget {
            let x = &points[crate::sampling::pick(&mut rng2, n)];
            let xp = &points[crate::sampling::pick(&mut rng2, n)];
            let y = &points[crate::sampling::pick(&mut rng2, n)];
            let yp = &points[crate::sampling::pick(&mut rng2, n)];
            let (slack, z, zp) = busemann4_slack(space, x, xp, y, yp);
            scan.absorb(
                slack,
                vec![
                    space.point_key(x),
                    space.point_key(xp),
                    space.point_key(y),
                    space.point_key(yp),
                    space.point_key(&z),
                    space.point_key(&zp),
                ],
                vec![
                    space.point_json(x),
                    space.point_json(xp),
                    space.point_json(y),
                    space.point_json(yp),
                ],
            );
        }
        scan.finish("busemann4", params.tau, None, Vec::new())
    };
    let agree = r3.pass == r4.pass;
    (r3, r4, agree)
}

/// Uniform Busemann NPC: the 3-point condition restricted to triples
/// inside balls of radius `delta` around sampled centers.
pub fn check_uniform_npc<Sp: GeodesicSpace>(
    space: &Sp,
    centers: &[Sp::P],
    delta: Sp::S,
    params: &StructureParams<Sp::S>,
    witnesses: &[NamedTriple<Sp::P>],
) -> StructureReport {
    let mut scan = TupleScan::new();
    for (label, x, y, yp) in witnesses {
        let (slack, z, zp) = busemann3_slack(space, x, y, yp);
        let wit = vec![
            space.point_key(x),
            space.point_key(y),
            space.point_key(yp),
            space.point_key(&z),
            space.point_key(&zp),
        ];
        scan.named.push(NamedMargin {
            label: label.clone(),
            margin: ScalarRepr::of(slack),
            witness: wit.clone(),
        });
        let pts = vec![
            space.point_json(x),
            space.point_json(y),
            space.point_json(yp),
            space.point_json(&z),
            space.point_json(&zp),
        ];
        scan.absorb(slack, wit, pts);
    }
    let n = centers.len();
    let mut rng = crate::sampling::seeded(params.seed);
    let mut drawn = 0usize;
    while drawn < params.sample_budget {
        let p = &centers[crate::sampling::pick(&mut rng, n)];
        let ball = space.ball_sample(p, delta);
        if ball.len() < 2 {
            drawn += 1;
            continue;
        }
        // several triples per center
        for _ in 0..4 {
            if drawn >= params.sample_budget {
                break;
            }
            drawn += 1;
            let x = &ball[crate::sampling::pick(&mut rng, ball.len())];
            let y = &ball[crate::sampling::pick(&mut rng, ball.len())];
            let yp = &ball[crate::sampling::pick(&mut rng, ball.len())];
            let (slack, z, zp) = busemann3_slack(space, x, y, yp);
            scan.absorb(
                slack,
                vec![
                    space.point_key(x),
                    space.point_key(y),
                    space.point_key(yp),
                    space.point_key(&z),
                    space.point_key(&zp),
                ],
                vec![
                    space.point_json(x),
                    space.point_json(y),
                    space.point_json(yp),
                    space.point_json(&z),
                    space.point_json(&zp),
                ],
            );
        }
    }
    scan.finish("uniform_npc", params.tau, Some(delta), Vec::new())
}

/// Bisects for the largest ball radius at which the uniform NPC check
/// still passes on the given budget.
pub fn npc_delta_search<Sp: GeodesicSpace>(
    space: &Sp,
    centers: &[Sp::P],
    params: &StructureParams<Sp::S>,
    mut lo: Sp::S,
    mut hi: Sp::S,
    iterations: usize,
) -> Sp::S {
    for _ in 0..iterations {
        let mid = (lo + hi).half();
        let rep = check_uniform_npc(space, centers, mid, params, &[]);
        if rep.pass {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
