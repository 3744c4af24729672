use std::f64::consts::PI;

use cmalab_core::constructors::{build_flat, build_nowhere_flat, system_residual, HoloSeed, SystemVariant};
use cmalab_core::curvature::{curvature_components, geodesic_length, obstruction_check, obstruction_values};
use cmalab_core::elliptic::{
    appendix_residuals, distributional_pairing, donaldson_build, donaldson_residual, picard, picard_ma1, Bump,
    ComplexGrid, GridSpec, HarmonicSeed, PairingField, PicardBoundary, PicardOptions, ScalarGrid,
};
use cmalab_core::potential::{det_residual, psh_check, PhiMode};
use cmalab_core::radial::{
    catalog_entry, first_integral_defect, mae_residual, radial_u, tb_defect, valid_points, valid_samples,
    SAMPLE_WINDOW,
};
use cmalab_core::{BiSeries, SolutionCoeffs};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::export::CsvField;
use crate::report::{Record, Report};

const FLAT: &str = "entire flat family";
const CYLINDER: &str = "nowhere-flat disc example";
const OBSTRUCTION: &str = "curvature obstruction identity";
const GEODESIC: &str = "geodesic length on the disc example";
const REDUCTION: &str = "t-quadratic reduction";
const PICARD: &str = "Picard iteration";
const PICARD_MA4: &str = "square-root branch system";
const APPENDIX: &str = "explicit radial solutions";

/// Executes the selected pipeline(s). Only configuration problems are errors;
/// failures inside a pipeline become failing records.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    run_with_fields(config).map(|(report, _)| report)
}

/// As [`run`], also returning the sampled fields for CSV export.
pub fn run_with_fields(config: &RunConfig) -> Result<(Report, Vec<CsvField>), CliError> {
    config.validate()?;
    let commands: Vec<Command> = match config.command {
        Command::All => Command::PIPELINES.to_vec(),
        c => vec![c],
    };
    let mut ctx = Ctx {
        cfg: config,
        records: Vec::new(),
        fields: Vec::new(),
    };
    for c in commands {
        match c {
            Command::VerifyFlat => ctx.verify_flat(),
            Command::VerifyCylinder => ctx.verify_cylinder(),
            Command::Curvature => ctx.curvature(),
            Command::Radial => ctx.radial(),
            Command::Donaldson => ctx.donaldson(),
            Command::Picard => ctx.picard(),
            Command::Appendix => ctx.appendix(),
            Command::All => unreachable!("expanded above"),
        }
    }
    Ok((Report::new(ctx.records, config.clone()), ctx.fields))
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_disc(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI))
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    records: Vec<Record>,
    fields: Vec<CsvField>,
}

impl Ctx<'_> {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.numeric.sample_seed);
        rng.set_stream(stream);
        rng
    }

    fn points(&self, stream: u64, z_radius: f64, w_radius: f64) -> Vec<(Complex64, Complex64)> {
        let mut rng = self.rng(stream);
        (0..self.cfg.numeric.samples)
            .map(|_| (random_disc(&mut rng, z_radius), random_disc(&mut rng, w_radius)))
            .collect()
    }

    fn corrupt(&self, s: SolutionCoeffs) -> SolutionCoeffs {
        match self.cfg.seeds.fault {
            Some(f) => f.apply(&s),
            None => s,
        }
    }

    fn flat_solution(&self) -> Result<SolutionCoeffs, String> {
        let n = self.cfg.numeric.order;
        let seeds = &self.cfg.seeds.flat;
        let h = seeds.h.build("h", n).map_err(|e| e.to_string())?;
        let f = seeds.f.build("f", n).map_err(|e| e.to_string())?;
        let b = seeds.b.build("b", n).map_err(|e| e.to_string())?;
        build_flat(&h, &f, &b, n).map(|s| self.corrupt(s)).map_err(|e| e.to_string())
    }

    fn disc_example(&self, order: usize) -> Result<SolutionCoeffs, String> {
        let r = self.cfg.seeds.cylinder_radius;
        build_nowhere_flat(&HoloSeed::disc_coordinate(r, order + 1), &HoloSeed::zero(order), order)
            .map(|s| self.corrupt(s))
            .map_err(|e| e.to_string())
    }

    fn verify_flat(&mut self) {
        let tol = &self.cfg.tolerances;
        let s = match self.flat_solution() {
            Ok(s) => s,
            Err(e) => {
                self.records.push(Record::failed("flat: det residual", FLAT, tol.det, &e));
                self.records.push(Record::failed("flat: curvature", FLAT, tol.curvature, &e));
                return;
            }
        };
        let pts = self.points(1, 1.0, 1.0);
        self.records.push(match det_residual(&s, &pts, PhiMode::IdentityMap) {
            Ok(r) => Record::at_most("flat: det residual", FLAT, r, tol.det),
            Err(e) => Record::failed("flat: det residual", FLAT, tol.det, e),
        });
        self.records.push(match curvature_components(&s, &pts) {
            Ok(rep) => Record::at_most("flat: curvature", FLAT, rep.max_component(), tol.curvature),
            Err(e) => Record::failed("flat: curvature", FLAT, tol.curvature, e),
        });
    }

    fn verify_cylinder(&mut self) {
        let tol = &self.cfg.tolerances;
        let n = self.cfg.numeric.cylinder_order;
        let r = self.cfg.seeds.cylinder_radius;
        let s = match self.disc_example(n) {
            Ok(s) => s,
            Err(e) => {
                self.records.push(Record::failed("disc: construction", CYLINDER, tol.coefficients, e));
                return;
            }
        };
        // a = R/(R² - |w|²), b = w̄/(2(R² - |w|²)), d = R|w|² - |w|⁴/(4R)
        let deg = n / 2;
        let zero = cx(0.0, 0.0);
        let a = BiSeries::from_fn(deg, |i, j| if i == j { cx(r.powi(-(2 * i as i32 + 1)), 0.0) } else { zero });
        let b = BiSeries::from_fn(deg, |i, j| if j == i + 1 { cx(0.5 * r.powi(-(2 * i as i32 + 2)), 0.0) } else { zero });
        let d = BiSeries::from_fn(deg, |i, j| match (i, j) {
            (1, 1) => cx(r, 0.0),
            (2, 2) => cx(-0.25 / r, 0.0),
            _ => zero,
        });
        let gap = |x: &BiSeries, y: &BiSeries| x.truncate(deg).max_abs_diff(y);
        let coeff = gap(s.a(), &a).max(gap(s.b(), &b)).max(gap(s.d(), &d));
        self.records.push(
            Record::at_most("disc: closed-form coefficients", CYLINDER, coeff, tol.coefficients)
                .with_detail(format!("through total degree {deg}")),
        );
        let pts = self.points(2, 1.0, 0.5 * r);
        self.records.push(match det_residual(&s, &pts, PhiMode::IdentityMap) {
            Ok(v) => Record::at_most("disc: det residual, |w| <= R/2", CYLINDER, v, tol.det_cylinder),
            Err(e) => Record::failed("disc: det residual, |w| <= R/2", CYLINDER, tol.det_cylinder, e),
        });
        let psh = psh_check(&s, &pts, PhiMode::IdentityMap);
        self.records.push(
            Record::at_most("disc: plurisubharmonic at samples", CYLINDER, if psh { 0.0 } else { 1.0 }, 0.0)
                .with_detail("measured 0 when every sampled Hessian is positive definite"),
        );
        let sys = system_residual(&s.truncate(deg), SystemVariant::MA1).into_iter().fold(0.0, f64::max);
        self.records.push(Record::at_most("disc: coefficient system residual", CYLINDER, sys, tol.system));
    }

    fn curvature(&mut self) {
        let tol = &self.cfg.tolerances;
        let r = self.cfg.seeds.cylinder_radius;
        let s = match self.disc_example(self.cfg.numeric.cylinder_order) {
            Ok(s) => s,
            Err(e) => {
                self.records.push(Record::failed("curvature: construction", OBSTRUCTION, tol.obstruction, e));
                return;
            }
        };
        let pts = self.points(3, 0.8, 0.5 * r);
        self.records.push(match obstruction_check(&s, &pts) {
            Ok(v) => Record::at_most("curvature: R1111 - 4|b_wbar|^2", OBSTRUCTION, v, tol.obstruction),
            Err(e) => Record::failed("curvature: R1111 - 4|b_wbar|^2", OBSTRUCTION, tol.obstruction, e),
        });
        let expect = r.powi(-4);
        self.records.push(match obstruction_values(&s, cx(0.3, -0.2), cx(0.0, 0.0)) {
            Ok((lhs, rhs)) => Record::at_most(
                "curvature: R1111 at w = 0 vs 1/R^4, relative",
                OBSTRUCTION,
                (lhs - expect).abs().max((rhs - expect).abs()) / expect,
                tol.coefficients,
            ),
            Err(e) => Record::failed("curvature: R1111 at w = 0", OBSTRUCTION, tol.coefficients, e),
        });
        match geodesic_length(&s, r) {
            Ok(g) => {
                let target = 2f64.sqrt() * PI / 4.0 * r.powf(1.5);
                self.records.push(Record::at_most(
                    "geodesic: length vs closed form, relative",
                    GEODESIC,
                    (g.length - target).abs() / target,
                    tol.geodesic_rel,
                ));
                self.records.push(Record::at_most(
                    "geodesic: integrand vs series, relative",
                    GEODESIC,
                    g.integrand_defect / r,
                    tol.curvature,
                ));
            }
            Err(e) => self.records.push(Record::failed("geodesic: length", GEODESIC, tol.geodesic_rel, e)),
        }
        let mut table = CsvField::new("curvature_table", &["re_w", "im_w", "R1111_abs", "4|b_wbar|^2"]);
        for k in 0..=8 {
            let rho = 0.5 * r * k as f64 / 8.0;
            for m in 0..(if k == 0 { 1 } else { 8 }) {
                let w = Complex64::from_polar(rho, PI * m as f64 / 4.0);
                if let Ok((lhs, rhs)) = obstruction_values(&s, cx(0.0, 0.0), w) {
                    table.push(vec![w.re, w.im, lhs.abs(), rhs]);
                }
            }
        }
        self.fields.push(table);
    }

    fn radial(&mut self) {
        let tol = &self.cfg.tolerances;
        let count = self.cfg.numeric.samples;
        for name in &self.cfg.seeds.radial_entries {
            let Some(entry) = catalog_entry(name) else {
                continue;
            };
            let anchor = format!("radial catalog: {}", entry.name);
            let p = &entry.params;
            let pts = match valid_points(p, count) {
                Ok(v) => v,
                Err(e) => {
                    self.records.push(Record::failed(format!("{}: sample points", entry.name), &anchor, tol.mae, e));
                    continue;
                }
            };
            self.records.push(match mae_residual(p, &pts) {
                Ok(v) => Record::at_most(format!("{}: mae residual", entry.name), &anchor, v, tol.mae),
                Err(e) => Record::failed(format!("{}: mae residual", entry.name), &anchor, tol.mae, e),
            });
            let ids = valid_samples(p, SAMPLE_WINDOW, count, 0.1)
                .and_then(|ts| Ok(tb_defect(p, &ts)?.max(first_integral_defect(p, &ts)?)));
            let label = format!("{}: b_t = k a^2 and first integral", entry.name);
            self.records.push(match ids {
                Ok(v) => Record::at_most(label, &anchor, v, tol.radial_identities),
                Err(e) => Record::failed(label, &anchor, tol.radial_identities, e),
            });
            if matches!(entry.name, "BlockiHe" | "WangWang") {
                let label = format!("{}: displayed potential", entry.name);
                let worst = pts.iter().try_fold(0.0f64, |acc, &(z, w)| {
                    radial_u(p, z, w).map(|u| acc.max((u - (entry.displayed_u)(z, w)).abs()))
                });
                self.records.push(match worst {
                    Ok(v) => Record::at_most(label, &anchor, v, tol.displayed_u),
                    Err(e) => Record::failed(label, &anchor, tol.displayed_u, e),
                });
            }
        }
    }

    fn donaldson(&mut self) {
        let tol = &self.cfg.tolerances;
        let h = self.cfg.numeric.grid_h;
        let solver_tol = self.cfg.numeric.solver_tol;
        let t_values = [-1.0, 0.0, 1.0];
        let exact = GridSpec::new(2, 2.0 * h, 1.0)
            .and_then(|spec| donaldson_build(spec, &HarmonicSeed::Constant { value: 2.0 }, &|x| x[0], solver_tol));
        self.records.push(match exact {
            Ok(tr) => Record::at_most(
                "donaldson: constant seed residual",
                REDUCTION,
                donaldson_residual(&tr, &[-1.0, 0.0, 0.5, 1.0]),
                tol.donaldson_exact,
            ),
            Err(e) => Record::failed("donaldson: constant seed residual", REDUCTION, tol.donaldson_exact, e),
        });
        let seed = match self.cfg.seeds.donaldson_seed() {
            Ok(s) => s,
            Err(e) => {
                self.records.push(Record::failed("donaldson: seed", REDUCTION, tol.donaldson_grid, e));
                return;
            }
        };
        let mut residuals = Vec::new();
        for (k, step) in [h, 0.5 * h].into_iter().enumerate() {
            let tr = match GridSpec::new(2, step, 1.0).and_then(|spec| donaldson_build(spec, &seed, &|x| x[0], solver_tol)) {
                Ok(tr) => tr,
                Err(e) => {
                    self.records.push(Record::failed(format!("donaldson: build at h = {step}"), REDUCTION, tol.donaldson_grid, e));
                    return;
                }
            };
            residuals.push(donaldson_residual(&tr, &t_values));
            if k == 0 {
                self.records.push(Record::at_most(
                    format!("donaldson: seed residual at h = {step}"),
                    REDUCTION,
                    residuals[0],
                    tol.donaldson_grid,
                ));
                let direct = tr.coefficients();
                let extracted = tr.extract_coefficients();
                let gap = (0..3).map(|i| direct[i].max_abs_diff_interior(&extracted[i])).fold(0.0, f64::max);
                self.records.push(Record::at_most("donaldson: t-coefficient extraction", REDUCTION, gap, tol.extraction));
                let field = tr.residual_field(1.0);
                let mut csv = CsvField::new("donaldson_residual", &["x1", "x2", "residual_t1"]);
                for &i in field.lattice().interior() {
                    let x = field.lattice().coords(i);
                    csv.push(vec![x[0], x[1], field.at(i)]);
                }
                self.fields.push(csv);
            }
        }
        // an exactly representable seed leaves only solver noise, which has no order
        if residuals[0] > 100.0 * solver_tol {
            self.records.push(Record::within(
                "donaldson: residual halving ratio",
                REDUCTION,
                residuals[0] / residuals[1],
                tol.ratio_min,
                tol.ratio_max,
            ));
        }
    }

    fn picard(&mut self) {
        let tol = &self.cfg.tolerances;
        let h = self.cfg.numeric.grid_h;
        let opts = PicardOptions {
            tol: self.cfg.numeric.solver_tol,
            max_iter: 400,
        };
        let zero = GridSpec::new(2, h, 0.5).and_then(|spec| picard(spec, &PicardBoundary::zero(), SystemVariant::MA1, &opts));
        match zero {
            Ok(sol) => {
                self.records.push(Record::at_most("picard: zero data iterations", PICARD, sol.iterations as f64, 1.0));
                let size = sol.atilde.max_abs_interior().max(sol.b.max_abs_interior());
                self.records.push(Record::at_most("picard: zero data stays zero", PICARD, size, 0.0));
            }
            Err(e) => self.records.push(Record::failed("picard: zero data", PICARD, 1.0, e)),
        }

        let at = |w: Complex64| -(1.0 - w.norm_sqr()).ln();
        let b = |w: Complex64| w.conj() / (2.0 * (1.0 - w.norm_sqr()));
        let mut errors = Vec::new();
        for step in [4.0 * h, 2.0 * h, h] {
            match GridSpec::new(2, step, 0.5).and_then(|spec| picard_ma1(spec, &at, &b, SystemVariant::MA1, &opts)) {
                Ok(sol) => {
                    let lat = sol.atilde.lattice().clone();
                    let ea = ScalarGrid::from_fn(&lat, |x| at(cx(x[0], x[1])));
                    let eb = ComplexGrid::from_fn(&lat, |x| b(cx(x[0], x[1])));
                    errors.push(sol.atilde.max_abs_diff_interior(&ea).max(sol.b.max_abs_diff_interior(&eb)));
                    if step == h {
                        let mut csv = CsvField::new("picard_solution", &["x1", "x2", "atilde", "atilde_exact", "re_b", "im_b"]);
                        for &i in lat.interior() {
                            let x = lat.coords(i);
                            let bv = sol.b.at(i);
                            csv.push(vec![x[0], x[1], sol.atilde.at(i), ea.at(i), bv.re, bv.im]);
                        }
                        self.fields.push(csv);
                    }
                }
                Err(e) => self.records.push(Record::failed(format!("picard: disc example at h = {step}"), PICARD, h * h, e)),
            }
        }
        if let [e4, e2, e1] = errors[..] {
            self.records.push(Record::at_most(format!("picard: disc example error at h = {h}"), PICARD, e1, h * h + opts.tol));
            self.records.push(Record::within("picard: halving ratio 4h -> 2h", PICARD, e4 / e2, tol.ratio_min, tol.ratio_max));
            self.records.push(Record::within("picard: halving ratio 2h -> h", PICARD, e2 / e1, tol.ratio_min, tol.ratio_max));
        }

        let at4 = |w: Complex64| 0.05 * w.re;
        let b4 = |w: Complex64| w.conj() * 0.05;
        let label = "picard: MA4 system residual on D_1/4";
        match GridSpec::new(2, h, 0.25).and_then(|spec| picard_ma1(spec, &at4, &b4, SystemVariant::MA4, &opts)) {
            Ok(sol) => {
                let r = sol.recompute_residual().into_iter().fold(0.0, f64::max);
                self.records.push(Record::at_most(label, PICARD_MA4, r, opts.tol));
            }
            Err(e) => self.records.push(Record::failed(label, PICARD_MA4, opts.tol, e)),
        }
    }

    fn appendix(&mut self) {
        let tol = &self.cfg.tolerances;
        self.records.push(Record::at_most(
            "appendix: closed-form residuals",
            APPENDIX,
            appendix_residuals().max_defect(),
            tol.appendix,
        ));
        let h = 0.25 * self.cfg.numeric.grid_h;
        let bump = Bump::standard();
        let target = 2.0 * PI * bump.at_origin();
        let singular = distributional_pairing(PairingField::Singular, &bump, h);
        self.records.push(
            Record::at_most(
                "appendix: pairing magnitude vs 2 pi phi(0), relative",
                APPENDIX,
                (singular.abs() - target).abs() / target,
                tol.pairing_rel,
            )
            .with_detail(format!("pairing value {singular:e} at cell width {h}")),
        );
        let quadrature = 10.0 * h * h;
        self.records.push(Record::at_most(
            "appendix: smooth comparison pairing",
            APPENDIX,
            distributional_pairing(PairingField::Smooth, &bump, h).abs(),
            quadrature,
        ));
        let away = Bump {
            center: [0.5, 0.0],
            radius: 0.3,
        };
        self.records.push(Record::at_most(
            "appendix: bump away from the origin",
            APPENDIX,
            distributional_pairing(PairingField::Singular, &away, h).abs(),
            quadrature,
        ));
    }
}
