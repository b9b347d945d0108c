use std::fs::File;
use std::io::{self, BufWriter, Write};

use nilp_arctic::arctic::{
    portions, special_points, to_triangular, write_portions_csv, ArcticPortion, SamplingOptions, SvgFigure,
};
use nilp_arctic::asymptotics::{convergence_study, AsymptoticsError};
use nilp_arctic::exactcomb::{brute_force_count, lgv_a, lgv_ahat, lgv_atilde, ExactError, PartitionReport};
use nilp_arctic::onepoint::OnePointTable;
use nilp_arctic::sampler::{outer_shell, overlay_export, overlay_stats, sample_ensemble, OverlayRegion, SampleOptions};
use nilp_arctic::{selftest, Resolvent64};

use crate::config::{field, CliError, Command, RunConfig};

const TANGENCY_TOL: f64 = 1e-9;
const OVERLAY_MARGIN: f64 = 0.1;

type Res = Result<(), CliError>;

fn io_err(e: impl std::fmt::Display) -> CliError {
    field("out", e)
}

/// `out/name` when an output directory is set, stdout otherwise.
fn sink(cfg: &RunConfig, name: &str) -> Result<Box<dyn Write>, CliError> {
    match cfg.out_path(name) {
        Some(p) => {
            Ok(Box::new(BufWriter::new(File::create(&p).map_err(|e| field("out", format!("{}: {e}", p.display())))?)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn write_file(cfg: &RunConfig, name: &str, text: &str) -> Res {
    let p = cfg.out_path(name).ok_or_else(|| field("out", "needs an output directory"))?;
    std::fs::write(&p, text).map_err(|e| field("out", format!("{}: {e}", p.display())))?;
    eprintln!("wrote {}", p.display());
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Res {
    cfg.validate()?;
    match cfg.command {
        Command::Partition => partition(cfg),
        Command::Onepoint => onepoint(cfg),
        Command::Arctic => arctic(cfg),
        Command::Converge => converge(cfg),
        Command::Sample => sample(cfg),
        Command::Selftest => self_test(),
    }
}

fn partition(cfg: &RunConfig) -> Res {
    let mut out = sink(cfg, "partition.txt")?;
    for s in cfg.sequences()? {
        let r = PartitionReport::compute(&s);
        let lines = [
            ("sequence", s.to_string()),
            ("det_A", r.det_a.to_string()),
            ("det_Atilde", r.det_atilde.to_string()),
            ("det_Ahat", r.det_ahat.to_string()),
            ("product", r.product.to_string()),
            ("b_form", r.bform.to_string()),
        ];
        for (k, v) in lines {
            writeln!(out, "{k} {v}").map_err(io_err)?;
        }
        if !r.consistent() {
            eprintln!("A =\n{}\nAtilde =\n{}\nAhat =\n{}", lgv_a(&s), lgv_atilde(&s), lgv_ahat(&s));
            return Err(CliError::Invariant(format!("partition routes disagree on {s}")));
        }
        if cfg.enumerate {
            let c = brute_force_count(&s).map_err(|e| match e {
                ExactError::SizeGuard { .. } => CliError::SizeGuard(e.to_string()),
                e => CliError::Invariant(e.to_string()),
            })?;
            writeln!(out, "enumerated {c}").map_err(io_err)?;
            if c != r.det_a {
                return Err(CliError::Invariant(format!("enumeration gives {c}, determinants {}", r.det_a)));
            }
        }
    }
    out.flush().map_err(io_err)
}

fn onepoint(cfg: &RunConfig) -> Res {
    let kind = cfg.kind()?;
    let seqs = cfg.sequences()?;
    if seqs.len() > 1 && cfg.out.is_none() {
        return Err(field("out", "several sizes need an output directory"));
    }
    for s in seqs {
        let t = OnePointTable::build(&s, kind).map_err(|e| field("kind", e))?;
        t.check_invariants().map_err(CliError::Invariant)?;
        let name =
            if cfg.seq.is_some() { format!("onepoint_{kind}.csv") } else { format!("onepoint_{kind}_n{}.csv", s.n()) };
        t.write_csv(sink(cfg, &name)?).map_err(io_err)?;
    }
    Ok(())
}

fn arctic(cfg: &RunConfig) -> Res {
    let shape = cfg.require_shape()?;
    let a1 = shape.alpha_end();
    let res = Resolvent64::new(shape.clone());
    let ps = portions(&res, SamplingOptions { grid: cfg.grid, end_tol: cfg.tol })
        .map_err(|e| CliError::Invariant(e.to_string()))?;
    for p in &ps {
        eprintln!(
            "{:<18} conjectured={:<5} t in ({:.6}, {:.6}) samples={} cusps={} max tangency residual {:.1e}",
            p.kind.to_string(),
            p.conjectured,
            p.domain.0,
            p.domain.1,
            p.samples.len(),
            p.cusps.len(),
            p.max_tangency_residual()
        );
    }
    if let Ok(sp) = special_points(&shape) {
        eprintln!(
            "special points: top ({:.6}, {:.6}) right ({:.6}, {:.6}) left ({:.6}, {:.6})",
            sp.top.x, sp.top.y, sp.right.x, sp.right.y, sp.left.x, sp.left.y
        );
    }
    let shown: Vec<ArcticPortion<f64>> =
        if cfg.triangular { ps.iter().map(to_triangular).collect() } else { ps.clone() };
    write_portions_csv(&shown, sink(cfg, "arctic.csv")?).map_err(io_err)?;
    if cfg.svg {
        let fig = SvgFigure::new(a1, &ps).triangular(cfg.triangular).with_tangents(&res, &cfg.tangents);
        write_file(cfg, "arctic.svg", &fig.render())?;
    }
    let worst = ps.iter().map(|p| p.max_tangency_residual()).fold(0.0, f64::max);
    if worst >= TANGENCY_TOL {
        return Err(CliError::Invariant(format!("tangency residual {worst:.1e}")));
    }
    let outside: usize = ps.iter().map(|p| p.domain_violations(a1, TANGENCY_TOL)).sum();
    if outside > 0 {
        return Err(CliError::Invariant(format!("{outside} curve samples outside the domain")));
    }
    Ok(())
}

fn converge(cfg: &RunConfig) -> Res {
    let shape = cfg.require_shape()?;
    if cfg.n.is_empty() {
        return Err(field("n", "converge needs --n"));
    }
    let family = cfg.family()?;
    let t = convergence_study(&shape, &cfg.n, family, cfg.window).map_err(|e| match e {
        AsymptoticsError::OutsideDomain(_) => field("window", e),
        e => CliError::Invariant(e.to_string()),
    })?;
    for (n, d) in t.max_deviation_by_n() {
        eprintln!("n = {n:>4}: max |(1/n) log exact - S0| = {d:.4}");
    }
    t.write_csv(sink(cfg, &format!("converge_{}.csv", family.name()))?).map_err(io_err)
}

fn sample(cfg: &RunConfig) -> Res {
    let seqs = cfg.sequences()?;
    let [s] = seqs.as_slice() else {
        return Err(field("n", "sample takes a single size"));
    };
    let opts = SampleOptions {
        n_samples: cfg.samples,
        burn_in: cfg.burn_in,
        thin: cfg.thin,
        seed: cfg.seed,
        chains: cfg.chains,
        start: cfg.start()?,
    };
    eprintln!("burn-in {} proposals, thinning {}, {} chains", opts.burn_in_for(s), opts.thin_for(s), opts.chains);
    let samples = sample_ensemble(s, &opts);
    if let Some(bad) = samples.iter().find(|c| !c.is_valid()) {
        return Err(CliError::Invariant(format!("invalid sample {bad}")));
    }
    let mut out = sink(cfg, "samples.txt")?;
    for c in &samples {
        writeln!(out, "{c}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    let Some(shape) = cfg.shape()? else {
        if cfg.svg {
            return Err(field("shape", "the overlay figure needs --shape"));
        }
        return Ok(());
    };
    let a1 = shape.alpha_end();
    let ps = portions(&Resolvent64::new(shape.clone()), SamplingOptions { grid: cfg.grid, end_tol: cfg.tol })
        .map_err(|e| CliError::Invariant(e.to_string()))?;
    if let (Some(region), Ok(apex)) = (OverlayRegion::from_portions(&ps, a1), nilp_arctic::arctic::apex(&shape)) {
        let st = overlay_stats(&outer_shell(&samples), &region, apex, OVERLAY_MARGIN);
        eprintln!(
            "outer shell: {:.2}% of {} vertices within the {OVERLAY_MARGIN}-inflated region, mean distance {:.4}",
            100.0 * st.inside_fraction,
            st.vertices,
            st.mean_distance
        );
    }
    if cfg.svg {
        let csv_path = cfg.out_path("overlay.csv").expect("validated");
        let f = File::create(&csv_path).map_err(io_err)?;
        let svg = overlay_export(&samples, &ps, a1, BufWriter::new(f)).map_err(io_err)?;
        eprintln!("wrote {}", csv_path.display());
        write_file(cfg, "overlay.svg", &svg)?;
    }
    Ok(())
}

fn self_test() -> Res {
    let checks = selftest::run();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("self-test failed: {}", failed.join(", "))))
    }
}
