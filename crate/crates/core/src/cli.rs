//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Serialize;

use crate::agglomerate::{agglomerate, AgglomerationConfig, ScMode};
use crate::dfn::network::read_network;
use crate::dfn::{network1, solve_network, DfnConfig, FractureNetwork, MeshTarget};
use crate::error::{Error, Result};
use crate::export::{fracture_vtk, quality_vtk, write_table, Format};
use crate::mesh::{read_mesh, write_mesh, PolygonalMesh};
use crate::quality;
use crate::report::{expected_errors, rate_table, ReportRow};
use crate::vem::problems::{by_name, Manufactured, CATALOG};
use crate::vem::solve::projection_discrepancy;
use crate::vem::{error_norms, solve_poisson, SolveOptions};

#[derive(Debug, Parser)]
#[command(name = "polyagg", version, about = "Quality agglomeration of polygonal meshes and VEM solves on fracture networks")]
pub struct Cli {
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Table format.
    #[arg(long, global = true, default_value = "csv", value_parser = parse_format)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-cell quality scores and a VTK heat map.
    Quality {
        mesh: PathBuf,
    },
    /// Agglomerate a mesh and write the result with its energy history.
    Agglomerate {
        mesh: PathBuf,
        #[command(flatten)]
        agg: AggArgs,
    },
    /// Solve a manufactured Poisson problem on one mesh.
    Solve {
        mesh: PathBuf,
        #[arg(long, short = 'k', default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        order: u8,
        /// Manufactured solution id.
        #[arg(long, default_value = "sin")]
        solution: String,
        /// Agglomerate with this λ before solving.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value = "potts", value_parser = parse_sc_mode)]
        sc_mode: ScMode,
        #[arg(long)]
        condition: bool,
    },
    /// Full pipeline on a fracture network.
    DfnSolve {
        #[command(flatten)]
        grid: GridArgs,
        /// Skip the per-fracture VTK files.
        #[arg(long)]
        no_vtk: bool,
    },
    /// Error slopes over a family of refinements.
    Convergence {
        #[command(flatten)]
        grid: GridArgs,
        /// Mesh files forming a refinement family (instead of a network).
        #[arg(long, num_args = 1.., conflicts_with = "network")]
        meshes: Vec<PathBuf>,
        /// Manufactured solution for mesh families.
        #[arg(long, default_value = "sin")]
        solution: String,
    },
}

#[derive(Debug, Args)]
pub struct AggArgs {
    #[arg(long, default_value_t = 0.25)]
    pub lambda: f64,
    #[arg(long, default_value = "potts", value_parser = parse_sc_mode)]
    pub sc_mode: ScMode,
    #[arg(long, default_value_t = 50)]
    pub max_cycles: usize,
    #[arg(long)]
    pub cost_scale: Option<i64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Network file or `builtin:network1`.
    #[arg(long)]
    pub network: Option<String>,
    /// Maximum triangle areas, one run per value.
    #[arg(long, num_args = 1.., value_delimiter = ',', conflicts_with = "cells")]
    pub area: Vec<f64>,
    /// Approximate triangle counts per fracture, one run per value.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub cells: Vec<usize>,
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [0.0])]
    pub lambda: Vec<f64>,
    #[arg(long, short = 'k', num_args = 1.., value_delimiter = ',', default_values_t = [1usize])]
    pub order: Vec<usize>,
    #[arg(long, default_value = "potts", value_parser = parse_sc_mode)]
    pub sc_mode: ScMode,
    #[arg(long, default_value_t = 50)]
    pub max_cycles: usize,
    /// Estimate cond(A) for every run.
    #[arg(long)]
    pub condition: bool,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_sc_mode(s: &str) -> std::result::Result<ScMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn check_lambda(l: f64) -> Result<()> {
    if (0.0..=1.0).contains(&l) {
        Ok(())
    } else {
        Err(Error::Config(format!("λ must lie in [0, 1], got {l}")))
    }
}

fn check_order(k: usize) -> Result<()> {
    if (1..=3).contains(&k) {
        Ok(())
    } else {
        Err(Error::Config(format!("order must be 1, 2 or 3, got {k}")))
    }
}

fn solution(name: &str) -> Result<Manufactured> {
    by_name(name).ok_or_else(|| {
        let known: Vec<&str> = CATALOG.iter().map(|m| m.name).collect();
        Error::Config(format!("unknown solution '{name}' (known: {})", known.join(", ")))
    })
}

pub fn load_network(spec: &str) -> Result<FractureNetwork> {
    match spec {
        "builtin:network1" => Ok(network1()),
        s if s.starts_with("builtin:") => Err(Error::Config(format!("unknown built-in network '{s}'"))),
        path => read_network(path),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "mesh".into(), |s| s.to_string_lossy().into_owned())
}

#[derive(Debug, Serialize)]
struct EnergyRow {
    cycle: usize,
    data: i64,
    smooth: i64,
    total: i64,
}

fn cmd_quality(cli: &Cli, path: &Path) -> Result<()> {
    let mesh = read_mesh(path)?;
    let report = quality::mesh_quality_report(&mesh);
    #[derive(Serialize)]
    struct Row {
        cell: usize,
        rho1: f64,
        rho2: f64,
        rho3: f64,
        rho4: f64,
        rho: f64,
    }
    let rows: Vec<Row> = report
        .cells
        .iter()
        .enumerate()
        .map(|(cell, s)| Row { cell, rho1: s.rho1, rho2: s.rho2, rho3: s.rho3, rho4: s.rho4, rho: s.rho })
        .collect();
    let table = write_table(&cli.out, "quality", &rows, cli.format)?;
    quality_vtk(&mesh).write(cli.out.join("quality.vtk"), "cell quality")?;
    println!("{} cells, min rho {:.6}, mean rho {:.6}", mesh.num_cells(), report.min, report.mean);
    println!("histogram {:?}", report.histogram);
    println!("wrote {}", table.display());
    Ok(())
}

fn agg_config(lambda: f64, sc_mode: ScMode, max_cycles: usize, cost_scale: Option<i64>) -> Result<AgglomerationConfig> {
    check_lambda(lambda)?;
    Ok(AgglomerationConfig { lambda, sc_mode, max_cycles, cost_scale })
}

fn cmd_agglomerate(cli: &Cli, path: &Path, a: &AggArgs) -> Result<()> {
    let mesh = read_mesh(path)?;
    let cfg = agg_config(a.lambda, a.sc_mode, a.max_cycles, a.cost_scale)?;
    let t = Instant::now();
    let res = agglomerate(&mesh, &cfg)?;
    let s = &res.stats;
    write_mesh(&res.mesh, cli.out.join("agglomerated.mesh"))?;
    let energy: Vec<EnergyRow> = res
        .history
        .iter()
        .enumerate()
        .map(|(cycle, e)| EnergyRow { cycle, data: e.data_term, smooth: e.smooth_term, total: e.total })
        .collect();
    write_table(&cli.out, "energy", &energy, cli.format)?;
    write_table(&cli.out, "summary", std::slice::from_ref(s), cli.format)?;
    quality_vtk(&res.mesh).write(cli.out.join("agglomerated.vtk"), "agglomerated mesh")?;
    println!("cells    {} -> {}", s.cells_before, s.cells_after);
    println!("edges    {} -> {}", s.edges_before, s.edges_after);
    println!("vertices {} -> {}", s.vertices_before, s.vertices_after);
    println!(
        "energy   {} -> {} ({:.2}% saved, {} cycles, {:.3}s)",
        s.energy_before,
        s.energy_after,
        100.0 * s.energy_saved,
        s.cycles,
        t.elapsed().as_secs_f64()
    );
    if s.failed_components > 0 {
        println!("{} label components could not be merged and were kept as separate cells", s.failed_components);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn mesh_row(
    name: &str,
    mesh: &PolygonalMesh,
    lambda: f64,
    k: usize,
    sol: &Manufactured,
    sc_mode: ScMode,
    max_cycles: usize,
    condition: bool,
) -> Result<ReportRow> {
    let t = Instant::now();
    let (mesh, energy) = if lambda > 0.0 {
        let a = agglomerate(mesh, &agg_config(lambda, sc_mode, max_cycles, None)?)?;
        (a.mesh, (a.stats.energy_before, a.stats.energy_after))
    } else {
        (mesh.clone(), (0, 0))
    };
    let kappa = nalgebra::Matrix2::identity();
    let f = |p: &crate::mesh::Point| sol.source(&kappa, p);
    let g = |p: &crate::mesh::Point| sol.u(p);
    let disc = solve_poisson(&mesh, &kappa, &f, &g, &SolveOptions::new(k).with_condition(condition))?;
    let e = error_norms(&disc, &|_, p| sol.u(p), &|_, p| sol.grad(p));
    let d = projection_discrepancy(&disc.elements);
    Ok(ReportRow {
        mesh: name.to_string(),
        lambda,
        k,
        cells: mesh.num_cells(),
        dofs: disc.num_dofs(),
        energy_before: energy.0,
        energy_after: energy.1,
        h: mesh.h,
        err_l2: Some(e.l2),
        err_h1: Some(e.h1),
        nnz: disc.nnz,
        cond: disc.cond.map(|c| c.cond),
        max_pi_nabla: d.iter().map(|x| x.0).fold(0.0, f64::max),
        max_pi_0: d.iter().map(|x| x.1).fold(0.0, f64::max),
        wall_seconds: t.elapsed().as_secs_f64(),
    })
}

fn targets(g: &GridArgs) -> Result<Vec<(String, MeshTarget)>> {
    let mut out: Vec<(String, MeshTarget)> = g.area.iter().map(|&a| (format!("area={a}"), MeshTarget::Area(a))).collect();
    out.extend(g.cells.iter().map(|&n| (format!("cells={n}"), MeshTarget::Cells(n))));
    if out.is_empty() {
        return Err(Error::Config("give at least one --area or --cells target".into()));
    }
    Ok(out)
}

fn check_grid(g: &GridArgs) -> Result<()> {
    g.lambda.iter().try_for_each(|&l| check_lambda(l))?;
    g.order.iter().try_for_each(|&k| check_order(k))
}

/// Runs every (target, λ, k) combination on a network, in that nesting order.
fn network_rows(g: &GridArgs, net: &FractureNetwork, vtk_dir: Option<&Path>) -> Result<Vec<ReportRow>> {
    check_grid(g)?;
    let mut rows = Vec::new();
    for (name, target) in targets(g)? {
        for &lambda in &g.lambda {
            for &k in &g.order {
                let cfg = DfnConfig {
                    target,
                    agglomeration: agg_config(lambda, g.sc_mode, g.max_cycles, None)?,
                    solve: SolveOptions::new(k).with_condition(g.condition),
                };
                let (sol, rep) = solve_network(net, &cfg)?;
                info!("{name} λ={lambda} k={k}: {} cells, {} dofs", rep.cells, rep.dofs);
                if let Some(dir) = vtk_dir {
                    for f in 0..net.fractures.len() {
                        let file = dir.join(format!("{name}_lambda={lambda}_k={k}_fracture{f}.vtk"));
                        fracture_vtk(net, &sol, f).write(file, &format!("fracture {f}, {name}, lambda {lambda}, k {k}"))?;
                    }
                }
                rows.push(ReportRow::from_dfn(&name, &rep));
            }
        }
    }
    Ok(rows)
}

fn print_rows(rows: &[ReportRow]) {
    println!("{:<14} {:>5} {:>2} {:>7} {:>8} {:>11} {:>11} {:>11}", "mesh", "λ", "k", "cells", "dofs", "err_L2", "err_H1", "cond");
    for r in rows {
        let f = |v: Option<f64>| v.map_or_else(|| "-".into(), |x| format!("{x:.4e}"));
        println!(
            "{:<14} {:>5} {:>2} {:>7} {:>8} {:>11} {:>11} {:>11}",
            r.mesh,
            r.lambda,
            r.k,
            r.cells,
            r.dofs,
            f(r.err_l2),
            f(r.err_h1),
            f(r.cond)
        );
    }
}

fn run_command(cli: &Cli) -> Result<()> {
    std::fs::create_dir_all(&cli.out)?;
    match &cli.command {
        Command::Quality { mesh } => cmd_quality(cli, mesh),
        Command::Agglomerate { mesh, agg } => cmd_agglomerate(cli, mesh, agg),
        Command::Solve { mesh, order, solution: name, lambda, sc_mode, condition } => {
            let m = read_mesh(mesh)?;
            let sol = solution(name)?;
            let row = mesh_row(&stem(mesh), &m, lambda.unwrap_or(0.0), *order as usize, &sol, *sc_mode, 50, *condition)?;
            let rows = [row];
            write_table(&cli.out, "report", &rows, cli.format)?;
            print_rows(&rows);
            Ok(())
        }
        Command::DfnSolve { grid, no_vtk } => {
            let spec = grid.network.as_deref().ok_or_else(|| Error::Config("--network is required".into()))?;
            let net = load_network(spec)?;
            let rows = network_rows(grid, &net, (!no_vtk).then_some(cli.out.as_path()))?;
            write_table(&cli.out, "report", &rows, cli.format)?;
            print_rows(&rows);
            Ok(())
        }
        Command::Convergence { grid, meshes, solution: name } => {
            let rows = if !meshes.is_empty() {
                check_grid(grid)?;
                if meshes.len() < 3 {
                    return Err(Error::Config(format!("need at least 3 meshes, got {}", meshes.len())));
                }
                let sol = solution(name)?;
                let loaded: Vec<(String, PolygonalMesh)> =
                    meshes.iter().map(|p| Ok((stem(p), read_mesh(p)?))).collect::<Result<_>>()?;
                let mut rows = Vec::new();
                for (n, m) in &loaded {
                    for &lambda in &grid.lambda {
                        for &k in &grid.order {
                            rows.push(mesh_row(n, m, lambda, k, &sol, grid.sc_mode, grid.max_cycles, grid.condition)?);
                        }
                    }
                }
                rows
            } else {
                let spec = grid.network.as_deref().ok_or_else(|| Error::Config("give --network or --meshes".into()))?;
                let n = targets(grid)?.len();
                if n < 3 {
                    return Err(Error::Config(format!("need at least 3 refinements, got {n}")));
                }
                network_rows(grid, &load_network(spec)?, None)?
            };
            let rates = rate_table(&rows)?;
            write_table(&cli.out, "report", &rows, cli.format)?;
            write_table(&cli.out, "rates", &rates, cli.format)?;
            write_table(&cli.out, "expected", &expected_errors(&rows), cli.format)?;
            print_rows(&rows);
            println!("{:>5} {:>2} {:>8} {:>8} {:>10} {:>10}", "λ", "k", "L2/h", "H1/h", "L2/dofs", "H1/dofs");
            for r in &rates {
                println!(
                    "{:>5} {:>2} {:>8.3} {:>8.3} {:>10.3} {:>10.3}",
                    r.lambda, r.k, r.l2_vs_h, r.h1_vs_h, r.l2_vs_dofs, r.h1_vs_dofs
                );
            }
            Ok(())
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("POLYAGG_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("POLYAGG_THREADS must be a positive integer, got '{v}'")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match configure_threads().and_then(|_| run_command(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

